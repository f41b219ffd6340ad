/**
 * Copyright 2026 The shiftsearch Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SHIFTSEARCH_MLP_HPP
#define SHIFTSEARCH_MLP_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "shiftsearch/batch.hpp"
#include "shiftsearch/image.hpp"
#include "shiftsearch/oracle.hpp"

namespace shiftsearch {

struct MlpArchitecture {
  std::size_t height = 32;
  std::size_t width = 32;
  std::size_t channels = Image::kChannels;
  std::vector<std::size_t> hidden = {128};
  std::size_t classes = 10;

  std::size_t input_size() const noexcept { return height * width * channels; }
  /// input, hidden..., classes
  std::vector<std::size_t> layer_sizes() const;
  std::size_t parameter_count() const;

  friend bool operator==(const MlpArchitecture&, const MlpArchitecture&) = default;
};

/// Fully connected classifier on pixels scaled to [0, 1]: ReLU hidden layers, softmax output.
///
/// Parameters live in one flat vector, layer by layer: the weight matrix stored input-major
/// (row i holds the weights from input i to every output unit), then the bias vector.
class Mlp {
 public:
  /// Weights uniform in +-1/sqrt(fan_in), biases zero.
  Mlp(MlpArchitecture arch, std::uint64_t seed);
  Mlp(MlpArchitecture arch, std::vector<double> weights, std::uint64_t seed);

  const MlpArchitecture& architecture() const noexcept { return arch_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<double> weights() noexcept { return weights_; }

  /// Class probabilities for one image.
  std::vector<double> probabilities(const Image& img) const;
  /// Row-major (batch x classes) class probabilities.
  std::vector<double> probabilities_batch(std::span<const Image> images, Execution exec) const;
  std::vector<int> predict_batch(std::span<const Image> images, Execution exec) const;

  /// Mean cross-entropy over the batch.
  double loss(std::span<const Image> images, std::span<const int> labels,
              Execution exec = Execution::parallel) const;
  /// Mean cross-entropy over the batch; writes d loss / d weights into `gradient`.
  double loss_and_gradient(std::span<const Image> images, std::span<const int> labels,
                           std::span<double> gradient, Execution exec = Execution::parallel) const;

  friend bool operator==(const Mlp&, const Mlp&) = default;

 private:
  void check_input(std::span<const Image> images) const;

  MlpArchitecture arch_;
  std::vector<double> weights_;
  std::uint64_t seed_ = 0;
};

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam(std::size_t parameters, AdamConfig config = {});

  void step(std::span<double> weights, std::span<const double> gradient);
  std::size_t steps() const noexcept { return t_; }
  const AdamConfig& config() const noexcept { return config_; }

 private:
  AdamConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::size_t t_ = 0;
};

/// Oracle view of a model whose weights stay fixed for the oracle's lifetime.
class BuiltinOracle final : public Oracle {
 public:
  explicit BuiltinOracle(const Mlp& model) : model_(model) {}

  std::vector<int> predict(std::span<const Image> images) override;
  bool concurrency_safe() const noexcept override { return true; }
  std::string describe() const override { return "builtin-mlp"; }

  /// Serial or OpenMP batch forward pass; evaluators switch this to serial when they
  /// already parallelize across tuples.
  void set_execution(Execution exec) noexcept { exec_ = exec; }

 private:
  const Mlp& model_;
  Execution exec_ = Execution::parallel;
};

/// Binary model file: magic "SHSMLP\r\n", u32 version, architecture, u64 seed, u64 weight
/// count, then little-endian IEEE-754 doubles.
void save_model(const Mlp& model, const std::filesystem::path& path);
/// Throws VersionError on a foreign magic/version, CorruptFileError on truncation or
/// inconsistent sizes.
Mlp load_model(const std::filesystem::path& path);

}  // namespace shiftsearch

#endif  // SHIFTSEARCH_MLP_HPP
