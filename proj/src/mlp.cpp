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

#include "shiftsearch/mlp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "shiftsearch/errors.hpp"

namespace shiftsearch {

std::vector<std::size_t> MlpArchitecture::layer_sizes() const {
  std::vector<std::size_t> sizes{input_size()};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(classes);
  return sizes;
}

std::size_t MlpArchitecture::parameter_count() const {
  const auto sizes = layer_sizes();
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) n += sizes[l + 1] * (sizes[l] + 1);
  return n;
}

namespace {

struct Layer {
  std::size_t in;
  std::size_t out;
  std::size_t weight_offset;
  std::size_t bias_offset;
};

std::vector<Layer> layout(const MlpArchitecture& arch) {
  const auto sizes = arch.layer_sizes();
  std::vector<Layer> layers;
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    Layer layer{sizes[l], sizes[l + 1], offset, offset + sizes[l] * sizes[l + 1]};
    offset = layer.bias_offset + layer.out;
    layers.push_back(layer);
  }
  return layers;
}

void validate(const MlpArchitecture& arch) {
  if (arch.input_size() == 0) throw ConfigError("model input size must be positive");
  if (arch.classes < 2) throw ConfigError("model needs at least two classes");
  for (std::size_t h : arch.hidden) {
    if (h == 0) throw ConfigError("hidden layer widths must be positive");
  }
}

// z_s = bias + sum_i x_s[i] * W[i, :] for up to kBlock samples at once, summed in ascending
// i for every sample, so the result does not depend on how samples are grouped. Each weight
// row is read once per group. Zero inputs (black background) are skipped.
constexpr std::size_t kSampleBlock = 16;

inline void dense_block(const double* w, const double* bias, const Layer& layer,
                        const double* x, double* z, std::size_t samples) {
  const std::size_t in = layer.in;
  const std::size_t out = layer.out;
  for (std::size_t s = 0; s < samples; ++s) std::copy(bias, bias + out, z + s * out);
  for (std::size_t i = 0; i < in; ++i) {
    const double* wi = w + i * out;
    for (std::size_t s = 0; s < samples; ++s) {
      const double xi = x[s * in + i];
      if (xi == 0.0) continue;
      double* zs = z + s * out;
      for (std::size_t j = 0; j < out; ++j) zs[j] += xi * wi[j];
    }
  }
}

void dense_range(const double* w, const double* bias, const Layer& layer, const double* x,
                 double* z, std::size_t begin, std::size_t end, bool relu) {
  for (std::size_t b = begin; b < end; b += kSampleBlock) {
    dense_block(w, bias, layer, x + b * layer.in, z + b * layer.out,
                std::min(kSampleBlock, end - b));
  }
  if (relu) {
    for (std::size_t k = begin * layer.out; k < end * layer.out; ++k) z[k] = std::max(z[k], 0.0);
  }
}

void dense_forward(const double* w, const double* bias, const Layer& layer, const double* x,
                   double* z, std::size_t batch, bool relu, Execution exec) {
  constexpr std::size_t kBlock = 32;
  if (exec == Execution::serial) {
    dense_range(w, bias, layer, x, z, 0, batch, relu);
    return;
  }
  const auto blocks = static_cast<std::ptrdiff_t>((batch + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < blocks; ++k) {
    const std::size_t begin = static_cast<std::size_t>(k) * kBlock;
    dense_range(w, bias, layer, x, z, begin, std::min(batch, begin + kBlock), relu);
  }
}

std::vector<double> to_features(std::span<const Image> images, std::size_t input_size,
                                Execution exec) {
  std::vector<double> x(images.size() * input_size);
  const auto n = static_cast<std::ptrdiff_t>(images.size());
  auto convert = [&](std::ptrdiff_t b) {
    auto px = images[b].data();
    double* dst = x.data() + static_cast<std::size_t>(b) * input_size;
    for (std::size_t i = 0; i < input_size; ++i) dst[i] = px[i] / 255.0;
  };
  if (exec == Execution::serial) {
    for (std::ptrdiff_t b = 0; b < n; ++b) convert(b);
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < n; ++b) convert(b);
  }
  return x;
}

// Activations of every layer: acts[0] is the input, acts.back() the logits.
std::vector<std::vector<double>> forward_all(const std::vector<Layer>& layers,
                                             std::span<const double> weights,
                                             std::vector<double> input, std::size_t batch,
                                             Execution exec) {
  std::vector<std::vector<double>> acts;
  acts.reserve(layers.size() + 1);
  acts.push_back(std::move(input));
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    std::vector<double> z(batch * layer.out);
    dense_forward(weights.data() + layer.weight_offset, weights.data() + layer.bias_offset, layer,
                  acts.back().data(), z.data(), batch, l + 1 < layers.size(), exec);
    acts.push_back(std::move(z));
  }
  return acts;
}

double log_partition(const double* row, std::size_t classes) {
  const double peak = *std::max_element(row, row + classes);
  double sum = 0;
  for (std::size_t c = 0; c < classes; ++c) sum += std::exp(row[c] - peak);
  return peak + std::log(sum);
}

std::size_t checked_label(int label, std::size_t classes) {
  if (label < 0 || static_cast<std::size_t>(label) >= classes) {
    throw ConfigError("label " + std::to_string(label) + " out of range for model");
  }
  return static_cast<std::size_t>(label);
}

void softmax_rows(std::vector<double>& logits, std::size_t classes) {
  for (std::size_t r = 0; r * classes < logits.size(); ++r) {
    double* row = logits.data() + r * classes;
    const double peak = *std::max_element(row, row + classes);
    double total = 0;
    for (std::size_t c = 0; c < classes; ++c) {
      row[c] = std::exp(row[c] - peak);
      total += row[c];
    }
    for (std::size_t c = 0; c < classes; ++c) row[c] /= total;
  }
}

}  // namespace

Mlp::Mlp(MlpArchitecture arch, std::uint64_t seed) : arch_(std::move(arch)), seed_(seed) {
  validate(arch_);
  weights_.assign(arch_.parameter_count(), 0.0);
  Rng rng(seed);
  for (const auto& layer : layout(arch_)) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
    std::uniform_real_distribution<double> init(-bound, bound);
    for (std::size_t i = 0; i < layer.in * layer.out; ++i) {
      weights_[layer.weight_offset + i] = init(rng);
    }
  }
}

Mlp::Mlp(MlpArchitecture arch, std::vector<double> weights, std::uint64_t seed)
    : arch_(std::move(arch)), weights_(std::move(weights)), seed_(seed) {
  validate(arch_);
  if (weights_.size() != arch_.parameter_count()) {
    throw ConfigError("weight vector has " + std::to_string(weights_.size()) +
                      " entries, architecture needs " + std::to_string(arch_.parameter_count()));
  }
}

void Mlp::check_input(std::span<const Image> images) const {
  for (const auto& img : images) {
    if (img.height() != arch_.height || img.width() != arch_.width) {
      throw ConfigError("model expects " + std::to_string(arch_.height) + "x" +
                        std::to_string(arch_.width) + " images, got " +
                        std::to_string(img.height()) + "x" + std::to_string(img.width()));
    }
  }
}

std::vector<double> Mlp::probabilities_batch(std::span<const Image> images, Execution exec) const {
  check_input(images);
  const auto layers = layout(arch_);
  auto acts = forward_all(layers, weights_, to_features(images, arch_.input_size(), exec),
                          images.size(), exec);
  auto probs = std::move(acts.back());
  softmax_rows(probs, arch_.classes);
  return probs;
}

std::vector<double> Mlp::probabilities(const Image& img) const {
  return probabilities_batch(std::span<const Image>(&img, 1), Execution::serial);
}

std::vector<int> Mlp::predict_batch(std::span<const Image> images, Execution exec) const {
  check_input(images);
  const auto layers = layout(arch_);
  const auto acts = forward_all(layers, weights_, to_features(images, arch_.input_size(), exec),
                                images.size(), exec);
  const auto& logits = acts.back();
  std::vector<int> out(images.size());
  for (std::size_t b = 0; b < images.size(); ++b) {
    const double* row = logits.data() + b * arch_.classes;
    out[b] = static_cast<int>(std::max_element(row, row + arch_.classes) - row);
  }
  return out;
}

double Mlp::loss(std::span<const Image> images, std::span<const int> labels,
                 Execution exec) const {
  if (images.empty() || images.size() != labels.size()) {
    throw ConfigError("loss needs a non-empty batch with one label per image");
  }
  for (int y : labels) checked_label(y, arch_.classes);
  check_input(images);
  const auto acts = forward_all(layout(arch_), weights_,
                                to_features(images, arch_.input_size(), exec), images.size(), exec);
  const auto& logits = acts.back();
  double total = 0;
  for (std::size_t b = 0; b < images.size(); ++b) {
    const double* row = logits.data() + b * arch_.classes;
    total += log_partition(row, arch_.classes) - row[static_cast<std::size_t>(labels[b])];
  }
  return total / static_cast<double>(images.size());
}

double Mlp::loss_and_gradient(std::span<const Image> images, std::span<const int> labels,
                              std::span<double> gradient, Execution exec) const {
  if (images.empty() || images.size() != labels.size()) {
    throw ConfigError("gradient needs a non-empty batch with one label per image");
  }
  if (gradient.size() != weights_.size()) throw ConfigError("gradient buffer size mismatch");
  for (int y : labels) checked_label(y, arch_.classes);
  check_input(images);
  const std::size_t batch = images.size();
  const std::size_t classes = arch_.classes;
  const auto layers = layout(arch_);
  auto acts = forward_all(layers, weights_, to_features(images, arch_.input_size(), exec), batch,
                          exec);

  // Output delta: (softmax - onehot) / batch, computed from log-sum-exp for the loss.
  std::vector<double> delta = acts.back();
  double total = 0;
  for (std::size_t b = 0; b < batch; ++b) {
    double* row = delta.data() + b * classes;
    const double log_z = log_partition(row, classes);
    const auto y = static_cast<std::size_t>(labels[b]);
    total += log_z - row[y];
    for (std::size_t c = 0; c < classes; ++c) {
      row[c] = (std::exp(row[c] - log_z) - (c == y ? 1.0 : 0.0)) / static_cast<double>(batch);
    }
  }

  std::fill(gradient.begin(), gradient.end(), 0.0);
  for (std::size_t l = layers.size(); l-- > 0;) {
    const auto& layer = layers[l];
    const double* x = acts[l].data();
    double* gw = gradient.data() + layer.weight_offset;
    double* gb = gradient.data() + layer.bias_offset;

    // dW[i, :] = sum_b x_b[i] * delta_b, rows independent.
    auto weight_rows = [&](std::ptrdiff_t ii) {
      const auto i = static_cast<std::size_t>(ii);
      double* row = gw + i * layer.out;
      for (std::size_t b = 0; b < batch; ++b) {
        const double xi = x[b * layer.in + i];
        if (xi == 0.0) continue;
        const double* d = delta.data() + b * layer.out;
        for (std::size_t j = 0; j < layer.out; ++j) row[j] += xi * d[j];
      }
    };
    const auto ins = static_cast<std::ptrdiff_t>(layer.in);
    if (exec == Execution::serial) {
      for (std::ptrdiff_t i = 0; i < ins; ++i) weight_rows(i);
    } else {
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t i = 0; i < ins; ++i) weight_rows(i);
    }
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t j = 0; j < layer.out; ++j) gb[j] += delta[b * layer.out + j];
    }
    if (l == 0) break;

    // Propagate to the previous (ReLU) layer; acts[l] holds post-activation values.
    std::vector<double> prev(batch * layer.in, 0.0);
    const double* w = weights_.data() + layer.weight_offset;
    auto back_rows = [&](std::ptrdiff_t bi) {
      const auto b = static_cast<std::size_t>(bi);
      const double* d = delta.data() + b * layer.out;
      double* dst = prev.data() + b * layer.in;
      for (std::size_t i = 0; i < layer.in; ++i) {
        if (!(x[b * layer.in + i] > 0.0)) continue;
        const double* wi = w + i * layer.out;
        double acc = 0;
        for (std::size_t j = 0; j < layer.out; ++j) acc += wi[j] * d[j];
        dst[i] = acc;
      }
    };
    const auto rows = static_cast<std::ptrdiff_t>(batch);
    if (exec == Execution::serial) {
      for (std::ptrdiff_t b = 0; b < rows; ++b) back_rows(b);
    } else {
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t b = 0; b < rows; ++b) back_rows(b);
    }
    delta = std::move(prev);
  }
  return total / static_cast<double>(batch);
}

Adam::Adam(std::size_t parameters, AdamConfig config)
    : config_(config), m_(parameters, 0.0), v_(parameters, 0.0) {}

void Adam::step(std::span<double> weights, std::span<const double> gradient) {
  if (weights.size() != m_.size() || gradient.size() != m_.size()) {
    throw ConfigError("optimizer state does not match parameter count");
  }
  ++t_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const double lr = config_.learning_rate;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double g = gradient[i];
    m_[i] = b1 * m_[i] + (1.0 - b1) * g;
    v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
    const double m_hat = m_[i] / correction1;
    const double v_hat = v_[i] / correction2;
    weights[i] -= lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
  }
}

std::vector<int> BuiltinOracle::predict(std::span<const Image> images) {
  return model_.predict_batch(images, exec_);
}

namespace {

constexpr char kMagic[8] = {'S', 'H', 'S', 'M', 'L', 'P', '\r', '\n'};
constexpr std::uint32_t kFormatVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "model files are little-endian; add byte swapping for this platform");

template <typename T>
void put(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::filesystem::path& path) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw CorruptFileError("model file '" + path.string() + "' is truncated");
  }
  return value;
}

}  // namespace

void save_model(const Mlp& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write model file '" + path.string() + "'");
  const auto& arch = model.architecture();
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kFormatVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(arch.height));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(arch.width));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(arch.channels));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(arch.classes));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(arch.hidden.size()));
  for (std::size_t h : arch.hidden) put<std::uint32_t>(out, static_cast<std::uint32_t>(h));
  put<std::uint64_t>(out, model.seed());
  put<std::uint64_t>(out, model.weights().size());
  out.write(reinterpret_cast<const char*>(model.weights().data()),
            static_cast<std::streamsize>(model.weights().size() * sizeof(double)));
  if (!out) throw IoError("failed writing model file '" + path.string() + "'");
}

Mlp load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file '" + path.string() + "'");
  char magic[sizeof(kMagic)] = {};
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw VersionError("'" + path.string() + "' is not a shiftsearch model file");
  }
  const auto version = get<std::uint32_t>(in, path);
  if (version != kFormatVersion) {
    throw VersionError("model file '" + path.string() + "' has format version " +
                       std::to_string(version) + ", expected " + std::to_string(kFormatVersion));
  }
  MlpArchitecture arch;
  arch.height = get<std::uint32_t>(in, path);
  arch.width = get<std::uint32_t>(in, path);
  arch.channels = get<std::uint32_t>(in, path);
  arch.classes = get<std::uint32_t>(in, path);
  const auto depth = get<std::uint32_t>(in, path);
  if (depth > 64) throw CorruptFileError("model file '" + path.string() + "' has a bad header");
  arch.hidden.clear();
  for (std::uint32_t i = 0; i < depth; ++i) arch.hidden.push_back(get<std::uint32_t>(in, path));
  const auto seed = get<std::uint64_t>(in, path);
  const auto count = get<std::uint64_t>(in, path);
  if (arch.input_size() == 0 || arch.classes < 2 || count != arch.parameter_count()) {
    throw CorruptFileError("model file '" + path.string() + "' has inconsistent sizes");
  }
  std::vector<double> weights(count);
  if (!in.read(reinterpret_cast<char*>(weights.data()),
               static_cast<std::streamsize>(count * sizeof(double)))) {
    throw CorruptFileError("model file '" + path.string() + "' is truncated");
  }
  if (in.peek() != std::ifstream::traits_type::eof()) {
    throw CorruptFileError("model file '" + path.string() + "' has trailing bytes");
  }
  return Mlp(std::move(arch), std::move(weights), seed);
}

}  // namespace shiftsearch
