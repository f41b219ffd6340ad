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

#ifndef SHIFTSEARCH_ORACLE_HPP
#define SHIFTSEARCH_ORACLE_HPP

#include <cstddef>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "shiftsearch/batch.hpp"
#include "shiftsearch/dataset.hpp"
#include "shiftsearch/transform_space.hpp"

namespace shiftsearch {

/// A black-box classifier: images in, class indices out.
class Oracle {
 public:
  virtual ~Oracle() = default;

  /// One prediction per image, in order. `images` is non-empty and uniformly shaped.
  virtual std::vector<int> predict(std::span<const Image> images) = 0;

  /// Whether predict() may be called from several threads at once.
  virtual bool concurrency_safe() const noexcept = 0;

  virtual std::string describe() const = 0;
};

/// Mean top-1 accuracy of `model` on `data` after every image is transformed by `tuple`.
/// Adapter failures are rethrown as EvaluationError carrying the tuple text.
double fitness(Oracle& model, const Tuple& tuple, const LabeledDataset& data,
               Execution exec = Execution::parallel);

/// Clean accuracy, i.e. fitness of the identity tuple.
double accuracy(Oracle& model, const LabeledDataset& data, Execution exec = Execution::parallel);

struct EvaluatorOptions {
  /// Upper bound on concurrent fitness evaluations; only used for concurrency-safe oracles.
  std::size_t workers = 1;
  /// Memoize by tuple text. Valid only for deterministic oracles.
  bool cache = false;
};

/// Binds an oracle and a dataset into the fitness function searched over.
class FitnessEvaluator {
 public:
  FitnessEvaluator(Oracle& model, const LabeledDataset& data, EvaluatorOptions options = {});

  double operator()(const Tuple& tuple);
  /// Scores a batch of tuples, in parallel when allowed; results align with `tuples`.
  std::vector<double> evaluate(std::span<const Tuple> tuples);

  /// Number of fitness evaluations requested so far (cache hits included).
  std::size_t calls() const noexcept { return calls_; }
  std::size_t effective_workers() const noexcept;
  const LabeledDataset& data() const noexcept { return data_; }

 private:
  double compute(const Tuple& tuple, Execution exec);

  Oracle& model_;
  const LabeledDataset& data_;
  EvaluatorOptions options_;
  std::size_t calls_ = 0;
  std::mutex cache_mutex_;
  std::unordered_map<std::string, double> cache_;
};

}  // namespace shiftsearch

#endif  // SHIFTSEARCH_ORACLE_HPP
