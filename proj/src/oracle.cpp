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

#include "shiftsearch/oracle.hpp"

#include <exception>

#include "shiftsearch/errors.hpp"

namespace shiftsearch {

double fitness(Oracle& model, const Tuple& tuple, const LabeledDataset& data, Execution exec) {
  if (data.empty()) throw ConfigError("fitness needs a non-empty dataset");
  const auto transformed = apply_tuple_batch(tuple, data.images(), exec);
  std::vector<int> predictions;
  try {
    predictions = model.predict(transformed);
  } catch (const AdapterError& e) {
    throw EvaluationError(tuple.to_string(), e.what());
  }
  if (predictions.size() != data.size()) {
    throw EvaluationError(tuple.to_string(), "oracle returned " +
                                                 std::to_string(predictions.size()) +
                                                 " predictions for " +
                                                 std::to_string(data.size()) + " images");
  }
  std::size_t correct = 0;
  const auto labels = data.labels();
  for (std::size_t i = 0; i < predictions.size(); ++i) correct += predictions[i] == labels[i];
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double accuracy(Oracle& model, const LabeledDataset& data, Execution exec) {
  return fitness(model, Tuple::identity(), data, exec);
}

FitnessEvaluator::FitnessEvaluator(Oracle& model, const LabeledDataset& data,
                                   EvaluatorOptions options)
    : model_(model), data_(data), options_(options) {
  if (data_.empty()) throw ConfigError("fitness needs a non-empty dataset");
  if (options_.workers == 0) options_.workers = 1;
}

std::size_t FitnessEvaluator::effective_workers() const noexcept {
  return model_.concurrency_safe() ? options_.workers : 1;
}

double FitnessEvaluator::compute(const Tuple& tuple, Execution exec) {
  if (!options_.cache) return fitness(model_, tuple, data_, exec);
  const std::string key = tuple.to_string();
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  const double value = fitness(model_, tuple, data_, exec);
  std::lock_guard lock(cache_mutex_);
  cache_.emplace(key, value);
  return value;
}

double FitnessEvaluator::operator()(const Tuple& tuple) {
  ++calls_;
  return compute(tuple, Execution::parallel);
}

std::vector<double> FitnessEvaluator::evaluate(std::span<const Tuple> tuples) {
  calls_ += tuples.size();
  std::vector<double> out(tuples.size());
  const std::size_t workers = effective_workers();
  if (workers <= 1 || tuples.size() <= 1) {
    for (std::size_t i = 0; i < tuples.size(); ++i) out[i] = compute(tuples[i], Execution::parallel);
    return out;
  }

  // Outer parallelism over tuples; the per-sample kernels run serially inside.
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto n = static_cast<std::ptrdiff_t>(tuples.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(static_cast<int>(workers))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = compute(tuples[i], Execution::serial);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace shiftsearch
