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

#ifndef SHIFTSEARCH_ROBUST_TRAIN_HPP
#define SHIFTSEARCH_ROBUST_TRAIN_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shiftsearch/dataset.hpp"
#include "shiftsearch/mlp.hpp"
#include "shiftsearch/search.hpp"
#include "shiftsearch/transform_space.hpp"

namespace shiftsearch {

enum class TrainMethod { erm, rda, rsda, esda };

std::string_view method_name(TrainMethod m) noexcept;
/// Throws ConfigError listing the valid names.
TrainMethod parse_method(std::string_view name);

struct TrainConfig {
  TrainMethod method = TrainMethod::erm;
  /// Total weight updates. For rsda/esda the first rounds * steps_per_round are spent
  /// inside the search loop and the rest sample from the final augmentation set.
  std::size_t total_steps = 10'000;
  std::size_t rounds = 0;           // H
  std::size_t steps_per_round = 0;  // J
  std::size_t batch_size = 32;
  AdamConfig optimizer;
  std::vector<std::size_t> hidden = {128};

  /// Budgets for the search run after each round.
  std::size_t rs_iterations = 100;
  EsConfig es{10, 10, 0.1, 0};
  /// Each search scores tuples on a fresh uniform subset of this many training samples.
  std::size_t search_subset = 1000;
  std::size_t workers = 1;

  std::size_t log_every = 100;
  std::uint64_t seed = 0;

  void validate() const;
};

struct AugmentationEntry {
  Tuple tuple;
  /// Round that appended the tuple; 0 marks the initial identity.
  std::size_t round = 0;
  /// Fitness the search reported for the tuple on its subset (1.0 for the identity).
  double found_fitness = 1.0;

  friend bool operator==(const AugmentationEntry&, const AugmentationEntry&) = default;
};

/// The growing list of tuples sampled during training; element 0 is always the identity.
class AugmentationSet {
 public:
  AugmentationSet() : entries_{{Tuple::identity(), 0, 1.0}} {}

  void append(Tuple tuple, std::size_t round, double fitness) {
    entries_.push_back({std::move(tuple), round, fitness});
  }
  std::size_t size() const noexcept { return entries_.size(); }
  const Tuple& tuple(std::size_t i) const { return entries_[i].tuple; }
  const std::vector<AugmentationEntry>& entries() const noexcept { return entries_; }

  friend bool operator==(const AugmentationSet&, const AugmentationSet&) = default;

 private:
  std::vector<AugmentationEntry> entries_;
};

struct TrainLogRow {
  std::size_t step = 0;
  /// Mean batch loss since the previous row.
  double loss = 0.0;
  std::size_t augmentation_size = 1;
};

struct TrainResult {
  Mlp model;
  AugmentationSet augmentation;
  std::vector<TrainLogRow> log;
};

/// One optimizer update on a batch where image i is transformed by tuples[i] first.
/// Returns the pre-update mean cross-entropy; throws NumericError if it is not finite.
double train_step(Mlp& model, Adam& optimizer, std::span<const Image> images,
                  std::span<const int> labels, std::span<const Tuple> tuples);
/// Same, with one tuple for the whole batch.
double train_step(Mlp& model, Adam& optimizer, std::span<const Image> images,
                  std::span<const int> labels, const Tuple& tuple);

TrainResult train(const LabeledDataset& data, const TrainConfig& cfg, const TransformSet& set,
                  std::size_t n);

struct RobustnessBudget {
  std::size_t rs_iterations = 1000;
  EsConfig es{10, 99, 0.1, 0};
  std::size_t es_restarts = 3;
  std::size_t workers = 1;
  /// RS draws from Rng(seed); ES restart r uses seed + 1 + r.
  std::uint64_t seed = 0;
};

struct RobustnessReport {
  double clean_accuracy = 0.0;
  double rs_worst = 1.0;
  std::string rs_worst_tuple;
  std::size_t rs_evaluations = 0;
  std::vector<double> es_restart_f_min;
  std::vector<std::string> es_restart_tuples;
  double es_worst = 1.0;
  std::string es_worst_tuple;
  std::size_t es_evaluations = 0;

  friend bool operator==(const RobustnessReport&, const RobustnessReport&) = default;
};

/// Clean accuracy, worst RS fitness, and the per-restart / minimum ES fitness. A zero
/// rs_iterations or es_restarts skips that attack.
RobustnessReport evaluate_robustness(Oracle& model, const LabeledDataset& data,
                                     const TransformSet& set, std::size_t n,
                                     const RobustnessBudget& budget);

}  // namespace shiftsearch

#endif  // SHIFTSEARCH_ROBUST_TRAIN_HPP
