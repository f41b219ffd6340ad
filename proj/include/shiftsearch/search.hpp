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

#ifndef SHIFTSEARCH_SEARCH_HPP
#define SHIFTSEARCH_SEARCH_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "shiftsearch/oracle.hpp"
#include "shiftsearch/transform_space.hpp"

namespace shiftsearch {

struct HistoryEntry {
  std::size_t index = 0;
  Tuple tuple;
  double fitness = 1.0;

  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

/// Outcome of a search. `best_tuple` is the first evaluated tuple attaining `f_min`.
struct SearchResult {
  Tuple best_tuple;
  double f_min = 1.0;
  std::vector<HistoryEntry> history;
  std::size_t evaluations_used = 0;

  friend bool operator==(const SearchResult&, const SearchResult&) = default;
};

/// Samples `iterations` tuples uniformly from T_N and scores each one.
SearchResult random_search(FitnessEvaluator& evaluate, const TransformSet& set, std::size_t n,
                           std::size_t iterations, Rng& rng);

/// Guards 1/f selection weights at f = 0.
inline constexpr double kSelectionEpsilon = 1e-6;

/// Normalized selection probabilities, proportional to 1 / max(f, kSelectionEpsilon).
std::vector<double> selection_probabilities(std::span<const double> fitnesses);

/// `count` draws with replacement, member p chosen with selection_probabilities()[p].
std::vector<Tuple> select(std::span<const Tuple> members, std::span<const double> fitnesses,
                          std::size_t count, Rng& rng);

/// One-point crossover of aligned parent pairs. For pair p a cut n is drawn uniformly in
/// [1, N]; the children (head of first + tail of second, head of second + tail of first)
/// are emitted adjacently, giving 2 * pop1.size() tuples.
std::vector<Tuple> crossover(std::span<const Tuple> pop1, std::span<const Tuple> pop2, Rng& rng);

struct MutationResult {
  std::vector<Tuple> population;
  /// Slots that were redrawn (a redraw may reproduce the original atom).
  std::size_t resampled = 0;
};

/// Redraws each slot of each tuple with probability `rate`, uniformly over the set's atoms.
MutationResult mutate(std::vector<Tuple> population, double rate, const TransformSet& set,
                      Rng& rng);

struct EsConfig {
  std::size_t population = 10;
  std::size_t generations = 99;
  double mutation_rate = 0.1;
  std::uint64_t seed = 0;

  /// Throws ConfigError for P < 2, odd P, or a rate outside [0, 1].
  void validate() const;
  std::size_t evaluations() const noexcept { return population * (generations + 1); }
};

/// Genetic search: P initial uniform tuples, then K rounds of select(P/2) twice, crossover,
/// mutation and evaluation. Uses P(K+1) fitness evaluations; randomness comes from cfg.seed.
SearchResult evolution_search(FitnessEvaluator& evaluate, const TransformSet& set, std::size_t n,
                              const EsConfig& cfg);

struct DensityReport {
  double quantile = 0.001;
  double threshold = 0.0;
  /// 100 equal-width bins over [0, 1]; 1.0 falls into the last bin.
  std::vector<std::size_t> histogram;

  static constexpr std::size_t kBins = 100;
};

/// Nearest-rank quantile: the ceil(q * K)-th smallest of K values (at least the first).
double nearest_rank_quantile(std::span<const double> values, double q);

DensityReport density_report(std::span<const HistoryEntry> history, double q);

}  // namespace shiftsearch

#endif  // SHIFTSEARCH_SEARCH_HPP
