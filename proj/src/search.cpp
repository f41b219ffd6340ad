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

#include "shiftsearch/search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "shiftsearch/errors.hpp"

namespace shiftsearch {

namespace {

// Jointly keeps (T, f_min): the first evaluation seeds the record, later ones replace it
// only on a strict improvement.
void record(SearchResult& result, const Tuple& tuple, double value) {
  const std::size_t index = result.history.size();
  if (index == 0 || value < result.f_min) {
    result.f_min = value;
    result.best_tuple = tuple;
  }
  result.history.push_back({index, tuple, value});
  ++result.evaluations_used;
}

void score_into(SearchResult& result, FitnessEvaluator& evaluate, std::span<const Tuple> tuples,
                std::vector<double>* fitnesses = nullptr) {
  const auto values = evaluate.evaluate(tuples);
  for (std::size_t i = 0; i < tuples.size(); ++i) record(result, tuples[i], values[i]);
  if (fitnesses != nullptr) *fitnesses = values;
}

}  // namespace

SearchResult random_search(FitnessEvaluator& evaluate, const TransformSet& set, std::size_t n,
                           std::size_t iterations, Rng& rng) {
  if (iterations == 0) throw ConfigError("random search needs at least one iteration");
  SearchResult result;
  result.history.reserve(iterations);
  // Draw a chunk on the single stream, then score it (possibly in parallel).
  constexpr std::size_t kChunk = 256;
  std::vector<Tuple> chunk;
  for (std::size_t done = 0; done < iterations; done += chunk.size()) {
    const std::size_t count = std::min(kChunk, iterations - done);
    chunk.clear();
    for (std::size_t i = 0; i < count; ++i) chunk.push_back(sample_tuple(set, n, rng));
    score_into(result, evaluate, chunk);
  }
  return result;
}

std::vector<double> selection_probabilities(std::span<const double> fitnesses) {
  std::vector<double> weights(fitnesses.size());
  double total = 0;
  for (std::size_t i = 0; i < fitnesses.size(); ++i) {
    if (!(fitnesses[i] >= 0.0)) throw ConfigError("selection needs non-negative fitness values");
    weights[i] = 1.0 / std::max(fitnesses[i], kSelectionEpsilon);
    total += weights[i];
  }
  for (auto& w : weights) w /= total;
  return weights;
}

std::vector<Tuple> select(std::span<const Tuple> members, std::span<const double> fitnesses,
                          std::size_t count, Rng& rng) {
  if (members.empty() || members.size() != fitnesses.size()) {
    throw ConfigError("selection needs a non-empty population with one fitness per member");
  }
  const auto probs = selection_probabilities(fitnesses);
  std::vector<double> cumulative(probs.size());
  std::partial_sum(probs.begin(), probs.end(), cumulative.begin());
  std::uniform_real_distribution<double> unit(0.0, cumulative.back());
  std::vector<Tuple> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double u = unit(rng);
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    out.push_back(members[static_cast<std::size_t>(it - cumulative.begin())]);
  }
  return out;
}

std::vector<Tuple> crossover(std::span<const Tuple> pop1, std::span<const Tuple> pop2, Rng& rng) {
  if (pop1.size() != pop2.size()) throw ConfigError("crossover needs equally sized populations");
  std::vector<Tuple> out;
  out.reserve(2 * pop1.size());
  for (std::size_t p = 0; p < pop1.size(); ++p) {
    const auto& a = pop1[p];
    const auto& b = pop2[p];
    const std::size_t len = a.size();
    if (len == 0 || b.size() != len) throw ConfigError("crossover needs tuples of one length N >= 1");
    std::uniform_int_distribution<std::size_t> cut_dist(1, len);
    const std::size_t cut = cut_dist(rng);
    std::vector<TransformInstance> first;
    std::vector<TransformInstance> second;
    first.reserve(len);
    second.reserve(len);
    for (std::size_t i = 0; i < len; ++i) {
      first.push_back(i < cut ? a[i] : b[i]);
      second.push_back(i < cut ? b[i] : a[i]);
    }
    out.emplace_back(std::move(first));
    out.emplace_back(std::move(second));
  }
  return out;
}

MutationResult mutate(std::vector<Tuple> population, double rate, const TransformSet& set,
                      Rng& rng) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError("mutation rate must lie in [0, 1]");
  MutationResult result;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto& tuple : population) {
    for (auto& slot : tuple.items()) {
      if (unit(rng) < rate) {
        slot = sample_atom(set, rng);
        ++result.resampled;
      }
    }
  }
  result.population = std::move(population);
  return result;
}

void EsConfig::validate() const {
  if (population < 2) throw ConfigError("ES population must be at least 2");
  if (population % 2 != 0) throw ConfigError("ES population must be even");
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
    throw ConfigError("mutation rate must lie in [0, 1]");
  }
}

SearchResult evolution_search(FitnessEvaluator& evaluate, const TransformSet& set, std::size_t n,
                              const EsConfig& cfg) {
  cfg.validate();
  if (n == 0) throw ConfigError("tuple length must be at least 1");
  Rng rng(cfg.seed);
  SearchResult result;
  result.history.reserve(cfg.evaluations());

  std::vector<Tuple> population;
  population.reserve(cfg.population);
  for (std::size_t p = 0; p < cfg.population; ++p) population.push_back(sample_tuple(set, n, rng));
  std::vector<double> fitnesses;
  score_into(result, evaluate, population, &fitnesses);

  const std::size_t half = cfg.population / 2;
  for (std::size_t k = 0; k < cfg.generations; ++k) {
    const auto parents1 = select(population, fitnesses, half, rng);
    const auto parents2 = select(population, fitnesses, half, rng);
    auto children = crossover(parents1, parents2, rng);
    population = mutate(std::move(children), cfg.mutation_rate, set, rng).population;
    score_into(result, evaluate, population, &fitnesses);
  }
  return result;
}

double nearest_rank_quantile(std::span<const double> values, double q) {
  if (values.empty()) throw ConfigError("quantile of an empty sample");
  if (!(q > 0.0 && q < 1.0)) throw ConfigError("quantile must lie strictly between 0 and 1");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  // Guard against q*K landing a hair above an integer in floating point.
  const double scaled = q * static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(scaled - 1e-9 * std::max(1.0, scaled)));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

DensityReport density_report(std::span<const HistoryEntry> history, double q) {
  if (history.empty()) throw ConfigError("density report needs a non-empty history");
  std::vector<double> values;
  values.reserve(history.size());
  for (const auto& h : history) values.push_back(h.fitness);
  DensityReport report;
  report.quantile = q;
  report.threshold = nearest_rank_quantile(values, q);
  report.histogram.assign(DensityReport::kBins, 0);
  for (double v : values) {
    auto bin = static_cast<std::size_t>(std::floor(v * DensityReport::kBins));
    report.histogram[std::min(bin, DensityReport::kBins - 1)]++;
  }
  return report;
}

}  // namespace shiftsearch
