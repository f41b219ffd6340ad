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

#include "shiftsearch/robust_train.hpp"

#include <cmath>
#include <sstream>

#include "shiftsearch/batch.hpp"
#include "shiftsearch/errors.hpp"

namespace shiftsearch {

std::string_view method_name(TrainMethod m) noexcept {
  switch (m) {
    case TrainMethod::erm:
      return "erm";
    case TrainMethod::rda:
      return "rda";
    case TrainMethod::rsda:
      return "rsda";
    case TrainMethod::esda:
      return "esda";
  }
  return "erm";
}

TrainMethod parse_method(std::string_view name) {
  for (auto m : {TrainMethod::erm, TrainMethod::rda, TrainMethod::rsda, TrainMethod::esda}) {
    if (method_name(m) == name) return m;
  }
  throw ConfigError("unknown training method '" + std::string(name) +
                    "' (valid methods: erm, rda, rsda, esda)");
}

void TrainConfig::validate() const {
  if (total_steps == 0) throw ConfigError("training needs at least one step");
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  if (method == TrainMethod::rsda || method == TrainMethod::esda) {
    if (rounds * steps_per_round > total_steps) {
      throw ConfigError("rounds * steps-per-round (" + std::to_string(rounds * steps_per_round) +
                        ") exceeds the total step budget (" + std::to_string(total_steps) + ")");
    }
    if (search_subset == 0) throw ConfigError("search subset must be non-empty");
    if (method == TrainMethod::rsda && rs_iterations == 0) {
      throw ConfigError("RS budget must be at least one iteration");
    }
    if (method == TrainMethod::esda) es.validate();
  }
}

double train_step(Mlp& model, Adam& optimizer, std::span<const Image> images,
                  std::span<const int> labels, std::span<const Tuple> tuples) {
  if (images.empty()) throw ConfigError("training batch is empty");
  const auto batch = apply_tuples_pairwise(tuples, images, Execution::parallel);
  std::vector<double> gradient(model.weights().size());
  const double loss = model.loss_and_gradient(batch, labels, gradient, Execution::parallel);
  if (!std::isfinite(loss)) {
    std::ostringstream msg;
    msg << "non-finite training loss " << loss << " at optimizer step " << optimizer.steps() + 1
        << " (batch of " << images.size() << ", first tuple "
        << (tuples.empty() ? std::string("-") : tuples.front().to_string()) << ")";
    throw NumericError(msg.str());
  }
  optimizer.step(model.weights(), gradient);
  return loss;
}

double train_step(Mlp& model, Adam& optimizer, std::span<const Image> images,
                  std::span<const int> labels, const Tuple& tuple) {
  const std::vector<Tuple> tuples(images.size(), tuple);
  return train_step(model, optimizer, images, labels, tuples);
}

namespace {

class Trainer {
 public:
  Trainer(const LabeledDataset& data, const TrainConfig& cfg, const TransformSet& set,
          std::size_t n)
      : data_(data),
        cfg_(cfg),
        set_(set),
        n_(n),
        rng_(cfg.seed),
        model_(architecture(data, cfg), rng_()),
        optimizer_(model_.weights().size(), cfg.optimizer) {}

  TrainResult run() {
    const bool searching = cfg_.method == TrainMethod::rsda || cfg_.method == TrainMethod::esda;
    const std::size_t rounds = searching ? cfg_.rounds : 0;
    for (std::size_t h = 1; h <= rounds; ++h) {
      for (std::size_t j = 0; j < cfg_.steps_per_round; ++j) step();
      search_round(h);
    }
    while (step_ < cfg_.total_steps) step();
    flush_log();
    return {std::move(model_), std::move(augmentation_), std::move(log_)};
  }

 private:
  static MlpArchitecture architecture(const LabeledDataset& data, const TrainConfig& cfg) {
    if (data.empty()) throw ConfigError("training dataset is empty");
    MlpArchitecture arch;
    arch.height = data.height();
    arch.width = data.width();
    arch.hidden = cfg.hidden;
    arch.classes = static_cast<std::size_t>(data.num_classes());
    return arch;
  }

  void step() {
    std::uniform_int_distribution<std::size_t> pick_sample(0, data_.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_aug(0, augmentation_.size() - 1);
    std::vector<Image> images;
    std::vector<int> labels;
    std::vector<Tuple> tuples;
    images.reserve(cfg_.batch_size);
    labels.reserve(cfg_.batch_size);
    tuples.reserve(cfg_.batch_size);
    for (std::size_t b = 0; b < cfg_.batch_size; ++b) {
      const std::size_t i = pick_sample(rng_);
      images.push_back(data_.image(i));
      labels.push_back(data_.label(i));
      if (cfg_.method == TrainMethod::rda) {
        tuples.push_back(sample_tuple(set_, n_, rng_));
      } else {
        tuples.push_back(augmentation_.tuple(pick_aug(rng_)));
      }
    }
    pending_loss_ += train_step(model_, optimizer_, images, labels, tuples);
    ++pending_steps_;
    ++step_;
    if (cfg_.log_every > 0 && step_ % cfg_.log_every == 0) flush_log();
  }

  void flush_log() {
    if (pending_steps_ == 0) return;
    log_.push_back({step_, pending_loss_ / static_cast<double>(pending_steps_), augmentation_.size()});
    pending_loss_ = 0;
    pending_steps_ = 0;
  }

  void search_round(std::size_t round) {
    const auto subset = sample_subset(data_, cfg_.search_subset, rng_);
    BuiltinOracle oracle(model_);
    FitnessEvaluator evaluate(oracle, subset, {cfg_.workers, false});
    SearchResult found;
    if (cfg_.method == TrainMethod::rsda) {
      Rng search_rng(rng_());
      found = random_search(evaluate, set_, n_, cfg_.rs_iterations, search_rng);
    } else {
      EsConfig es = cfg_.es;
      es.seed = rng_();
      found = evolution_search(evaluate, set_, n_, es);
    }
    augmentation_.append(found.best_tuple, round, found.f_min);
  }

  const LabeledDataset& data_;
  const TrainConfig& cfg_;
  const TransformSet& set_;
  std::size_t n_;
  Rng rng_;
  Mlp model_;
  Adam optimizer_;
  AugmentationSet augmentation_;
  std::vector<TrainLogRow> log_;
  std::size_t step_ = 0;
  std::size_t pending_steps_ = 0;
  double pending_loss_ = 0;
};

}  // namespace

TrainResult train(const LabeledDataset& data, const TrainConfig& cfg, const TransformSet& set,
                  std::size_t n) {
  cfg.validate();
  if (n == 0) throw ConfigError("tuple length must be at least 1");
  return Trainer(data, cfg, set, n).run();
}

RobustnessReport evaluate_robustness(Oracle& model, const LabeledDataset& data,
                                     const TransformSet& set, std::size_t n,
                                     const RobustnessBudget& budget) {
  FitnessEvaluator evaluate(model, data, {budget.workers, false});
  RobustnessReport report;
  report.clean_accuracy = evaluate(Tuple::identity());
  if (budget.rs_iterations > 0) {
    Rng rng(budget.seed);
    const auto rs = random_search(evaluate, set, n, budget.rs_iterations, rng);
    report.rs_worst = rs.f_min;
    report.rs_worst_tuple = rs.best_tuple.to_string();
    report.rs_evaluations = rs.evaluations_used;
  }
  for (std::size_t r = 0; r < budget.es_restarts; ++r) {
    EsConfig es = budget.es;
    es.seed = budget.seed + 1 + r;
    const auto result = evolution_search(evaluate, set, n, es);
    report.es_restart_f_min.push_back(result.f_min);
    report.es_restart_tuples.push_back(result.best_tuple.to_string());
    report.es_evaluations += result.evaluations_used;
    if (r == 0 || result.f_min < report.es_worst) {
      report.es_worst = result.f_min;
      report.es_worst_tuple = result.best_tuple.to_string();
    }
  }
  return report;
}

}  // namespace shiftsearch
