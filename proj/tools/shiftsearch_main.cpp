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


// shiftsearch: search, density, train, eval, transform and synth subcommands.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error (I/O, numerics),
// 4 external-oracle failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "shiftsearch/dataset.hpp"
#include "shiftsearch/errors.hpp"
#include "shiftsearch/external_oracle.hpp"
#include "shiftsearch/image.hpp"
#include "shiftsearch/mlp.hpp"
#include "shiftsearch/report.hpp"
#include "shiftsearch/robust_train.hpp"
#include "shiftsearch/search.hpp"
#include "shiftsearch/transform_space.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace shiftsearch;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitAdapter = 4;

struct DataFlags {
  std::string dir;
  std::string synthetic;  // classes:per_class:side:seed
  std::optional<std::size_t> limit;
};

struct OracleFlags {
  std::string model;
  std::string command;
  long timeout_ms = 60'000;
};

struct SetFlags {
  std::string preset;
  std::string set_json;
};

struct EsFlags {
  std::size_t pop = 10;
  std::size_t gens = 99;
  double rate = 0.1;
};

void add_data(CLI::App* cmd, DataFlags& f) {
  auto* dir = cmd->add_option("--data", f.dir, "dataset directory with manifest.csv");
  auto* syn = cmd->add_option("--synthetic", f.synthetic,
                              "generated glyph dataset: classes:per_class:side:seed");
  dir->excludes(syn);
  cmd->add_option("--limit", f.limit, "uniform subsample of at most this many samples");
}

void add_oracle(CLI::App* cmd, OracleFlags& f) {
  auto* model = cmd->add_option("--model", f.model, "builtin model file");
  auto* ext = cmd->add_option("--oracle-cmd", f.command, "external oracle command line");
  model->excludes(ext);
  cmd->add_option("--oracle-timeout-ms", f.timeout_ms, "per-response timeout")
      ->check(CLI::PositiveNumber);
}

void add_set(CLI::App* cmd, SetFlags& f) {
  auto* preset = cmd->add_option("--preset", f.preset, "mnist, cifar, camvid or faces");
  auto* custom = cmd->add_option("--set-json", f.set_json, "transformation set document");
  preset->excludes(custom);
}

void add_es(CLI::App* cmd, EsFlags& f) {
  cmd->add_option("--pop", f.pop, "ES population size P")->capture_default_str();
  cmd->add_option("--gens", f.gens, "ES generations K")->capture_default_str();
  cmd->add_option("--rate", f.rate, "ES per-slot mutation rate")->capture_default_str();
}

struct Synthetic {
  int classes = 0;
  std::size_t per_class = 0;
  std::size_t side = 0;
  std::uint64_t seed = 0;
};

Synthetic parse_synthetic(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  for (std::string part; std::getline(in, part, ':');) parts.push_back(part);
  if (parts.size() != 4) {
    throw ConfigError("--synthetic expects classes:per_class:side:seed, got '" + text + "'");
  }
  try {
    Synthetic s;
    std::size_t used = 0;
    s.classes = std::stoi(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument(parts[0]);
    s.per_class = std::stoul(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
    s.side = std::stoul(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument(parts[2]);
    s.seed = std::stoull(parts[3], &used);
    if (used != parts[3].size()) throw std::invalid_argument(parts[3]);
    if (s.classes < 2 || s.per_class == 0 || s.side < 8) {
      throw ConfigError("--synthetic needs >= 2 classes, >= 1 sample per class and side >= 8");
    }
    return s;
  } catch (const std::logic_error&) {
    throw ConfigError("--synthetic expects integers, got '" + text + "'");
  }
}

struct Inputs {
  RunManifest manifest;

  void digest(const std::string& key, const fs::path& path) {
    if (!fs::exists(path)) throw IoError("no such file or directory: " + path.string());
    manifest.input_digests[key] = digest_path(path);
  }
};

LabeledDataset load_data(const DataFlags& f, std::uint64_t seed, Inputs& inputs) {
  Rng rng(seed);
  if (!f.synthetic.empty()) {
    const auto s = parse_synthetic(f.synthetic);
    Rng gen(s.seed);
    auto data = make_synthetic_dataset(s.classes, s.per_class, s.side, gen);
    inputs.manifest.input_digests["data"] = "synthetic:" + f.synthetic;
    if (f.limit) data = sample_subset(data, *f.limit, rng);
    return data;
  }
  if (f.dir.empty()) throw ConfigError("one of --data or --synthetic is required");
  inputs.digest("data", f.dir);
  return load_dataset(f.dir, f.limit, rng);
}

TransformSet load_set(const SetFlags& f, Inputs& inputs) {
  if (!f.set_json.empty()) {
    inputs.digest("set", f.set_json);
    std::ifstream in(f.set_json);
    if (!in) throw IoError("cannot open " + f.set_json);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError(f.set_json + ": " + e.what());
    }
    return TransformSet::from_json(doc);
  }
  return TransformSet::preset(f.preset.empty() ? "mnist" : f.preset);
}

// Owns whichever oracle the flags select.
struct LoadedOracle {
  std::optional<Mlp> model;
  std::unique_ptr<Oracle> oracle;
};

LoadedOracle load_oracle(const OracleFlags& f, const LabeledDataset& data, Inputs& inputs) {
  LoadedOracle out;
  if (!f.command.empty()) {
    inputs.manifest.input_digests["oracle"] = "command:" + f.command;
    ExternalOracleOptions options;
    options.timeout = std::chrono::milliseconds(f.timeout_ms);
    out.oracle = std::make_unique<ExternalOracle>(f.command, options);
    return out;
  }
  if (f.model.empty()) throw ConfigError("one of --model or --oracle-cmd is required");
  inputs.digest("model", f.model);
  out.model = load_model(f.model);
  const auto& arch = out.model->architecture();
  if (!data.empty() && (arch.height != data.height() || arch.width != data.width())) {
    throw ConfigError("model expects " + std::to_string(arch.height) + "x" +
                      std::to_string(arch.width) + " images, dataset has " +
                      std::to_string(data.height()) + "x" + std::to_string(data.width()));
  }
  if (static_cast<int>(arch.classes) < data.num_classes()) {
    throw ConfigError("dataset has more classes than the model");
  }
  out.oracle = std::make_unique<BuiltinOracle>(*out.model);
  return out;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    write_text(path, text);
  }
}

json finish(Inputs& inputs, json result) {
  inputs.manifest.finished_at = utc_timestamp();
  return json{{"manifest", inputs.manifest.to_json()}, {"result", std::move(result)}};
}

json data_config(const DataFlags& f) {
  json j{{"data", f.dir}, {"synthetic", f.synthetic}};
  j["limit"] = f.limit ? json(*f.limit) : json(nullptr);
  return j;
}

json oracle_config(const OracleFlags& f) {
  return {{"model", f.model}, {"oracle_cmd", f.command}, {"oracle_timeout_ms", f.timeout_ms}};
}

json set_config(const TransformSet& set) { return set.to_json(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Worst-case transformation search and robust training for image classifiers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolkitVersion));

  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::size_t n = 3;
  std::string out;

  auto seeded = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "random seed")->required();
  };

  // search
  DataFlags s_data;
  OracleFlags s_oracle;
  SetFlags s_set;
  EsFlags s_es;
  std::string s_method = "es";
  std::size_t s_iters = 1000;
  auto* search = app.add_subcommand("search", "worst-case tuple search (RS or ES)");
  add_data(search, s_data);
  add_oracle(search, s_oracle);
  add_set(search, s_set);
  add_es(search, s_es);
  search->add_option("--method", s_method, "rs or es")
      ->check(CLI::IsMember({"rs", "es"}))
      ->capture_default_str();
  search->add_option("--iters", s_iters, "RS iterations K")->capture_default_str();
  search->add_option("--n", n, "tuple length N")->capture_default_str();
  search->add_option("--workers", workers, "parallel fitness evaluations")->capture_default_str();
  search->add_option("--out", out, "report path (default stdout)");
  seeded(search);

  // density
  DataFlags d_data;
  OracleFlags d_oracle;
  SetFlags d_set;
  std::size_t d_iters = 10'000;
  double d_q = 0.001;
  std::string d_csv;
  auto* density = app.add_subcommand("density", "RS fitness histogram and low quantile");
  add_data(density, d_data);
  add_oracle(density, d_oracle);
  add_set(density, d_set);
  density->add_option("--iters", d_iters, "RS iterations K")->capture_default_str();
  density->add_option("--q", d_q, "quantile, in (0, 1)")->capture_default_str();
  density->add_option("--n", n, "tuple length N")->capture_default_str();
  density->add_option("--workers", workers, "parallel fitness evaluations")->capture_default_str();
  density->add_option("--csv", d_csv, "histogram CSV path")->required();
  density->add_option("--out", out, "JSON report path (default stdout)");
  seeded(density);

  // train
  DataFlags t_data;
  SetFlags t_set;
  EsFlags t_es{10, 10, 0.1};
  std::string t_method = "erm";
  std::optional<std::size_t> t_rounds;
  std::optional<std::size_t> t_steps_per_round;
  TrainConfig t_cfg;
  std::string t_model_out;
  std::string t_aug_out;
  std::string t_log_out;
  auto* train_cmd = app.add_subcommand("train", "train the builtin model (erm, rda, rsda, esda)");
  add_data(train_cmd, t_data);
  add_set(train_cmd, t_set);
  add_es(train_cmd, t_es);
  train_cmd->add_option("--method", t_method, "erm, rda, rsda or esda")->capture_default_str();
  train_cmd->add_option("--steps", t_cfg.total_steps, "total weight updates")
      ->capture_default_str();
  train_cmd->add_option("--H", t_rounds, "search rounds (rsda, esda)");
  train_cmd->add_option("--J", t_steps_per_round, "updates per round (rsda, esda)");
  train_cmd->add_option("--batch", t_cfg.batch_size, "mini-batch size")->capture_default_str();
  train_cmd->add_option("--lr", t_cfg.optimizer.learning_rate, "Adam step size")
      ->capture_default_str();
  train_cmd->add_option("--hidden", t_cfg.hidden, "hidden layer widths")->expected(0, -1);
  train_cmd->add_option("--rs-iters", t_cfg.rs_iterations, "RS budget per round (rsda)")
      ->capture_default_str();
  train_cmd->add_option("--search-subset", t_cfg.search_subset,
                        "training samples scored per search")
      ->capture_default_str();
  train_cmd->add_option("--log-every", t_cfg.log_every, "updates per log row")
      ->capture_default_str();
  train_cmd->add_option("--n", n, "tuple length N")->capture_default_str();
  train_cmd->add_option("--workers", workers, "parallel fitness evaluations")
      ->capture_default_str();
  train_cmd->add_option("--model-out", t_model_out, "model file to write")->required();
  train_cmd->add_option("--augmentation-out", t_aug_out, "augmentation listing (JSON)");
  train_cmd->add_option("--log-out", t_log_out, "training log (CSV)");
  seeded(train_cmd);

  // eval
  DataFlags e_data;
  OracleFlags e_oracle;
  SetFlags e_set;
  EsFlags e_es;
  RobustnessBudget e_budget;
  auto* eval = app.add_subcommand("eval", "clean accuracy and RS/ES worst-case accuracy");
  add_data(eval, e_data);
  add_oracle(eval, e_oracle);
  add_set(eval, e_set);
  add_es(eval, e_es);
  eval->add_option("--rs-iters", e_budget.rs_iterations, "RS iterations (0 skips RS)")
      ->capture_default_str();
  eval->add_option("--restarts", e_budget.es_restarts, "ES restarts (0 skips ES)")
      ->capture_default_str();
  eval->add_option("--n", n, "tuple length N")->capture_default_str();
  eval->add_option("--workers", workers, "parallel fitness evaluations")->capture_default_str();
  eval->add_option("--out", out, "report path (default stdout)");
  seeded(eval);

  // transform
  SetFlags x_set;
  std::string x_tuple;
  std::vector<std::string> x_inputs;
  std::string x_out_dir;
  auto* transform = app.add_subcommand("transform", "apply a tuple to PNG images");
  add_set(transform, x_set);
  transform->add_option("--tuple", x_tuple, "tuple text, e.g. brightness@3+solarize@0")
      ->required();
  transform->add_option("--out-dir", x_out_dir, "output directory")->required();
  transform->add_option("inputs", x_inputs, "input PNG files")->required();

  // synth
  std::string y_synthetic;
  std::string y_out_dir;
  auto* synth = app.add_subcommand("synth", "write a generated glyph dataset to disk");
  synth->add_option("--synthetic", y_synthetic, "classes:per_class:side:seed")->required();
  synth->add_option("--out-dir", y_out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  Inputs inputs;
  inputs.manifest.started_at = utc_timestamp();
  inputs.manifest.seed = seed;

  try {
    if (*search) {
      inputs.manifest.command = "search";
      const auto data = load_data(s_data, seed, inputs);
      const auto set = load_set(s_set, inputs);
      EsConfig es{s_es.pop, s_es.gens, s_es.rate, seed};
      if (s_method == "es") es.validate();
      auto oracle = load_oracle(s_oracle, data, inputs);
      inputs.manifest.config = {{"method", s_method}, {"n", n},           {"iters", s_iters},
                                {"pop", s_es.pop},    {"gens", s_es.gens}, {"rate", s_es.rate},
                                {"workers", workers}, {"set", set_config(set)}};
      inputs.manifest.config.update(data_config(s_data));
      inputs.manifest.config.update(oracle_config(s_oracle));
      if (n == 0) throw ConfigError("--n must be at least 1");
      FitnessEvaluator evaluator(*oracle.oracle, data, {workers, false});
      SearchResult result;
      if (s_method == "rs") {
        Rng rng(seed);
        result = random_search(evaluator, set, n, s_iters, rng);
      } else {
        result = evolution_search(evaluator, set, n, es);
      }
      emit(out, finish(inputs, to_json(result)).dump(2) + "\n");
    } else if (*density) {
      inputs.manifest.command = "density";
      if (!(d_q > 0.0 && d_q < 1.0)) throw ConfigError("--q must lie in (0, 1)");
      if (d_iters == 0) throw ConfigError("--iters must be at least 1");
      if (n == 0) throw ConfigError("--n must be at least 1");
      const auto data = load_data(d_data, seed, inputs);
      const auto set = load_set(d_set, inputs);
      auto oracle = load_oracle(d_oracle, data, inputs);
      inputs.manifest.config = {{"n", n},         {"iters", d_iters},
                                {"q", d_q},       {"workers", workers},
                                {"csv", d_csv},   {"set", set_config(set)}};
      inputs.manifest.config.update(data_config(d_data));
      inputs.manifest.config.update(oracle_config(d_oracle));
      FitnessEvaluator evaluator(*oracle.oracle, data, {workers, false});
      Rng rng(seed);
      const auto result = random_search(evaluator, set, n, d_iters, rng);
      const auto report = density_report(result.history, d_q);
      write_text(d_csv, density_csv(report));
      json body{{"quantile", report.quantile},
                {"threshold", report.threshold},
                {"evaluations_used", result.evaluations_used},
                {"f_min", result.f_min},
                {"best_tuple", result.best_tuple.to_string()}};
      emit(out, finish(inputs, body).dump(2) + "\n");
    } else if (*train_cmd) {
      inputs.manifest.command = "train";
      t_cfg.method = parse_method(t_method);
      const bool searching = t_cfg.method == TrainMethod::rsda || t_cfg.method == TrainMethod::esda;
      if (!searching && (t_rounds || t_steps_per_round)) {
        std::cerr << "warning: --H/--J are ignored by method " << t_method << '\n';
      }
      if (searching) {
        t_cfg.rounds = t_rounds.value_or(5);
        t_cfg.steps_per_round =
            t_steps_per_round.value_or(t_cfg.rounds ? t_cfg.total_steps / (2 * t_cfg.rounds) : 0);
      }
      t_cfg.es = {t_es.pop, t_es.gens, t_es.rate, 0};
      t_cfg.workers = workers;
      t_cfg.seed = seed;
      if (n == 0) throw ConfigError("--n must be at least 1");
      t_cfg.validate();
      const auto data = load_data(t_data, seed, inputs);
      const auto set = load_set(t_set, inputs);
      inputs.manifest.config = {{"method", t_method},
                                {"steps", t_cfg.total_steps},
                                {"H", t_cfg.rounds},
                                {"J", t_cfg.steps_per_round},
                                {"batch", t_cfg.batch_size},
                                {"lr", t_cfg.optimizer.learning_rate},
                                {"hidden", t_cfg.hidden},
                                {"rs_iters", t_cfg.rs_iterations},
                                {"pop", t_es.pop},
                                {"gens", t_es.gens},
                                {"rate", t_es.rate},
                                {"search_subset", t_cfg.search_subset},
                                {"log_every", t_cfg.log_every},
                                {"n", n},
                                {"workers", workers},
                                {"set", set_config(set)}};
      inputs.manifest.config.update(data_config(t_data));
      const auto result = train(data, t_cfg, set, n);
      save_model(result.model, t_model_out);
      if (!t_aug_out.empty()) {
        write_text(t_aug_out, finish(inputs, to_json(result.augmentation)).dump(2) + "\n");
      }
      if (!t_log_out.empty()) write_text(t_log_out, train_log_csv(result.log));
    } else if (*eval) {
      inputs.manifest.command = "eval";
      if (n == 0) throw ConfigError("--n must be at least 1");
      e_budget.es = {e_es.pop, e_es.gens, e_es.rate, 0};
      if (e_budget.es_restarts > 0) e_budget.es.validate();
      e_budget.workers = workers;
      e_budget.seed = seed;
      const auto data = load_data(e_data, seed, inputs);
      const auto set = load_set(e_set, inputs);
      auto oracle = load_oracle(e_oracle, data, inputs);
      inputs.manifest.config = {{"n", n},
                                {"rs_iters", e_budget.rs_iterations},
                                {"restarts", e_budget.es_restarts},
                                {"pop", e_es.pop},
                                {"gens", e_es.gens},
                                {"rate", e_es.rate},
                                {"workers", workers},
                                {"set", set_config(set)}};
      inputs.manifest.config.update(data_config(e_data));
      inputs.manifest.config.update(oracle_config(e_oracle));
      const auto report = evaluate_robustness(*oracle.oracle, data, set, n, e_budget);
      emit(out, finish(inputs, to_json(report)).dump(2) + "\n");
    } else if (*transform) {
      const auto set = load_set(x_set, inputs);
      const auto tuple = set.parse_tuple(x_tuple);
      fs::create_directories(x_out_dir);
      for (const auto& input : x_inputs) {
        const auto img = read_png(input);
        write_png(tuple.apply(img), fs::path(x_out_dir) / fs::path(input).filename());
      }
    } else if (*synth) {
      const auto s = parse_synthetic(y_synthetic);
      Rng gen(s.seed);
      save_dataset(make_synthetic_dataset(s.classes, s.per_class, s.side, gen), y_out_dir);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const AdapterError& e) {
    std::cerr << "oracle error: " << e.what() << '\n';
    return kExitAdapter;
  } catch (const EvaluationError& e) {
    std::cerr << "oracle error: " << e.what() << '\n';
    return kExitAdapter;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
