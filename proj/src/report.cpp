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

#include "shiftsearch/report.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

#include "shiftsearch/errors.hpp"

namespace shiftsearch {

nlohmann::json RunManifest::to_json() const {
  return {{"command", command},   {"config", config},
          {"seed", seed},         {"version", version},
          {"input_digests", input_digests}, {"started_at", started_at},
          {"finished_at", finished_at}};
}

RunManifest RunManifest::from_json(const nlohmann::json& doc) {
  RunManifest m;
  m.command = doc.at("command").get<std::string>();
  m.config = doc.at("config");
  m.seed = doc.at("seed").get<std::uint64_t>();
  m.version = doc.at("version").get<std::string>();
  m.input_digests = doc.at("input_digests").get<std::map<std::string, std::string>>();
  m.started_at = doc.value("started_at", std::string());
  m.finished_at = doc.value("finished_at", std::string());
  return m;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

void fnv_update(std::uint64_t& h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
}

void fnv_file(std::uint64_t& h, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "' for hashing");
  std::vector<char> buf(1 << 16);
  while (in.read(buf.data(), static_cast<std::streamsize>(buf.size())) || in.gcount() > 0) {
    fnv_update(h, std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())));
  }
}

}  // namespace

std::string digest_path(const std::filesystem::path& path) {
  std::uint64_t h = kFnvOffset;
  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(path)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      fnv_update(h, std::filesystem::relative(f, path).generic_string());
      fnv_file(h, f);
    }
  } else {
    fnv_file(h, path);
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json to_json(const SearchResult& result) {
  nlohmann::json history = nlohmann::json::array();
  for (const auto& h : result.history) {
    history.push_back({{"index", h.index}, {"tuple", h.tuple.to_string()}, {"fitness", h.fitness}});
  }
  return {{"best_tuple", result.best_tuple.to_string()},
          {"f_min", result.f_min},
          {"evaluations_used", result.evaluations_used},
          {"history", history}};
}

SearchResult search_result_from_json(const nlohmann::json& doc, const TransformSet& set) {
  SearchResult r;
  r.best_tuple = set.parse_tuple(doc.at("best_tuple").get<std::string>());
  r.f_min = doc.at("f_min").get<double>();
  r.evaluations_used = doc.at("evaluations_used").get<std::size_t>();
  for (const auto& h : doc.at("history")) {
    r.history.push_back({h.at("index").get<std::size_t>(),
                         set.parse_tuple(h.at("tuple").get<std::string>()),
                         h.at("fitness").get<double>()});
  }
  return r;
}

nlohmann::json to_json(const RobustnessReport& r) {
  return {{"clean_accuracy", r.clean_accuracy},
          {"rs_worst", r.rs_worst},
          {"rs_worst_tuple", r.rs_worst_tuple},
          {"rs_evaluations", r.rs_evaluations},
          {"es_restart_f_min", r.es_restart_f_min},
          {"es_restart_tuples", r.es_restart_tuples},
          {"es_worst", r.es_worst},
          {"es_worst_tuple", r.es_worst_tuple},
          {"es_evaluations", r.es_evaluations}};
}

RobustnessReport robustness_report_from_json(const nlohmann::json& doc) {
  RobustnessReport r;
  r.clean_accuracy = doc.at("clean_accuracy").get<double>();
  r.rs_worst = doc.at("rs_worst").get<double>();
  r.rs_worst_tuple = doc.at("rs_worst_tuple").get<std::string>();
  r.rs_evaluations = doc.at("rs_evaluations").get<std::size_t>();
  r.es_restart_f_min = doc.at("es_restart_f_min").get<std::vector<double>>();
  r.es_restart_tuples = doc.at("es_restart_tuples").get<std::vector<std::string>>();
  r.es_worst = doc.at("es_worst").get<double>();
  r.es_worst_tuple = doc.at("es_worst_tuple").get<std::string>();
  r.es_evaluations = doc.at("es_evaluations").get<std::size_t>();
  return r;
}

nlohmann::json to_json(const AugmentationSet& set) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : set.entries()) {
    out.push_back({{"tuple", e.tuple.to_string()}, {"round", e.round}, {"fitness", e.found_fitness}});
  }
  return out;
}

std::string density_csv(const DensityReport& report) {
  std::ostringstream out;
  out << "bin_low,bin_high,count\n";
  const std::size_t bins = report.histogram.size();
  for (std::size_t b = 0; b < bins; ++b) {
    char row[64];
    std::snprintf(row, sizeof(row), "%.2f,%.2f,%zu\n", static_cast<double>(b) / bins,
                  static_cast<double>(b + 1) / bins, report.histogram[b]);
    out << row;
  }
  return out.str();
}

std::string train_log_csv(std::span<const TrainLogRow> rows) {
  std::ostringstream out;
  out << "step,loss,augmentation_size\n";
  for (const auto& r : rows) {
    char row[96];
    std::snprintf(row, sizeof(row), "%zu,%.17g,%zu\n", r.step, r.loss, r.augmentation_size);
    out << row;
  }
  return out.str();
}

nlohmann::json strip_timestamps(nlohmann::json doc) {
  if (doc.is_object()) {
    doc.erase("started_at");
    doc.erase("finished_at");
    for (auto& [key, value] : doc.items()) value = strip_timestamps(value);
  } else if (doc.is_array()) {
    for (auto& value : doc) value = strip_timestamps(value);
  }
  return doc;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace shiftsearch
