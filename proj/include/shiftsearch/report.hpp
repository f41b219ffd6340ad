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

#ifndef SHIFTSEARCH_REPORT_HPP
#define SHIFTSEARCH_REPORT_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "json.hpp"
#include "shiftsearch/robust_train.hpp"
#include "shiftsearch/search.hpp"

namespace shiftsearch {

inline constexpr std::string_view kToolkitVersion = "0.1.0";

/// Provenance block embedded in every report. Two runs whose manifests agree outside
/// the timestamps produce equal results.
struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::string version{kToolkitVersion};
  std::map<std::string, std::string> input_digests;
  std::string started_at;
  std::string finished_at;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& doc);
};

/// UTC, ISO-8601 with seconds.
std::string utc_timestamp();

/// 64-bit FNV-1a over a file's bytes, or over a directory's regular files in sorted order
/// (relative names included), as 16 hex digits.
std::string digest_path(const std::filesystem::path& path);

nlohmann::json to_json(const SearchResult& result);
/// Tuples are re-parsed against `set`.
SearchResult search_result_from_json(const nlohmann::json& doc, const TransformSet& set);

nlohmann::json to_json(const RobustnessReport& report);
RobustnessReport robustness_report_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const AugmentationSet& set);

/// `bin_low,bin_high,count` rows followed by nothing else; the threshold goes to the
/// JSON side report.
std::string density_csv(const DensityReport& report);
std::string train_log_csv(std::span<const TrainLogRow> rows);

/// Drops every "started_at"/"finished_at" key, recursively.
nlohmann::json strip_timestamps(nlohmann::json doc);

void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace shiftsearch

#endif  // SHIFTSEARCH_REPORT_HPP
