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


#include <algorithm>
#include <filesystem>
#include <fstream>
#include <regex>

#include "doctest.h"
#include "shiftsearch/report.hpp"

using namespace shiftsearch;
namespace fs = std::filesystem;

TEST_SUITE("report") {
  TEST_CASE("manifest round trip") {
    RunManifest m;
    m.command = "search";
    m.config = {{"n", 3}, {"method", "es"}};
    m.seed = 18446744073709551615ull;
    m.input_digests["data"] = "00ff";
    m.started_at = utc_timestamp();
    m.finished_at = utc_timestamp();
    const auto back = RunManifest::from_json(m.to_json());
    CHECK(back.to_json() == m.to_json());
    CHECK(back.version == std::string(kToolkitVersion));
    CHECK(std::regex_match(m.started_at, std::regex(R"(\d{4}-\d\d-\d\dT\d\d:\d\d:\d\dZ)")));
  }

  TEST_CASE("timestamps are stripped recursively") {
    nlohmann::json doc = {{"manifest", {{"started_at", "x"}, {"finished_at", "y"}, {"seed", 1}}},
                          {"list", {{{"started_at", "z"}, {"k", 2}}}}};
    const auto clean = strip_timestamps(doc);
    CHECK(clean == nlohmann::json{{"manifest", {{"seed", 1}}}, {"list", {{{"k", 2}}}}});
  }

  TEST_CASE("search results round trip") {
    const auto set = TransformSet::preset("mnist");
    Rng rng(1);
    SearchResult r;
    for (std::size_t i = 0; i < 5; ++i) r.history.push_back({i, sample_tuple(set, 3, rng), 0.1 * double(i + 1)});
    r.best_tuple = r.history[0].tuple;
    r.f_min = 0.1;
    r.evaluations_used = 5;
    const auto doc = to_json(r);
    CHECK(search_result_from_json(doc, set) == r);
    CHECK(search_result_from_json(nlohmann::json::parse(doc.dump()), set) == r);
  }

  TEST_CASE("robustness reports round trip loss-free") {
    RobustnessReport r;
    r.clean_accuracy = 0.987;
    r.rs_worst = 0.1 + 0.2;
    r.rs_worst_tuple = "brightness@3";
    r.rs_evaluations = 1000;
    r.es_restart_f_min = {0.31, 1.0 / 3.0, 0.29};
    r.es_restart_tuples = {"a@1", "b@2", "c@3"};
    r.es_worst = 0.29;
    r.es_worst_tuple = "c@3";
    r.es_evaluations = 3000;
    CHECK(robustness_report_from_json(nlohmann::json::parse(to_json(r).dump())) == r);
  }

  TEST_CASE("augmentation listing") {
    AugmentationSet aug;
    const auto set = TransformSet::preset("mnist");
    aug.append(set.parse_tuple("solarize@0"), 1, 0.25);
    const auto doc = to_json(aug);
    REQUIRE(doc.size() == 2);
    CHECK(doc[0]["tuple"] == "identity");
    CHECK(doc[1]["round"] == 1);
    CHECK(doc[1]["fitness"] == 0.25);
  }

  TEST_CASE("csv writers") {
    DensityReport d;
    d.histogram.assign(DensityReport::kBins, 0);
    d.histogram[99] = 7;
    const auto csv = density_csv(d);
    CHECK(csv.rfind("bin_low,bin_high,count\n0.00,0.01,0\n", 0) == 0);
    CHECK(csv.find("0.99,1.00,7\n") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 101);

    const std::vector<TrainLogRow> rows = {{100, 0.5, 1}, {200, 0.25, 2}};
    CHECK(train_log_csv(rows) == "step,loss,augmentation_size\n100,0.5,1\n200,0.25,2\n");
  }

  TEST_CASE("digests") {
    const auto dir = fs::temp_directory_path() / "shiftsearch_digest";
    fs::remove_all(dir);
    write_text(dir / "a.txt", "hello");
    write_text(dir / "sub" / "b.txt", "world");
    const auto d1 = digest_path(dir);
    CHECK(d1.size() == 16);
    CHECK(digest_path(dir) == d1);
    CHECK(digest_path(dir / "a.txt") != d1);
    write_text(dir / "a.txt", "hellO");
    CHECK(digest_path(dir) != d1);
    // FNV-1a 64 of the empty input is the offset basis.
    write_text(dir / "empty", "");
    CHECK(digest_path(dir / "empty") == "cbf29ce484222325");
    fs::remove_all(dir);
    CHECK_THROWS(digest_path(dir / "missing"));
  }
}
