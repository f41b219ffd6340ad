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
#include <atomic>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "doctest.h"
#include "shiftsearch/dataset.hpp"
#include "shiftsearch/errors.hpp"
#include "shiftsearch/oracle.hpp"
#include "test_util.hpp"

using namespace shiftsearch;
namespace fs = std::filesystem;

namespace {

// Reads the label back out of pixel (0, 0, red).
class PixelOracle : public Oracle {
 public:
  explicit PixelOracle(bool safe = true) : safe_(safe) {}
  std::vector<int> predict(std::span<const Image> images) override {
    ++calls;
    std::vector<int> out;
    for (const auto& img : images) out.push_back(img.at(0, 0, 0) % 10);
    return out;
  }
  bool concurrency_safe() const noexcept override { return safe_; }
  std::string describe() const override { return "pixel"; }
  std::atomic<int> calls{0};

 private:
  bool safe_;
};

class ConstantOracle : public Oracle {
 public:
  explicit ConstantOracle(int label) : label_(label) {}
  std::vector<int> predict(std::span<const Image> images) override {
    return std::vector<int>(images.size(), label_);
  }
  bool concurrency_safe() const noexcept override { return true; }
  std::string describe() const override { return "constant"; }

 private:
  int label_;
};

class BrokenOracle : public Oracle {
 public:
  explicit BrokenOracle(bool short_reply) : short_(short_reply) {}
  std::vector<int> predict(std::span<const Image> images) override {
    if (!short_) throw AdapterError("pipe closed");
    return std::vector<int>(images.size() - 1, 0);
  }
  bool concurrency_safe() const noexcept override { return false; }
  std::string describe() const override { return "broken"; }

 private:
  bool short_;
};

// Sample i has label i % 10 and pixel value label (or a wrong one for the first `wrong`).
LabeledDataset coded_dataset(std::size_t count, std::size_t wrong = 0) {
  std::vector<Image> images;
  std::vector<int> labels;
  for (std::size_t i = 0; i < count; ++i) {
    const int label = static_cast<int>(i % 10);
    const int pixel = i < wrong ? (label + 1) % 10 : label;
    images.push_back(testutil::solid(2, 2, static_cast<std::uint8_t>(pixel), 9, 9));
    labels.push_back(label);
  }
  return LabeledDataset(std::move(images), std::move(labels), 10);
}

fs::path temp_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("shiftsearch_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("dataset validation") {
    std::vector<Image> imgs = {Image(2, 2), Image(2, 2)};
    CHECK_THROWS_AS(LabeledDataset(imgs, {0}, 2), ConfigError);
    CHECK_THROWS_AS(LabeledDataset(imgs, {0, 2}, 2), ConfigError);
    CHECK_THROWS_AS(LabeledDataset(imgs, {0, -1}, 2), ConfigError);
    CHECK_THROWS_AS(LabeledDataset({Image(2, 2), Image(3, 2)}, {0, 1}, 2), ConfigError);
    CHECK_NOTHROW(LabeledDataset(imgs, {0, 1}, 2));
  }

  TEST_CASE("fitness examples") {
    const auto data = coded_dataset(10);
    PixelOracle truthful;
    CHECK(fitness(truthful, Tuple::identity(), data) == 1.0);
    ConstantOracle wrong(11);
    const auto set = TransformSet::preset("mnist");
    Rng rng(1);
    CHECK(fitness(wrong, sample_tuple(set, 3, rng), data) == 0.0);
    PixelOracle again;
    CHECK(fitness(again, Tuple::identity(), coded_dataset(10, 3)) == doctest::Approx(0.7));
  }

  TEST_CASE("fitness is order invariant and matches accuracy") {
    const auto data = coded_dataset(40, 13);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    std::reverse(order.begin(), order.end());
    std::rotate(order.begin(), order.begin() + 7, order.end());
    PixelOracle model;
    const auto shuffled = data.subset(order);
    CHECK(fitness(model, Tuple::identity(), data) == fitness(model, Tuple::identity(), shuffled));
    CHECK(accuracy(model, data) == fitness(model, Tuple::identity(), data));

    const TransformSet set({{TransformKind::Brightness, 0.6, 1.4, 5}});
    const auto t = set.parse_tuple("brightness@4+brightness@0");
    CHECK(fitness(model, t, data) == fitness(model, t, shuffled));
  }

  TEST_CASE("adapter failures carry the tuple") {
    const auto data = coded_dataset(5);
    const TransformSet set({{TransformKind::Solarize, 0, 20, 3}});
    const auto t = set.parse_tuple("solarize@2");
    for (bool short_reply : {false, true}) {
      BrokenOracle broken(short_reply);
      try {
        fitness(broken, t, data);
        FAIL("expected EvaluationError");
      } catch (const EvaluationError& e) {
        CHECK(e.tuple_text() == "solarize@2");
      }
    }
    PixelOracle model;
    CHECK_THROWS_AS(fitness(model, t, LabeledDataset()), ConfigError);
  }

  TEST_CASE("evaluator batches agree with single calls") {
    const auto data = coded_dataset(30, 4);
    const auto set = TransformSet::preset("mnist");
    Rng rng(3);
    std::vector<Tuple> tuples;
    for (int i = 0; i < 12; ++i) tuples.push_back(sample_tuple(set, 2, rng));
    PixelOracle model;
    FitnessEvaluator parallel(model, data, {4, false});
    FitnessEvaluator serial(model, data, {1, false});
    const auto a = parallel.evaluate(tuples);
    const auto b = serial.evaluate(tuples);
    CHECK(a == b);
    for (std::size_t i = 0; i < tuples.size(); ++i) CHECK(a[i] == fitness(model, tuples[i], data));
    CHECK(parallel.calls() == tuples.size());
  }

  TEST_CASE("workers are honored only for concurrency-safe oracles") {
    const auto data = coded_dataset(4);
    PixelOracle safe(true);
    PixelOracle unsafe(false);
    CHECK(FitnessEvaluator(safe, data, {4, false}).effective_workers() == 4);
    CHECK(FitnessEvaluator(unsafe, data, {4, false}).effective_workers() == 1);
    CHECK(FitnessEvaluator(safe, data, {0, false}).effective_workers() == 1);
  }

  TEST_CASE("evaluator cache") {
    const auto data = coded_dataset(10, 2);
    const TransformSet set({{TransformKind::Grayscale, 0, 0, 1}});
    const auto t = set.parse_tuple("grayscale@0");
    PixelOracle model;
    FitnessEvaluator cached(model, data, {1, true});
    const double f = cached(t);
    const int before = model.calls;
    CHECK(cached(t) == f);
    CHECK(model.calls == before);
    CHECK(cached.calls() == 2);
  }

  TEST_CASE("evaluator surfaces failures") {
    const auto data = coded_dataset(3);
    BrokenOracle broken(false);
    FitnessEvaluator evaluator(broken, data);
    const TransformSet set({{TransformKind::Grayscale, 0, 0, 1}});
    std::vector<Tuple> tuples(3, set.parse_tuple("grayscale@0"));
    CHECK_THROWS_AS(evaluator.evaluate(tuples), EvaluationError);
  }

  TEST_CASE("single-tuple space: fitness equals enumeration minimum") {
    const auto data = coded_dataset(20, 5);
    const TransformSet one({{TransformKind::Sharpness, 0.6, 0.6, 1}});
    const auto all = enumerate_tuples(one, 2);
    REQUIRE(all.size() == 1);
    PixelOracle model;
    CHECK(fitness(model, all[0], data) == fitness(model, one.parse_tuple("sharpness@0+sharpness@0"), data));
  }

  TEST_CASE("dataset round trip through disk") {
    Rng gen(4);
    const auto data = make_synthetic_dataset(3, 1, 12, gen);
    const auto dir = temp_dir("roundtrip");
    save_dataset(data, dir);
    Rng rng(0);
    const auto back = load_dataset(dir, std::nullopt, rng, 3);
    CHECK(back == data);
    CHECK(back.size() == 3);
    CHECK(back.label(0) == 0);
    CHECK(back.label(2) == 2);
    fs::remove_all(dir);
  }

  TEST_CASE("dataset limits") {
    Rng gen(5);
    const auto data = make_synthetic_dataset(10, 20, 10, gen);
    const auto dir = temp_dir("limits");
    save_dataset(data, dir);
    Rng r1(9), r2(9), r3(9);
    const auto a = load_dataset(dir, 50, r1);
    const auto b = load_dataset(dir, 50, r2);
    CHECK(a.size() == 50);
    CHECK(a == b);
    CHECK(load_dataset(dir, 1000, r3).size() == 200);
    fs::remove_all(dir);
  }

  TEST_CASE("dataset loading errors") {
    const auto dir = temp_dir("errors");
    Rng rng(0);
    CHECK_THROWS_AS(load_dataset(dir, std::nullopt, rng), IoError);
    write_png(Image(4, 4), dir / "a.png");
    write_png(Image(5, 4), dir / "b.png");
    {
      std::ofstream(dir / "manifest.csv") << "filename,label\na.png,0\na.png,7\n";
    }
    CHECK_THROWS_AS(load_dataset(dir, std::nullopt, rng, 3), ConfigError);
    {
      std::ofstream(dir / "manifest.csv") << "filename,label\na.png,0\nb.png,1\n";
    }
    CHECK_THROWS_AS(load_dataset(dir, std::nullopt, rng), ConfigError);
    {
      std::ofstream(dir / "manifest.csv") << "filename,label\na.png,zero\n";
    }
    CHECK_THROWS_AS(load_dataset(dir, std::nullopt, rng), IoError);
    {
      std::ofstream(dir / "manifest.csv") << "filename,label\nmissing.png,0\n";
    }
    CHECK_THROWS_AS(load_dataset(dir, std::nullopt, rng), IoError);
    fs::remove_all(dir);
  }

  TEST_CASE("png io replicates grayscale") {
    const auto dir = temp_dir("png");
    std::mt19937_64 gen(6);
    const Image img = testutil::random_image(7, 5, gen);
    write_png(img, dir / "x.png");
    CHECK(read_png(dir / "x.png") == img);
    CHECK_THROWS_AS(read_png(dir / "none.png"), IoError);
    fs::remove_all(dir);
  }

  TEST_CASE("synthetic dataset") {
    Rng a(7), b(7);
    const auto d1 = make_synthetic_dataset(10, 100, 32, a);
    const auto d2 = make_synthetic_dataset(10, 100, 32, b);
    CHECK(d1.size() == 1000);
    CHECK(d1.height() == 32);
    CHECK(d1.width() == 32);
    CHECK(d1 == d2);
    for (std::size_t i = 0; i < 20; ++i) CHECK(d1.label(i) == int(i % 10));
    CHECK_THROWS_AS(make_synthetic_dataset(1, 10, 32, a), ConfigError);
  }

  TEST_CASE("glyph prototypes are separable") {
    for (int classes : {10, 16}) {
      const auto protos = glyph_prototypes(classes, 32);
      REQUIRE(protos.size() == std::size_t(classes));
      for (int i = 0; i < classes; ++i)
        for (int j = i + 1; j < classes; ++j) {
          std::size_t differ = 0;
          for (std::size_t p = 0; p < protos[i].pixel_count(); ++p)
            differ += protos[i].data()[3 * p] != protos[j].data()[3 * p];
          CHECK(double(differ) / double(protos[i].pixel_count()) >= 0.05);
        }
    }
  }
}
