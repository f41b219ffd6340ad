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


#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>

#include "doctest.h"
#include "shiftsearch/errors.hpp"
#include "shiftsearch/mlp.hpp"
#include "test_util.hpp"

using namespace shiftsearch;
namespace fs = std::filesystem;

namespace {

MlpArchitecture toy_arch() {
  MlpArchitecture arch;
  arch.height = 4;
  arch.width = 4;
  arch.hidden = {6, 5};
  arch.classes = 3;
  return arch;
}

struct Batch {
  std::vector<Image> images;
  std::vector<int> labels;
};

Batch random_batch(std::size_t count, std::size_t side, int classes, unsigned seed) {
  std::mt19937_64 rng(seed);
  Batch b;
  for (std::size_t i = 0; i < count; ++i) {
    b.images.push_back(testutil::random_image(side, side, rng));
    b.labels.push_back(static_cast<int>(rng() % classes));
  }
  return b;
}

// Worst relative disagreement between analytic and central-difference gradients.
double gradient_check(Mlp& model, const Batch& batch, std::size_t coords, unsigned seed) {
  std::vector<double> grad(model.weights().size());
  model.loss_and_gradient(batch.images, batch.labels, grad, Execution::serial);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, grad.size() - 1);
  const double h = 1e-5;
  double worst = 0;
  for (std::size_t k = 0; k < coords; ++k) {
    const std::size_t i = pick(rng);
    double& w = model.weights()[i];
    const double saved = w;
    w = saved + h;
    const double up = model.loss(batch.images, batch.labels, Execution::serial);
    w = saved - h;
    const double down = model.loss(batch.images, batch.labels, Execution::serial);
    w = saved;
    const double numeric = (up - down) / (2 * h);
    const double scale = std::max(std::abs(numeric), std::abs(grad[i]));
    const double err = scale < 1e-8 ? std::abs(numeric - grad[i]) : std::abs(numeric - grad[i]) / scale;
    worst = std::max(worst, err);
  }
  return worst;
}

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("shiftsearch_" + name); }

std::vector<char> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& p, const std::vector<char>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_SUITE("mlp") {
  TEST_CASE("architecture sizes") {
    const auto arch = toy_arch();
    CHECK(arch.input_size() == 48);
    CHECK(arch.layer_sizes() == std::vector<std::size_t>{48, 6, 5, 3});
    CHECK(arch.parameter_count() == 48 * 6 + 6 + 6 * 5 + 5 + 5 * 3 + 3);
    MlpArchitecture bad = arch;
    bad.classes = 1;
    CHECK_THROWS_AS(Mlp(bad, 1), ConfigError);
    bad = arch;
    bad.hidden = {0};
    CHECK_THROWS_AS(Mlp(bad, 1), ConfigError);
    CHECK_THROWS_AS(Mlp(arch, std::vector<double>(3), 1), ConfigError);
  }

  TEST_CASE("initialization is seeded and fan-in scaled") {
    const auto arch = toy_arch();
    const Mlp a(arch, 9), b(arch, 9), c(arch, 10);
    CHECK(a == b);
    CHECK(a.weights().size() == arch.parameter_count());
    CHECK_FALSE(std::equal(a.weights().begin(), a.weights().end(), c.weights().begin()));
    const double bound = 1.0 / std::sqrt(48.0);
    for (std::size_t i = 0; i < 48 * 6; ++i) CHECK(std::abs(a.weights()[i]) <= bound);
    for (std::size_t i = 48 * 6; i < 48 * 6 + 6; ++i) CHECK(a.weights()[i] == 0.0);
  }

  TEST_CASE("softmax output is normalized") {
    const Mlp model(toy_arch(), 2);
    const auto batch = random_batch(9, 4, 3, 1);
    const auto probs = model.probabilities_batch(batch.images, Execution::serial);
    REQUIRE(probs.size() == 27);
    for (std::size_t r = 0; r < 9; ++r) {
      const double total = probs[3 * r] + probs[3 * r + 1] + probs[3 * r + 2];
      CHECK(std::abs(total - 1.0) <= 1e-6);
      for (std::size_t c = 0; c < 3; ++c) CHECK(probs[3 * r + c] >= 0.0);
    }
    const auto single = model.probabilities(batch.images[4]);
    for (std::size_t c = 0; c < 3; ++c) CHECK(single[c] == probs[12 + c]);
  }

  TEST_CASE("predict is the argmax") {
    const Mlp model(toy_arch(), 3);
    const auto batch = random_batch(12, 4, 3, 2);
    const auto preds = model.predict_batch(batch.images, Execution::serial);
    for (std::size_t i = 0; i < 12; ++i) {
      const auto p = model.probabilities(batch.images[i]);
      CHECK(preds[i] == std::max_element(p.begin(), p.end()) - p.begin());
    }
    BuiltinOracle oracle(model);
    CHECK(oracle.predict(batch.images) == preds);
    CHECK(oracle.concurrency_safe());
  }

  TEST_CASE("serial and parallel passes are bit-identical") {
    MlpArchitecture arch;
    arch.height = 8;
    arch.width = 8;
    arch.hidden = {16};
    const Mlp model(arch, 4);
    const auto batch = random_batch(37, 8, 10, 3);
    CHECK(model.probabilities_batch(batch.images, Execution::serial) ==
          model.probabilities_batch(batch.images, Execution::parallel));
    std::vector<double> g1(model.weights().size()), g2(model.weights().size());
    const double l1 = model.loss_and_gradient(batch.images, batch.labels, g1, Execution::serial);
    const double l2 = model.loss_and_gradient(batch.images, batch.labels, g2, Execution::parallel);
    CHECK(l1 == l2);
    CHECK(g1 == g2);
    CHECK(model.loss(batch.images, batch.labels, Execution::serial) == l1);
  }

  TEST_CASE("gradient matches central differences") {
    Mlp model(toy_arch(), 5);
    const auto batch = random_batch(6, 4, 3, 4);
    CHECK(gradient_check(model, batch, 50, 11) <= 1e-4);

    Adam adam(model.weights().size(), {1e-2});
    std::vector<double> grad(model.weights().size());
    for (int s = 0; s < 30; ++s) {
      model.loss_and_gradient(batch.images, batch.labels, grad, Execution::serial);
      adam.step(model.weights(), grad);
    }
    CHECK(gradient_check(model, batch, 50, 12) <= 1e-4);
  }

  TEST_CASE("input validation") {
    const Mlp model(toy_arch(), 6);
    std::vector<Image> wrong = {Image(5, 4)};
    CHECK_THROWS_AS(model.predict_batch(wrong, Execution::serial), ConfigError);
    const auto batch = random_batch(2, 4, 3, 5);
    CHECK_THROWS_AS(model.loss(batch.images, std::vector<int>{0, 3}), ConfigError);
    CHECK_THROWS_AS(model.loss(batch.images, std::vector<int>{0}), ConfigError);
  }

  TEST_CASE("adam step matches the closed form") {
    std::vector<double> w = {1.0, -2.0};
    const std::vector<double> g = {0.5, -0.25};
    Adam adam(2, {0.1, 0.9, 0.999, 1e-8});
    adam.step(w, g);
    // After one step the bias-corrected moments are g and g^2.
    CHECK(w[0] == doctest::Approx(1.0 - 0.1 * 0.5 / (0.5 + 1e-8)));
    CHECK(w[1] == doctest::Approx(-2.0 + 0.1 * 0.25 / (0.25 + 1e-8)));
    adam.step(w, g);
    CHECK(adam.steps() == 2);
    std::vector<double> short_grad(1);
    CHECK_THROWS_AS(adam.step(w, short_grad), ConfigError);
  }

  TEST_CASE("model files round trip bit-exactly") {
    const Mlp model(toy_arch(), 7);
    const auto path = temp_file("model.bin");
    save_model(model, path);
    const Mlp back = load_model(path);
    CHECK(back == model);
    const auto batch = random_batch(5, 4, 3, 6);
    CHECK(back.probabilities_batch(batch.images, Execution::serial) ==
          model.probabilities_batch(batch.images, Execution::serial));
    save_model(back, temp_file("model2.bin"));
    CHECK(slurp(path) == slurp(temp_file("model2.bin")));
    fs::remove(temp_file("model2.bin"));
    fs::remove(path);
  }

  TEST_CASE("damaged model files") {
    const Mlp model(toy_arch(), 8);
    const auto path = temp_file("damaged.bin");
    save_model(model, path);
    const auto bytes = slurp(path);

    auto magic = bytes;
    magic[0] = 'X';
    spit(path, magic);
    CHECK_THROWS_AS(load_model(path), VersionError);

    auto version = bytes;
    version[8] = 9;
    spit(path, version);
    CHECK_THROWS_AS(load_model(path), VersionError);

    spit(path, std::vector<char>(bytes.begin(), bytes.end() - 5));
    CHECK_THROWS_AS(load_model(path), CorruptFileError);
    spit(path, std::vector<char>(bytes.begin(), bytes.begin() + 20));
    CHECK_THROWS_AS(load_model(path), CorruptFileError);

    auto extra = bytes;
    extra.push_back(0);
    spit(path, extra);
    CHECK_THROWS_AS(load_model(path), CorruptFileError);

    fs::remove(path);
    CHECK_THROWS_AS(load_model(path), IoError);
  }
}
