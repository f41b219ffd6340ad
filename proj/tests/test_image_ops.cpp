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
#include <random>
#include <vector>

#include "doctest.h"
#include "reference_ops.hpp"
#include "shiftsearch/image_ops.hpp"
#include "test_util.hpp"

using namespace shiftsearch;
using testutil::max_abs_diff;
using testutil::random_image;
using testutil::solid;

TEST_SUITE("image_ops") {
  TEST_CASE("clamp_round rounds half away from zero and saturates") {
    CHECK(ops::clamp_round(2.5) == 3);
    CHECK(ops::clamp_round(2.4999) == 2);
    CHECK(ops::clamp_round(-0.5) == 0);
    CHECK(ops::clamp_round(254.5) == 255);
    CHECK(ops::clamp_round(1000.0) == 255);
    CHECK(ops::clamp_round(-40.0) == 0);
  }

  TEST_CASE("autocontrast examples") {
    const Image flat = solid(4, 4, 128, 128, 128);
    CHECK(ops::autocontrast(flat, 0.0) == flat);
    CHECK(ops::autocontrast(flat, 0.3) == flat);

    Image two(1, 2);
    for (std::size_t c = 0; c < 3; ++c) two.at(0, 1, c) = 255;
    CHECK(ops::autocontrast(two, 0.0) == two);

    Image three(1, 3);
    const std::uint8_t in[3] = {50, 100, 150};
    for (std::size_t x = 0; x < 3; ++x)
      for (std::size_t c = 0; c < 3; ++c) three.at(0, x, c) = in[x];
    const Image out = ops::autocontrast(three, 0.0);
    CHECK(out.at(0, 0, 0) == 0);
    CHECK(out.at(0, 1, 1) == 128);
    CHECK(out.at(0, 2, 2) == 255);

    CHECK_THROWS(ops::autocontrast(flat, 0.31));
    CHECK_THROWS(ops::autocontrast(flat, -0.01));
  }

  TEST_CASE("autocontrast works per channel") {
    Image img(1, 2);
    img.at(0, 0, 0) = 10;
    img.at(0, 1, 0) = 20;
    img.at(0, 0, 1) = 7;
    img.at(0, 1, 1) = 7;
    const Image out = ops::autocontrast(img, 0.0);
    CHECK(out.at(0, 0, 0) == 0);
    CHECK(out.at(0, 1, 0) == 255);
    CHECK(out.at(0, 0, 1) == 7);
  }

  TEST_CASE("brightness examples") {
    std::mt19937_64 rng(1);
    const Image img = random_image(5, 7, rng);
    CHECK(ops::brightness(img, 1.0) == img);
    CHECK(ops::brightness(img, 0.0) == Image(5, 7, 0));
    CHECK(ops::brightness(solid(1, 1, 200, 200, 200), 0.5) == solid(1, 1, 100, 100, 100));
  }

  TEST_CASE("color examples") {
    std::mt19937_64 rng(2);
    const Image img = random_image(5, 7, rng);
    CHECK(ops::color(img, 1.0) == img);
    CHECK(ops::color(img, 0.0) == ops::grayscale(img));
    const Image gray = ops::grayscale(img);
    for (double f : {0.0, 0.6, 1.4, 3.0}) CHECK(ops::color(gray, f) == gray);
  }

  TEST_CASE("contrast examples") {
    std::mt19937_64 rng(3);
    const Image img = random_image(6, 6, rng);
    CHECK(ops::contrast(img, 1.0) == img);
    double total = 0;
    for (std::size_t y = 0; y < 6; ++y)
      for (std::size_t x = 0; x < 6; ++x)
        total += ops::luminance(img.at(y, x, 0), img.at(y, x, 1), img.at(y, x, 2));
    const auto g = static_cast<std::uint8_t>(std::lround(total / 36.0));
    CHECK(ops::contrast(img, 0.0) == Image(6, 6, g));
    const Image flat = solid(3, 3, 90, 90, 90);
    for (double f : {0.0, 0.6, 1.4}) CHECK(ops::contrast(flat, f) == flat);
  }

  TEST_CASE("sharpness examples") {
    std::mt19937_64 rng(4);
    const Image img = random_image(6, 5, rng);
    CHECK(ops::sharpness(img, 1.0) == img);
    const Image flat = solid(5, 5, 33, 77, 200);
    for (double f : {0.0, 0.6, 1.4}) CHECK(ops::sharpness(flat, f) == flat);

    Image dot(3, 3);
    dot.at(1, 1, 0) = 255;
    const Image blurred = ops::sharpness(dot, 0.0);
    CHECK(blurred.at(1, 1, 0) == 98);
    CHECK(blurred.at(0, 0, 0) == 0);
    CHECK(blurred.at(1, 1, 1) == 0);

    const Image thin = random_image(2, 9, rng);
    CHECK(ops::sharpness(thin, 0.0) == thin);
  }

  TEST_CASE("sharpness keeps the unfiltered border") {
    std::mt19937_64 rng(5);
    const Image img = random_image(6, 6, rng);
    const Image blurred = ops::sharpness(img, 0.0);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t c = 0; c < 3; ++c) {
        CHECK(blurred.at(0, i, c) == img.at(0, i, c));
        CHECK(blurred.at(5, i, c) == img.at(5, i, c));
        CHECK(blurred.at(i, 0, c) == img.at(i, 0, c));
        CHECK(blurred.at(i, 5, c) == img.at(i, 5, c));
      }
  }

  TEST_CASE("solarize examples") {
    std::mt19937_64 rng(6);
    const Image img = random_image(4, 4, rng);
    const Image neg = ops::solarize(img, 0.0);
    for (std::size_t i = 0; i < img.size(); ++i) CHECK(neg.data()[i] == 255 - img.data()[i]);
    CHECK(ops::solarize(solid(1, 1, 255, 255, 255), 20.0) == Image(1, 1, 0));
    CHECK(ops::solarize(solid(1, 1, 10, 10, 10), 20.0) == solid(1, 1, 10, 10, 10));
    CHECK(ops::solarize(solid(1, 1, 20, 19, 21), 20.0) == solid(1, 1, 235, 19, 234));
  }

  TEST_CASE("grayscale examples") {
    CHECK(ops::grayscale(solid(1, 1, 255, 0, 0)) == solid(1, 1, 76, 76, 76));
    for (int v : {0, 1, 128, 254, 255}) {
      const auto b = static_cast<std::uint8_t>(v);
      CHECK(ops::grayscale(solid(2, 2, b, b, b)) == solid(2, 2, b, b, b));
    }
    CHECK(ops::grayscale(Image(3, 3, 0)) == Image(3, 3, 0));
  }

  TEST_CASE("enhance_channel examples") {
    std::mt19937_64 rng(7);
    const Image img = random_image(4, 4, rng);
    for (auto ch : {ops::Channel::R, ops::Channel::G, ops::Channel::B})
      CHECK(ops::enhance_channel(img, ch, 0.0) == img);
    CHECK(ops::enhance_channel(solid(1, 1, 240, 5, 5), ops::Channel::R, 30) ==
          solid(1, 1, 255, 5, 5));
    CHECK(ops::enhance_channel(solid(1, 1, 5, 10, 5), ops::Channel::G, -30) ==
          solid(1, 1, 5, 0, 5));
    CHECK(ops::enhance_channel(solid(1, 1, 5, 10, 5), ops::Channel::B, 8.5) ==
          solid(1, 1, 5, 10, 14));
  }

  TEST_CASE("kernel properties on random images") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t h = 1 + rng() % 12;
      const std::size_t w = 1 + rng() % 12;
      const Image img = random_image(h, w, rng);
      const Image copy = img;
      const std::vector<Image> outs = {
          ops::autocontrast(img, 0.1), ops::brightness(img, 1.3), ops::color(img, 0.7),
          ops::contrast(img, 1.4),     ops::sharpness(img, 0.6),  ops::solarize(img, 12),
          ops::grayscale(img),         ops::enhance_channel(img, ops::Channel::B, -77)};
      for (const auto& out : outs) CHECK(out.same_shape(img));
      CHECK(img == copy);
      CHECK(ops::sharpness(img, 0.6) == ops::sharpness(img, 0.6));
      CHECK(ops::grayscale(ops::grayscale(img)) == ops::grayscale(img));
      CHECK(ops::solarize(ops::solarize(img, 0), 0) == img);
      CHECK(ops::brightness(img, 1.0) == img);
      CHECK(ops::color(img, 1.0) == img);
      CHECK(ops::contrast(img, 1.0) == img);
      CHECK(ops::sharpness(img, 1.0) == img);
      CHECK(ops::enhance_channel(img, ops::Channel::G, 0.0) == img);
    }
  }

  TEST_CASE("kernels agree with the reference implementation") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
      const Image img = random_image(9, 11, rng);
      for (double m : {0.0, 0.6, 0.95, 1.0, 1.4}) {
        CHECK(max_abs_diff(ops::brightness(img, m), ref::brightness(img, m)) <= 1);
        CHECK(max_abs_diff(ops::color(img, m), ref::color(img, m)) <= 1);
        CHECK(max_abs_diff(ops::contrast(img, m), ref::contrast(img, m)) <= 1);
        CHECK(max_abs_diff(ops::sharpness(img, m), ref::sharpness(img, m), 1) <= 1);
      }
      for (double c : {0.0, 0.05, 0.15, 0.3})
        CHECK(max_abs_diff(ops::autocontrast(img, c), ref::autocontrast(img, c)) <= 1);
      for (double t : {0.0, 7.0, 20.0, 128.0})
        CHECK(max_abs_diff(ops::solarize(img, t), ref::solarize(img, t)) <= 1);
      CHECK(max_abs_diff(ops::grayscale(img), ref::grayscale(img)) <= 1);
      for (int ch = 0; ch < 3; ++ch)
        for (double d : {-120.0, -3.5, 60.0})
          CHECK(max_abs_diff(ops::enhance_channel(img, ops::Channel(ch), d),
                             ref::enhance_channel(img, ch, d)) <= 1);
    }
  }
}
