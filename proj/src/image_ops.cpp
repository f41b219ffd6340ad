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

#include "shiftsearch/image_ops.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace shiftsearch::ops {

namespace {

using Lut = std::array<std::uint8_t, 256>;

template <typename F>
Lut make_lut(F f) {
  Lut lut;
  for (int v = 0; v < 256; ++v) lut[v] = f(v);
  return lut;
}

Image map_values(const Image& img, const Lut& lut) {
  Image out(img.height(), img.width());
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = lut[src[i]];
  return out;
}

// clamp_round() without branches so the blend loop vectorizes; equal for all finite input.
inline std::uint8_t round_saturate(double v) noexcept {
  v = std::min(std::max(v, 0.0), 255.0);
  const int whole = static_cast<int>(v);
  return static_cast<std::uint8_t>(whole + (v - whole >= 0.5));
}

}  // namespace

std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
  return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b) / 1000u);
}

Image blend(const Image& degenerate, const Image& original, double factor) {
  if (!degenerate.same_shape(original)) throw std::invalid_argument("blend: shape mismatch");
  Image out(original.height(), original.width());
  auto d = degenerate.data();
  auto o = original.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double lo = d[i];
    dst[i] = round_saturate(lo + factor * (static_cast<double>(o[i]) - lo));
  }
  return out;
}

Image autocontrast(const Image& img, double cutoff) {
  if (!(cutoff >= 0.0 && cutoff <= 0.3)) {
    throw std::invalid_argument("autocontrast: cutoff must lie in [0, 0.3]");
  }
  Image out = img;
  const std::size_t pixels = img.pixel_count();
  if (pixels == 0) return out;
  const auto cut_total = static_cast<std::size_t>(std::floor(cutoff * static_cast<double>(pixels)));
  auto src = img.data();
  auto dst = out.data();

  constexpr std::size_t C = Image::kChannels;
  std::array<std::array<std::size_t, 256>, C> hist{};
  for (std::size_t i = 0; i < src.size(); i += C) {
    ++hist[0][src[i]];
    ++hist[1][src[i + 1]];
    ++hist[2][src[i + 2]];
  }

  std::array<Lut, C> lut;
  bool changed = false;
  for (std::size_t c = 0; c < C; ++c) {
    auto& h = hist[c];
    std::size_t cut = cut_total;
    for (std::size_t v = 0; v < 256 && cut > 0; ++v) {
      const std::size_t take = std::min(cut, h[v]);
      h[v] -= take;
      cut -= take;
    }
    cut = cut_total;
    for (std::size_t v = 256; v-- > 0 && cut > 0;) {
      const std::size_t take = std::min(cut, h[v]);
      h[v] -= take;
      cut -= take;
    }

    int lo = 0;
    while (lo < 256 && h[lo] == 0) ++lo;
    int hi = 255;
    while (hi >= 0 && h[hi] == 0) --hi;
    if (hi <= lo) {
      lut[c] = make_lut([](int v) { return static_cast<std::uint8_t>(v); });
      continue;
    }
    const double span = hi - lo;
    lut[c] = make_lut([&](int v) { return clamp_round((v - lo) * 255.0 / span); });
    changed = true;
  }
  if (!changed) return out;
  for (std::size_t i = 0; i < src.size(); i += C) {
    dst[i] = lut[0][src[i]];
    dst[i + 1] = lut[1][src[i + 1]];
    dst[i + 2] = lut[2][src[i + 2]];
  }
  return out;
}

Image brightness(const Image& img, double factor) {
  return map_values(img, make_lut([&](int v) { return clamp_round(factor * v); }));
}

Image grayscale(const Image& img) {
  Image out(img.height(), img.width());
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); i += Image::kChannels) {
    const std::uint8_t l = luminance(src[i], src[i + 1], src[i + 2]);
    dst[i] = dst[i + 1] = dst[i + 2] = l;
  }
  return out;
}

Image color(const Image& img, double factor) { return blend(grayscale(img), img, factor); }

Image contrast(const Image& img, double factor) {
  const std::size_t pixels = img.pixel_count();
  if (pixels == 0) return img;
  auto src = img.data();
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < src.size(); i += Image::kChannels) {
    sum += luminance(src[i], src[i + 1], src[i + 2]);
  }
  const double mean =
      clamp_round(static_cast<double>(sum) / static_cast<double>(pixels));
  // Same arithmetic as blend() against a flat degenerate image.
  return map_values(img, make_lut([&](int v) { return clamp_round(mean + factor * (v - mean)); }));
}

Image sharpness(const Image& img, double factor) {
  const std::size_t h = img.height();
  const std::size_t w = img.width();
  if (h < 3 || w < 3) return img;

  static const auto divide13 = [] {
    std::array<std::uint8_t, 13 * 255 + 1> t{};
    for (std::size_t a = 0; a < t.size(); ++a) t[a] = clamp_round(static_cast<double>(a) / 13.0);
    return t;
  }();

  Image smooth = img;
  constexpr std::size_t C = Image::kChannels;
  auto src = img.data();
  auto dst = smooth.data();
  for (std::size_t r = 1; r + 1 < h; ++r) {
    for (std::size_t col = 1; col + 1 < w; ++col) {
      for (std::size_t c = 0; c < C; ++c) {
        unsigned acc = 0;
        for (std::size_t dr = 0; dr < 3; ++dr) {
          const std::size_t row_base = (r + dr - 1) * w;
          for (std::size_t dc = 0; dc < 3; ++dc) {
            acc += src[(row_base + col + dc - 1) * C + c];
          }
        }
        // Center weight is 5: it was counted once above.
        acc += 4u * src[(r * w + col) * C + c];
        dst[(r * w + col) * C + c] = divide13[acc];
      }
    }
  }
  return blend(smooth, img, factor);
}

Image solarize(const Image& img, double threshold) {
  Image out = img;
  for (auto& v : out.data()) {
    if (static_cast<double>(v) >= threshold) v = static_cast<std::uint8_t>(255 - v);
  }
  return out;
}

Image enhance_channel(const Image& img, Channel channel, double delta) {
  const Lut lut = make_lut([&](int v) { return clamp_round(v + delta); });
  Image out = img;
  auto dst = out.data();
  for (std::size_t i = static_cast<std::size_t>(channel); i < dst.size(); i += Image::kChannels) {
    dst[i] = lut[dst[i]];
  }
  return out;
}

}  // namespace shiftsearch::ops
