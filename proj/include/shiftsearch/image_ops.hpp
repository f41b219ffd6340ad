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

#ifndef SHIFTSEARCH_IMAGE_OPS_HPP
#define SHIFTSEARCH_IMAGE_OPS_HPP

#include <cstdint>

#include "shiftsearch/image.hpp"

// Content-preserving photometric kernels. Every kernel returns a new image with
// the input's dimensions and every channel clamped to [0, 255]; inputs are never
// modified and there is no shared state, so all of them are safe to call from
// concurrent threads.
namespace shiftsearch::ops {

enum class Channel : std::uint8_t { R = 0, G = 1, B = 2 };

/// Rounds half away from zero and saturates to [0, 255]. NaN maps to 0.
inline std::uint8_t clamp_round(double value) noexcept {
  if (!(value >= 0.5)) return 0;
  if (value >= 254.5) return 255;
  const int whole = static_cast<int>(value);
  return static_cast<std::uint8_t>(whole + (value - whole >= 0.5 ? 1 : 0));
}

/// ITU-R 601 luma with integer weights 299/587/114, floored.
std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept;

/// Per-channel histogram stretch after discarding floor(cutoff * pixels) from each tail.
/// `cutoff` is a fraction of the pixel count, valid in [0, 0.3].
Image autocontrast(const Image& img, double cutoff);

/// Blend toward black.
Image brightness(const Image& img, double factor);
/// Blend toward the grayscale image.
Image color(const Image& img, double factor);
/// Blend toward a flat image at the rounded mean luminance.
Image contrast(const Image& img, double factor);
/// Blend toward a 3x3 smoothed image (kernel 1 1 1 / 1 5 1 / 1 1 1, sum 13); the
/// one-pixel border of the smoothed image is the original border. Images narrower or
/// shorter than 3 pixels come back unchanged.
Image sharpness(const Image& img, double factor);

/// Inverts every channel value v >= threshold.
Image solarize(const Image& img, double threshold);
Image grayscale(const Image& img);
/// Adds `delta` to one channel, rounding half away from zero and saturating.
Image enhance_channel(const Image& img, Channel channel, double delta);

/// out = degenerate + factor * (original - degenerate), rounded and clamped per channel.
Image blend(const Image& degenerate, const Image& original, double factor);

}  // namespace shiftsearch::ops

#endif  // SHIFTSEARCH_IMAGE_OPS_HPP
