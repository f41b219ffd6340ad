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

#include "shiftsearch/image.hpp"

#include <png.h>

#include <stdexcept>
#include <string>

#include "shiftsearch/errors.hpp"

namespace shiftsearch {

Image::Image(std::size_t height, std::size_t width, std::uint8_t fill)
    : height_(height), width_(width), data_(height * width * kChannels, fill) {}

Image::Image(std::size_t height, std::size_t width, std::vector<std::uint8_t> data)
    : height_(height), width_(width), data_(std::move(data)) {
  if (data_.size() != height_ * width_ * kChannels) {
    throw std::invalid_argument("image buffer size " + std::to_string(data_.size()) +
                                " does not match " + std::to_string(height_) + "x" +
                                std::to_string(width_) + "x3");
  }
}

Image read_png(const std::filesystem::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_file(&png, path.c_str()) == 0) {
    throw IoError("cannot read PNG '" + path.string() + "': " + png.message);
  }
  // Gray sources are replicated into RGB; alpha is composited away.
  png.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> data(PNG_IMAGE_SIZE(png));
  if (png_image_finish_read(&png, nullptr, data.data(), 0, nullptr) == 0) {
    std::string message = png.message;
    png_image_free(&png);
    throw IoError("cannot decode PNG '" + path.string() + "': " + message);
  }
  return Image(png.height, png.width, std::move(data));
}

void write_png(const Image& image, const std::filesystem::path& path) {
  if (image.empty()) throw IoError("refusing to write an empty image to '" + path.string() + "'");
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width());
  png.height = static_cast<png_uint_32>(image.height());
  png.format = PNG_FORMAT_RGB;
  if (png_image_write_to_file(&png, path.c_str(), 0, image.data().data(), 0, nullptr) == 0) {
    throw IoError("cannot write PNG '" + path.string() + "': " + png.message);
  }
}

}  // namespace shiftsearch
