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

#include "shiftsearch/dataset.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "shiftsearch/errors.hpp"

namespace shiftsearch {

LabeledDataset::LabeledDataset(std::vector<Image> images, std::vector<int> labels,
                               int num_classes)
    : images_(std::move(images)), labels_(std::move(labels)), num_classes_(num_classes) {
  if (images_.size() != labels_.size()) {
    throw ConfigError("dataset has " + std::to_string(images_.size()) + " images but " +
                      std::to_string(labels_.size()) + " labels");
  }
  if (num_classes_ < 1) throw ConfigError("dataset needs at least one class");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 0 || labels_[i] >= num_classes_) {
      throw ConfigError("label " + std::to_string(labels_[i]) + " of sample " + std::to_string(i) +
                        " is outside [0, " + std::to_string(num_classes_) + ")");
    }
    if (!images_[i].same_shape(images_.front()) || images_[i].empty()) {
      throw ConfigError("sample " + std::to_string(i) + " has dimensions " +
                        std::to_string(images_[i].height()) + "x" +
                        std::to_string(images_[i].width()) + ", expected " +
                        std::to_string(images_.front().height()) + "x" +
                        std::to_string(images_.front().width()));
    }
  }
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
  std::vector<Image> images;
  std::vector<int> labels;
  images.reserve(indices.size());
  labels.reserve(indices.size());
  for (std::size_t i : indices) {
    images.push_back(images_.at(i));
    labels.push_back(labels_.at(i));
  }
  return LabeledDataset(std::move(images), std::move(labels), num_classes_);
}

namespace {

std::vector<std::size_t> choose_indices(std::size_t population, std::size_t count, Rng& rng) {
  std::vector<std::size_t> idx(population);
  std::iota(idx.begin(), idx.end(), 0);
  if (count >= population) return idx;
  // Partial Fisher-Yates: the first `count` slots become a uniform subset.
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, population - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
  return s.substr(b);
}

}  // namespace

LabeledDataset sample_subset(const LabeledDataset& data, std::size_t count, Rng& rng) {
  const auto idx = choose_indices(data.size(), count, rng);
  return data.subset(idx);
}

LabeledDataset load_dataset(const std::filesystem::path& dir, std::optional<std::size_t> limit,
                            Rng& rng, std::optional<int> num_classes) {
  const auto manifest = dir / "manifest.csv";
  std::ifstream in(manifest);
  if (!in) throw IoError("missing manifest '" + manifest.string() + "'");

  std::string line;
  if (!std::getline(in, line) || trim(line) != "filename,label") {
    throw IoError("'" + manifest.string() + "' must start with the header 'filename,label'");
  }
  std::vector<std::string> files;
  std::vector<int> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) {
      throw IoError(manifest.string() + ":" + std::to_string(line_no) + ": expected filename,label");
    }
    const std::string label_text = trim(line.substr(comma + 1));
    std::size_t consumed = 0;
    int label = 0;
    try {
      label = std::stoi(label_text, &consumed);
    } catch (const std::exception&) {
      consumed = 0;
    }
    if (consumed == 0 || consumed != label_text.size()) {
      throw IoError(manifest.string() + ":" + std::to_string(line_no) + ": bad label '" +
                    label_text + "'");
    }
    files.push_back(trim(line.substr(0, comma)));
    labels.push_back(label);
  }

  int classes = num_classes.value_or(0);
  if (!num_classes) {
    for (int l : labels) classes = std::max(classes, l + 1);
    classes = std::max(classes, 1);
  }

  std::vector<std::size_t> keep(files.size());
  std::iota(keep.begin(), keep.end(), 0);
  if (limit) keep = choose_indices(files.size(), *limit, rng);

  std::vector<Image> images;
  std::vector<int> kept_labels;
  images.reserve(keep.size());
  for (std::size_t i : keep) {
    images.push_back(read_png(dir / files[i]));
    kept_labels.push_back(labels[i]);
  }
  return LabeledDataset(std::move(images), std::move(kept_labels), classes);
}

void save_dataset(const LabeledDataset& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "manifest.csv");
  if (!out) throw IoError("cannot write manifest in '" + dir.string() + "'");
  out << "filename,label\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "%06zu.png", i);
    write_png(data.image(i), dir / name);
    out << name << ',' << data.label(i) << '\n';
  }
}

namespace {

using Bitmap = std::array<const char*, 7>;

constexpr std::array<Bitmap, 10> kDigitFont = {{
    {"01110", "10001", "10011", "10101", "11001", "10001", "01110"},
    {"00100", "01100", "00100", "00100", "00100", "00100", "01110"},
    {"01110", "10001", "00001", "00010", "00100", "01000", "11111"},
    {"11111", "00010", "00100", "00010", "00001", "10001", "01110"},
    {"00010", "00110", "01010", "10010", "11111", "00010", "00010"},
    {"11111", "10000", "11110", "00001", "00001", "10001", "01110"},
    {"00110", "01000", "10000", "11110", "10001", "10001", "01110"},
    {"11111", "00001", "00010", "00100", "01000", "01000", "01000"},
    {"01110", "10001", "10001", "01110", "10001", "10001", "01110"},
    {"01110", "10001", "10001", "01111", "00001", "00010", "01100"},
}};

using Cells = std::array<bool, 35>;

Cells cells_of(const Bitmap& b) {
  Cells c{};
  for (int r = 0; r < 7; ++r)
    for (int k = 0; k < 5; ++k) c[r * 5 + k] = b[r][k] == '1';
  return c;
}

int cell_distance(const Cells& a, const Cells& b) {
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

// Digits first; further classes get procedurally generated bitmaps kept at least
// six cells away from every earlier glyph.
std::vector<Cells> glyph_cells(int num_classes) {
  std::vector<Cells> glyphs;
  for (int c = 0; c < num_classes && c < 10; ++c) glyphs.push_back(cells_of(kDigitFont[c]));
  std::mt19937 gen(0x9e3779b9u);
  std::bernoulli_distribution on(0.45);
  while (static_cast<int>(glyphs.size()) < num_classes) {
    Cells candidate{};
    for (auto& cell : candidate) cell = on(gen);
    bool ok = true;
    for (const auto& g : glyphs) ok = ok && cell_distance(g, candidate) >= 6;
    if (ok) glyphs.push_back(candidate);
  }
  return glyphs;
}

std::size_t cell_size(std::size_t side) { return std::max<std::size_t>(1, (side - 4) / 7); }

Image render(const Cells& cells, std::size_t side, long dx, long dy, std::uint8_t intensity) {
  Image img(side, side, 0);
  const std::size_t cs = cell_size(side);
  const long gw = static_cast<long>(5 * cs);
  const long gh = static_cast<long>(7 * cs);
  const long x0 = (static_cast<long>(side) - gw) / 2 + dx;
  const long y0 = (static_cast<long>(side) - gh) / 2 + dy;
  for (long y = 0; y < gh; ++y) {
    for (long x = 0; x < gw; ++x) {
      if (!cells[(y / cs) * 5 + x / cs]) continue;
      const long r = y0 + y;
      const long c = x0 + x;
      if (r < 0 || c < 0 || r >= static_cast<long>(side) || c >= static_cast<long>(side)) continue;
      for (std::size_t ch = 0; ch < Image::kChannels; ++ch) img.at(r, c, ch) = intensity;
    }
  }
  return img;
}

// 3x3 box blur with zero padding; softens the glyph edges.
Image soften(const Image& img) {
  Image out(img.height(), img.width());
  const long h = static_cast<long>(img.height());
  const long w = static_cast<long>(img.width());
  for (long r = 0; r < h; ++r) {
    for (long c = 0; c < w; ++c) {
      unsigned acc = 0;
      for (long dr = -1; dr <= 1; ++dr)
        for (long dc = -1; dc <= 1; ++dc) {
          const long rr = r + dr;
          const long cc = c + dc;
          if (rr >= 0 && cc >= 0 && rr < h && cc < w) acc += img.at(rr, cc, 0);
        }
      const auto v = static_cast<std::uint8_t>((acc + 4) / 9);
      for (std::size_t ch = 0; ch < Image::kChannels; ++ch) out.at(r, c, ch) = v;
    }
  }
  return out;
}

}  // namespace

std::vector<Image> glyph_prototypes(int num_classes, std::size_t side) {
  if (num_classes < 2) throw ConfigError("synthetic datasets need at least two classes");
  if (side < 7) throw ConfigError("synthetic images need side >= 7");
  std::vector<Image> out;
  for (const auto& cells : glyph_cells(num_classes)) out.push_back(render(cells, side, 0, 0, 255));
  return out;
}

LabeledDataset make_synthetic_dataset(int num_classes, std::size_t samples_per_class,
                                      std::size_t side, Rng& rng) {
  if (num_classes < 2) throw ConfigError("synthetic datasets need at least two classes");
  if (side < 7) throw ConfigError("synthetic images need side >= 7");
  const auto glyphs = glyph_cells(num_classes);
  const std::size_t cs = cell_size(side);
  const long slack_x = (static_cast<long>(side) - static_cast<long>(5 * cs)) / 2;
  const long slack_y = (static_cast<long>(side) - static_cast<long>(7 * cs)) / 2;
  const long jx = std::min<long>(2, slack_x);
  const long jy = std::min<long>(2, slack_y);
  std::uniform_int_distribution<long> shift_x(-jx, jx);
  std::uniform_int_distribution<long> shift_y(-jy, jy);
  std::uniform_int_distribution<int> level(160, 255);

  std::vector<Image> images;
  std::vector<int> labels;
  const std::size_t total = samples_per_class * static_cast<std::size_t>(num_classes);
  images.reserve(total);
  labels.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    const int label = static_cast<int>(i % static_cast<std::size_t>(num_classes));
    const long dx = shift_x(rng);
    const long dy = shift_y(rng);
    const auto intensity = static_cast<std::uint8_t>(level(rng));
    images.push_back(soften(render(glyphs[label], side, dx, dy, intensity)));
    labels.push_back(label);
  }
  return LabeledDataset(std::move(images), std::move(labels), num_classes);
}

}  // namespace shiftsearch
