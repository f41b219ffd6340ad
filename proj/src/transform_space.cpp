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

#include "shiftsearch/transform_space.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "shiftsearch/errors.hpp"
#include "shiftsearch/image_ops.hpp"

namespace shiftsearch {

namespace {

constexpr std::array<std::string_view, 10> kKindNames = {
    "autocontrast", "brightness", "color",    "contrast", "sharpness",
    "solarize",     "grayscale",  "enhance_r", "enhance_g", "enhance_b",
};

// Domain each kernel accepts for its magnitude.
std::pair<double, double> magnitude_domain(TransformKind kind) {
  switch (kind) {
    case TransformKind::Autocontrast:
      return {0.0, 0.3};
    case TransformKind::Brightness:
    case TransformKind::Color:
    case TransformKind::Contrast:
    case TransformKind::Sharpness:
      return {0.0, std::numeric_limits<double>::infinity()};
    case TransformKind::Solarize:
      return {0.0, 255.0};
    case TransformKind::Grayscale:
      return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    case TransformKind::EnhanceR:
    case TransformKind::EnhanceG:
    case TransformKind::EnhanceB:
      return {-255.0, 255.0};
  }
  return {0.0, 0.0};
}

}  // namespace

std::string_view kind_name(TransformKind kind) noexcept {
  return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<TransformKind> parse_kind(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<TransformKind>(i);
  }
  return std::nullopt;
}

Image apply_transform(TransformKind kind, double magnitude, const Image& img) {
  switch (kind) {
    case TransformKind::Autocontrast:
      return ops::autocontrast(img, magnitude);
    case TransformKind::Brightness:
      return ops::brightness(img, magnitude);
    case TransformKind::Color:
      return ops::color(img, magnitude);
    case TransformKind::Contrast:
      return ops::contrast(img, magnitude);
    case TransformKind::Sharpness:
      return ops::sharpness(img, magnitude);
    case TransformKind::Solarize:
      return ops::solarize(img, magnitude);
    case TransformKind::Grayscale:
      return ops::grayscale(img);
    case TransformKind::EnhanceR:
      return ops::enhance_channel(img, ops::Channel::R, magnitude);
    case TransformKind::EnhanceG:
      return ops::enhance_channel(img, ops::Channel::G, magnitude);
    case TransformKind::EnhanceB:
      return ops::enhance_channel(img, ops::Channel::B, magnitude);
  }
  return img;
}

std::string Tuple::to_string() const {
  if (items_.empty()) return std::string(kIdentityText);
  std::string out;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (i > 0) out += '+';
    out += kind_name(items_[i].kind);
    out += '@';
    out += std::to_string(items_[i].level);
  }
  return out;
}

Image Tuple::apply(const Image& img) const {
  Image current = img;
  for (const auto& item : items_) current = apply_transform(item.kind, item.magnitude, current);
  return current;
}

double TransformEntry::magnitude(std::size_t level) const {
  if (levels <= 1) return min;
  return min + (max - min) * static_cast<double>(level) / static_cast<double>(levels - 1);
}

TransformSet::TransformSet(std::vector<TransformEntry> entries, std::string name)
    : entries_(std::move(entries)), name_(std::move(name)) {
  if (entries_.empty()) throw ConfigError("transformation set '" + name_ + "' has no entries");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    for (std::size_t j = 0; j < i; ++j) {
      if (entries_[j].kind == e.kind) {
        throw ConfigError("transformation set '" + name_ + "' lists '" +
                          std::string(kind_name(e.kind)) + "' twice");
      }
    }
    if (e.levels == 0) {
      throw ConfigError("'" + std::string(kind_name(e.kind)) + "' needs at least one level");
    }
    if (e.kind == TransformKind::Grayscale && e.levels != 1) {
      throw ConfigError("grayscale has exactly one level");
    }
    const auto [lo, hi] = magnitude_domain(e.kind);
    if (!(e.min <= e.max) || e.min < lo || e.max > hi) {
      throw ConfigError("magnitude range [" + std::to_string(e.min) + ", " +
                        std::to_string(e.max) + "] is invalid for '" +
                        std::string(kind_name(e.kind)) + "'");
    }
    offsets_.push_back(atom_count_);
    atom_count_ += e.levels;
  }
}

const std::vector<std::string>& TransformSet::preset_names() {
  static const std::vector<std::string> names = {"mnist", "cifar", "camvid", "faces"};
  return names;
}

TransformSet TransformSet::preset(std::string_view name) {
  using K = TransformKind;
  const TransformEntry autocontrast{K::Autocontrast, 0.0, 0.3, 20};
  const TransformEntry color{K::Color, 0.6, 1.4, 20};
  const TransformEntry contrast{K::Contrast, 0.6, 1.4, 20};
  const TransformEntry sharpness{K::Sharpness, 0.6, 1.4, 20};
  const TransformEntry grayscale{K::Grayscale, 0.0, 0.0, 1};
  auto channels = [](double span) {
    return std::vector<TransformEntry>{{K::EnhanceR, -span, span, 30},
                                       {K::EnhanceG, -span, span, 30},
                                       {K::EnhanceB, -span, span, 30}};
  };
  std::vector<TransformEntry> entries;
  if (name == "mnist") {
    entries = {autocontrast, {K::Brightness, 0.6, 1.4, 20}, color, contrast, sharpness,
               {K::Solarize, 0.0, 20.0, 20}, grayscale};
    for (const auto& e : channels(120.0)) entries.push_back(e);
  } else if (name == "cifar") {
    entries = {autocontrast, {K::Brightness, 0.8, 1.2, 20}, color, contrast, sharpness};
    for (const auto& e : channels(30.0)) entries.push_back(e);
  } else if (name == "camvid") {
    entries = {autocontrast, {K::Brightness, 0.8, 1.2, 20}, color, contrast, sharpness};
    for (const auto& e : channels(120.0)) entries.push_back(e);
  } else if (name == "faces") {
    entries = {autocontrast, {K::Brightness, 0.8, 1.2, 20}, color, contrast, sharpness, grayscale};
    for (const auto& e : channels(120.0)) entries.push_back(e);
  } else {
    std::string valid;
    for (const auto& n : preset_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + std::string(name) + "' (valid presets: " + valid + ")");
  }
  return TransformSet(std::move(entries), std::string(name));
}

TransformSet TransformSet::from_json(const nlohmann::json& doc) {
  try {
    std::vector<TransformEntry> entries;
    for (const auto& item : doc.at("transforms")) {
      const auto kind_text = item.at("kind").get<std::string>();
      const auto kind = parse_kind(kind_text);
      if (!kind) throw ConfigError("unknown transformation kind '" + kind_text + "'");
      TransformEntry e{*kind, 0.0, 0.0, 1};
      if (*kind != TransformKind::Grayscale) {
        e.min = item.at("min").get<double>();
        e.max = item.at("max").get<double>();
      }
      e.levels = item.value("levels", std::size_t{1});
      entries.push_back(e);
    }
    return TransformSet(std::move(entries), doc.value("name", std::string("custom")));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed transformation set document: ") + e.what());
  }
}

nlohmann::json TransformSet::to_json() const {
  nlohmann::json transforms = nlohmann::json::array();
  for (const auto& e : entries_) {
    transforms.push_back(
        {{"kind", kind_name(e.kind)}, {"min", e.min}, {"max", e.max}, {"levels", e.levels}});
  }
  return {{"name", name_}, {"transforms", transforms}};
}

TransformInstance TransformSet::atom(std::size_t index) const {
  if (index >= atom_count_) throw std::out_of_range("atom index out of range");
  std::size_t e = entries_.size() - 1;
  while (offsets_[e] > index) --e;
  const std::size_t level = index - offsets_[e];
  return {entries_[e].kind, level, entries_[e].magnitude(level)};
}

const TransformEntry* TransformSet::find(TransformKind kind) const noexcept {
  for (const auto& e : entries_) {
    if (e.kind == kind) return &e;
  }
  return nullptr;
}

TransformInstance TransformSet::instance(TransformKind kind, std::size_t level) const {
  const auto* e = find(kind);
  if (e == nullptr) {
    throw ConfigError("'" + std::string(kind_name(kind)) + "' is not in set '" + name_ + "'");
  }
  if (level >= e->levels) {
    throw ConfigError("level " + std::to_string(level) + " out of range for '" +
                      std::string(kind_name(kind)) + "' (" + std::to_string(e->levels) +
                      " levels)");
  }
  return {kind, level, e->magnitude(level)};
}

Tuple TransformSet::parse_tuple(std::string_view text) const {
  if (text == kIdentityText) return Tuple::identity();
  if (text.empty()) throw ConfigError("empty tuple string");
  std::vector<TransformInstance> items;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('+', pos), text.size());
    const std::string_view token = text.substr(pos, end - pos);
    const std::size_t at = token.find('@');
    if (at == std::string_view::npos) {
      throw ConfigError("malformed tuple token '" + std::string(token) + "' (expected kind@level)");
    }
    const auto kind = parse_kind(token.substr(0, at));
    if (!kind) {
      throw ConfigError("unknown transformation in tuple token '" + std::string(token) + "'");
    }
    const std::string_view level_text = token.substr(at + 1);
    std::size_t level = 0;
    const auto [ptr, ec] =
        std::from_chars(level_text.data(), level_text.data() + level_text.size(), level);
    if (ec != std::errc{} || ptr != level_text.data() + level_text.size() || level_text.empty()) {
      throw ConfigError("malformed level in tuple token '" + std::string(token) + "'");
    }
    try {
      items.push_back(instance(*kind, level));
    } catch (const ConfigError& e) {
      throw ConfigError("bad tuple token '" + std::string(token) + "': " + e.what());
    }
    pos = end + 1;
  }
  return Tuple(std::move(items));
}

bool TransformSet::contains(const Tuple& tuple) const noexcept {
  if (tuple.is_identity()) return false;
  for (const auto& item : tuple.items()) {
    const auto* e = find(item.kind);
    if (e == nullptr || item.level >= e->levels) return false;
  }
  return true;
}

boost::multiprecision::cpp_int search_space_size(const TransformSet& set, std::size_t n) {
  if (n == 0) throw ConfigError("tuple length must be at least 1");
  return boost::multiprecision::pow(boost::multiprecision::cpp_int(set.atom_count()),
                                    static_cast<unsigned>(n));
}

TransformInstance sample_atom(const TransformSet& set, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, set.atom_count() - 1);
  return set.atom(pick(rng));
}

Tuple sample_tuple(const TransformSet& set, std::size_t n, Rng& rng) {
  if (n == 0) throw ConfigError("tuple length must be at least 1");
  std::vector<TransformInstance> items;
  items.reserve(n);
  for (std::size_t i = 0; i < n; ++i) items.push_back(sample_atom(set, rng));
  return Tuple(std::move(items));
}

std::vector<Tuple> enumerate_tuples(const TransformSet& set, std::size_t n) {
  if (n == 0) throw ConfigError("tuple length must be at least 1");
  const std::size_t atoms = set.atom_count();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > 10'000'000 / atoms) throw ConfigError("search space too large to enumerate");
    total *= atoms;
  }
  std::vector<Tuple> out;
  out.reserve(total);
  std::vector<std::size_t> digits(n, 0);
  for (std::size_t k = 0; k < total; ++k) {
    std::vector<TransformInstance> items;
    items.reserve(n);
    for (std::size_t d : digits) items.push_back(set.atom(d));
    out.emplace_back(std::move(items));
    for (std::size_t i = n; i-- > 0;) {
      if (++digits[i] < atoms) break;
      digits[i] = 0;
    }
  }
  return out;
}

}  // namespace shiftsearch
