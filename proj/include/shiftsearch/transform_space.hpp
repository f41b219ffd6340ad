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

#ifndef SHIFTSEARCH_TRANSFORM_SPACE_HPP
#define SHIFTSEARCH_TRANSFORM_SPACE_HPP

#include <array>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "shiftsearch/image.hpp"

namespace shiftsearch {

/// Seeded stream used everywhere randomness is consumed.
using Rng = std::mt19937_64;

enum class TransformKind : std::uint8_t {
  Autocontrast,
  Brightness,
  Color,
  Contrast,
  Sharpness,
  Solarize,
  Grayscale,
  EnhanceR,
  EnhanceG,
  EnhanceB,
};

inline constexpr std::array<TransformKind, 10> kAllTransformKinds = {
    TransformKind::Autocontrast, TransformKind::Brightness, TransformKind::Color,
    TransformKind::Contrast,     TransformKind::Sharpness,  TransformKind::Solarize,
    TransformKind::Grayscale,    TransformKind::EnhanceR,   TransformKind::EnhanceG,
    TransformKind::EnhanceB,
};

std::string_view kind_name(TransformKind kind) noexcept;
std::optional<TransformKind> parse_kind(std::string_view name) noexcept;

/// Applies one kernel at a continuous magnitude (ignored for grayscale).
Image apply_transform(TransformKind kind, double magnitude, const Image& img);

/// One atom of the transformation set: a kind plus an index into its magnitude grid.
struct TransformInstance {
  TransformKind kind = TransformKind::Brightness;
  std::size_t level = 0;
  double magnitude = 1.0;

  friend bool operator==(const TransformInstance& a, const TransformInstance& b) noexcept {
    return a.kind == b.kind && a.level == b.level;
  }
};

/// Ordered fixed-length sequence of atoms applied left to right. The default-constructed
/// tuple is the identity sentinel used to seed augmentation sets; it is not a member of T_N.
class Tuple {
 public:
  Tuple() = default;
  explicit Tuple(std::vector<TransformInstance> items) : items_(std::move(items)) {}

  static Tuple identity() { return Tuple(); }

  bool is_identity() const noexcept { return items_.empty(); }
  std::size_t size() const noexcept { return items_.size(); }
  const std::vector<TransformInstance>& items() const noexcept { return items_; }
  std::vector<TransformInstance>& items() noexcept { return items_; }
  const TransformInstance& operator[](std::size_t i) const { return items_[i]; }
  TransformInstance& operator[](std::size_t i) { return items_[i]; }

  /// `kind@level` items joined by '+', or "identity".
  std::string to_string() const;

  Image apply(const Image& img) const;

  friend bool operator==(const Tuple&, const Tuple&) = default;

 private:
  std::vector<TransformInstance> items_;
};

inline constexpr std::string_view kIdentityText = "identity";

/// A transformation kind with its linearly spaced, endpoint-inclusive magnitude grid.
struct TransformEntry {
  TransformKind kind;
  double min = 0.0;
  double max = 0.0;
  std::size_t levels = 1;

  double magnitude(std::size_t level) const;
};

class TransformSet {
 public:
  /// Validates: no repeated kind, levels >= 1, magnitudes inside each kernel's domain,
  /// at least one entry.
  explicit TransformSet(std::vector<TransformEntry> entries, std::string name = "custom");

  /// One of "mnist", "cifar", "camvid", "faces"; throws ConfigError otherwise.
  static TransformSet preset(std::string_view name);
  static const std::vector<std::string>& preset_names();
  /// {"name": ..., "transforms": [{"kind": "brightness", "min": 0.6, "max": 1.4, "levels": 20}, ...]}
  static TransformSet from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  const std::string& name() const noexcept { return name_; }
  const std::vector<TransformEntry>& entries() const noexcept { return entries_; }
  /// Sum of grid sizes over all kinds.
  std::size_t atom_count() const noexcept { return atom_count_; }
  /// Atom by flat index in [0, atom_count()), entries in declaration order.
  TransformInstance atom(std::size_t index) const;
  const TransformEntry* find(TransformKind kind) const noexcept;
  TransformInstance instance(TransformKind kind, std::size_t level) const;

  /// Parses the text format. "identity" yields the sentinel; throws ConfigError naming the
  /// offending token for unknown kinds, malformed levels, or levels outside the grid.
  Tuple parse_tuple(std::string_view text) const;
  /// True when every item is an atom of this set (the identity sentinel is not).
  bool contains(const Tuple& tuple) const noexcept;

 private:
  std::vector<TransformEntry> entries_;
  std::vector<std::size_t> offsets_;
  std::size_t atom_count_ = 0;
  std::string name_;
};

/// (atom_count)^n, exact.
boost::multiprecision::cpp_int search_space_size(const TransformSet& set, std::size_t n);

/// Uniform draw from T_N: each slot is an independent uniform atom.
Tuple sample_tuple(const TransformSet& set, std::size_t n, Rng& rng);
TransformInstance sample_atom(const TransformSet& set, Rng& rng);

/// Every tuple of T_N in lexicographic atom order; intended for small spaces only.
std::vector<Tuple> enumerate_tuples(const TransformSet& set, std::size_t n);

}  // namespace shiftsearch

#endif  // SHIFTSEARCH_TRANSFORM_SPACE_HPP
