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

#ifndef SHIFTSEARCH_DATASET_HPP
#define SHIFTSEARCH_DATASET_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "shiftsearch/image.hpp"
#include "shiftsearch/transform_space.hpp"

namespace shiftsearch {

/// Images with class labels in [0, num_classes); all images share one shape.
class LabeledDataset {
 public:
  LabeledDataset() = default;
  /// Validates label range and uniform image shape; throws ConfigError.
  LabeledDataset(std::vector<Image> images, std::vector<int> labels, int num_classes);

  std::size_t size() const noexcept { return images_.size(); }
  bool empty() const noexcept { return images_.empty(); }
  int num_classes() const noexcept { return num_classes_; }
  std::size_t height() const noexcept { return images_.empty() ? 0 : images_.front().height(); }
  std::size_t width() const noexcept { return images_.empty() ? 0 : images_.front().width(); }

  std::span<const Image> images() const noexcept { return images_; }
  std::span<const int> labels() const noexcept { return labels_; }
  const Image& image(std::size_t i) const { return images_[i]; }
  int label(std::size_t i) const { return labels_[i]; }

  LabeledDataset subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;

 private:
  std::vector<Image> images_;
  std::vector<int> labels_;
  int num_classes_ = 0;
};

/// Uniform subsample of min(count, size) samples without replacement, in ascending index order.
LabeledDataset sample_subset(const LabeledDataset& data, std::size_t count, Rng& rng);

/// Loads `dir/manifest.csv` (header `filename,label`) and the PNGs it lists. With a limit,
/// keeps a uniform subsample drawn from `rng`. `num_classes` defaults to max label + 1.
LabeledDataset load_dataset(const std::filesystem::path& dir, std::optional<std::size_t> limit,
                            Rng& rng, std::optional<int> num_classes = std::nullopt);

/// Writes `dir/manifest.csv` plus `NNNNNN.png` files.
void save_dataset(const LabeledDataset& data, const std::filesystem::path& dir);

/// Noise-free white-on-black glyph for each class, rendered at `side` x `side`.
std::vector<Image> glyph_prototypes(int num_classes, std::size_t side);

/// Class-balanced glyph dataset with random translation, stroke intensity, and soft edges.
/// Samples are interleaved by class (label i % num_classes).
LabeledDataset make_synthetic_dataset(int num_classes, std::size_t samples_per_class,
                                      std::size_t side, Rng& rng);

}  // namespace shiftsearch

#endif  // SHIFTSEARCH_DATASET_HPP
