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

#ifndef SHIFTSEARCH_BATCH_HPP
#define SHIFTSEARCH_BATCH_HPP

#include <span>
#include <vector>

#include "shiftsearch/image.hpp"
#include "shiftsearch/transform_space.hpp"

namespace shiftsearch {

/// Selects between the serial reference loop and the OpenMP loop for a data-parallel kernel.
/// Both paths run the same per-item code, so their results are bit-identical.
enum class Execution { serial, parallel };

/// Applies one tuple to every image.
std::vector<Image> apply_tuple_batch(const Tuple& tuple, std::span<const Image> images,
                                     Execution exec);

/// Applies tuples[i] to images[i].
std::vector<Image> apply_tuples_pairwise(std::span<const Tuple> tuples,
                                         std::span<const Image> images, Execution exec);

}  // namespace shiftsearch

#endif  // SHIFTSEARCH_BATCH_HPP
