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

#include "shiftsearch/batch.hpp"

#include <stdexcept>

namespace shiftsearch {

std::vector<Image> apply_tuple_batch(const Tuple& tuple, std::span<const Image> images,
                                     Execution exec) {
  std::vector<Image> out(images.size());
  const auto n = static_cast<std::ptrdiff_t>(images.size());
  if (exec == Execution::serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = tuple.apply(images[i]);
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = tuple.apply(images[i]);
  }
  return out;
}

std::vector<Image> apply_tuples_pairwise(std::span<const Tuple> tuples,
                                         std::span<const Image> images, Execution exec) {
  if (tuples.size() != images.size()) {
    throw std::invalid_argument("apply_tuples_pairwise: length mismatch");
  }
  std::vector<Image> out(images.size());
  const auto n = static_cast<std::ptrdiff_t>(images.size());
  if (exec == Execution::serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = tuples[i].apply(images[i]);
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = tuples[i].apply(images[i]);
  }
  return out;
}

}  // namespace shiftsearch
