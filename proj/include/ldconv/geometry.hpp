// Copyright (c) 2026 The LDConv Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "ldconv/tensor.hpp"

namespace ldconv {

struct Coord {
  Index row = 0;
  Index col = 0;
  bool operator==(const Coord&) const = default;
};

/// The N integer base coordinates of one kernel, relative to a top-left
/// origin: every coordinate is non-negative and all are distinct.
class KernelGeometry {
 public:
  /// Validates distinctness and the non-negative convention.
  explicit KernelGeometry(std::vector<Coord> coords);

  Index n() const { return static_cast<Index>(coords_.size()); }
  const std::vector<Coord>& coords() const { return coords_; }
  const Coord& operator[](Index i) const { return coords_[static_cast<std::size_t>(i)]; }

  Index max_row() const;
  Index max_col() const;

  bool operator==(const KernelGeometry&) const = default;

 private:
  std::vector<Coord> coords_;
};

/// Initial sampling coordinates for an arbitrary point count n.
///
/// A near-square block of floor(n / b) full rows of width b = round(sqrt(n)),
/// followed by an irregular last row holding the n mod b remaining points,
/// all listed row-major from (0, 0).
KernelGeometry gen_initial_coords(Index n);

/// Parses "row col" integer pairs, one per line; blank lines and lines whose
/// first non-blank character is '#' are skipped.
KernelGeometry load_custom_shape(std::string_view text,
                                 std::optional<Index> n_expected = std::nullopt);
KernelGeometry load_shape_file(const std::filesystem::path& path,
                               std::optional<Index> n_expected = std::nullopt);

/// Stride-scaled output lattice over a padded feature map.
struct BaseGrid {
  Index h_out = 0;
  Index w_out = 0;
  Index stride = 1;

  Coord p0(Index i, Index j) const { return {i * stride, j * stride}; }
};

BaseGrid base_grid(Index h_in, Index w_in, Index stride, Index pad);

}  // namespace ldconv
