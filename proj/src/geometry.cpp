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

#include "ldconv/geometry.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "ldconv/errors.hpp"

namespace ldconv {

KernelGeometry::KernelGeometry(std::vector<Coord> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw InvalidArgument("kernel geometry needs at least one point");
  std::set<std::pair<Index, Index>> seen;
  for (const auto& c : coords_) {
    if (c.row < 0 || c.col < 0) {
      throw OutOfConvention("negative coordinate (" + std::to_string(c.row) + ", " +
                            std::to_string(c.col) + ") violates the top-left origin");
    }
    if (!seen.emplace(c.row, c.col).second) {
      throw DuplicateCoordinate("duplicate coordinate (" + std::to_string(c.row) + ", " +
                                std::to_string(c.col) + ")");
    }
  }
}

Index KernelGeometry::max_row() const {
  Index m = 0;
  for (const auto& c : coords_) m = std::max(m, c.row);
  return m;
}

Index KernelGeometry::max_col() const {
  Index m = 0;
  for (const auto& c : coords_) m = std::max(m, c.col);
  return m;
}

KernelGeometry gen_initial_coords(Index n) {
  if (n < 1) throw InvalidArgument("kernel size n must be >= 1, got " + std::to_string(n));
  // std::lround rounds half away from zero.
  const Index base = std::lround(std::sqrt(static_cast<double>(n)));
  const Index full_rows = n / base;
  const Index remainder = n % base;

  std::vector<Coord> coords;
  coords.reserve(static_cast<std::size_t>(n));
  for (Index r = 0; r < full_rows; ++r)
    for (Index c = 0; c < base; ++c) coords.push_back({r, c});
  for (Index c = 0; c < remainder; ++c) coords.push_back({full_rows, c});
  return KernelGeometry(std::move(coords));
}

KernelGeometry load_custom_shape(std::string_view text, std::optional<Index> n_expected) {
  std::vector<Coord> coords;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    long long row = 0, col = 0;
    std::string extra;
    if (!(fields >> row >> col) || (fields >> extra)) {
      throw FormatError("shape line " + std::to_string(line_no) +
                        ": expected two integers, got '" + line + "'");
    }
    coords.push_back({row, col});
  }
  if (n_expected && static_cast<Index>(coords.size()) != *n_expected) {
    throw ShapeCountError("shape has " + std::to_string(coords.size()) +
                          " points, expected " + std::to_string(*n_expected));
  }
  if (coords.empty()) throw FormatError("shape file contains no coordinates");
  return KernelGeometry(std::move(coords));
}

KernelGeometry load_shape_file(const std::filesystem::path& path,
                               std::optional<Index> n_expected) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("cannot open shape file " + path.string());
  std::stringstream buf;
  buf << f.rdbuf();
  return load_custom_shape(buf.str(), n_expected);
}

BaseGrid base_grid(Index h_in, Index w_in, Index stride, Index pad) {
  if (stride < 1) throw InvalidArgument("stride must be >= 1");
  if (pad < 0) throw InvalidArgument("padding must be >= 0");
  if (h_in < 1 || w_in < 1) throw DegenerateGrid("input extent must be >= 1");
  const Index h_out = (h_in + 2 * pad - 1) / stride + 1;
  const Index w_out = (w_in + 2 * pad - 1) / stride + 1;
  if (h_out < 1 || w_out < 1) throw DegenerateGrid("output grid would be empty");
  return {h_out, w_out, stride};
}

}  // namespace ldconv
