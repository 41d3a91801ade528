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

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ldconv/geometry.hpp"

namespace ldconv {

struct Series {
  std::string id;  // becomes the polyline's id attribute
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct ChartOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  /// Embedded as a leading comment when set.
  std::optional<std::string> timestamp;
};

/// Standalone SVG with axes, one polyline per series and a legend. Output is
/// a pure function of the inputs.
std::string svg_line_chart(const std::vector<Series>& series, const ChartOptions& opt);

/// Kernel points on a unit grid, (0, 0) at the top left.
std::string svg_shape_scatter(const KernelGeometry& g, const ChartOptions& opt);

std::string xml_escape(std::string_view s);

}  // namespace ldconv
