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


#include "ldconv/svg.hpp"

#include <algorithm>
#include <cstdio>

#include "ldconv/errors.hpp"

namespace ldconv {
namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 160, kTop = 40, kBottom = 50;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string header(const ChartOptions& opt) {
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  if (opt.timestamp) s += "<!-- generated " + xml_escape(*opt.timestamp) + " -->\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
       "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
       xml_escape(opt.title) + "</text>\n";
  return s;
}

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

std::string axes(const Frame& f, const ChartOptions& opt, int ticks) {
  const double xa = kLeft, xb = kWidth - kRight, ya = kHeight - kBottom, yb = kTop;
  std::string s = "<g stroke=\"black\" stroke-width=\"1\">\n";
  s += "<line x1=\"" + num(xa) + "\" y1=\"" + num(ya) + "\" x2=\"" + num(xb) + "\" y2=\"" + num(ya) + "\"/>\n";
  s += "<line x1=\"" + num(xa) + "\" y1=\"" + num(ya) + "\" x2=\"" + num(xa) + "\" y2=\"" + num(yb) + "\"/>\n";
  s += "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int t = 0; t <= ticks; ++t) {
    const double fx = f.x0 + (f.x1 - f.x0) * t / ticks, fy = f.y0 + (f.y1 - f.y0) * t / ticks;
    s += "<text x=\"" + num(f.px(fx)) + "\" y=\"" + num(ya + 16) + "\" text-anchor=\"middle\">" + label_num(fx) + "</text>\n";
    s += "<text x=\"" + num(xa - 6) + "\" y=\"" + num(f.py(fy) + 4) + "\" text-anchor=\"end\">" + label_num(fy) + "</text>\n";
  }
  s += "<text x=\"" + num((xa + xb) / 2) + "\" y=\"" + num(kHeight - 12) + "\" text-anchor=\"middle\">" +
       xml_escape(opt.x_label) + "</text>\n";
  s += "<text x=\"16\" y=\"" + num((ya + yb) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       num((ya + yb) / 2) + ")\">" + xml_escape(opt.y_label) + "</text>\n</g>\n";
  return s;
}

}  // namespace

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string svg_line_chart(const std::vector<Series>& series, const ChartOptions& opt) {
  Frame f{0, 1, 0, 1};
  bool any = false;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (!any) f = {x, x, y, y};
      any = true;
      f.x0 = std::min(f.x0, x);
      f.x1 = std::max(f.x1, x);
      f.y0 = std::min(f.y0, y);
      f.y1 = std::max(f.y1, y);
    }
  f.y0 = std::min(f.y0, 0.0);
  if (f.x1 <= f.x0) f.x1 = f.x0 + 1;
  if (f.y1 <= f.y0) f.y1 = f.y0 + 1;

  std::string s = header(opt) + axes(f, opt, 5);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kPalette[k % std::size(kPalette)];
    s += "<polyline id=\"" + xml_escape(series[k].id) + "\" fill=\"none\" stroke=\"" + color +
         "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < series[k].points.size(); ++i) {
      if (i) s += ' ';
      s += num(f.px(series[k].points[i].first)) + "," + num(f.py(series[k].points[i].second));
    }
    s += "\"/>\n";
    const double ly = kTop + 10 + 20.0 * static_cast<double>(k);
    const double lx = kWidth - kRight + 12;
    s += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 20) + "\" y2=\"" + num(ly) +
         "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + num(lx + 26) + "\" y=\"" + num(ly + 4) + "\" font-family=\"sans-serif\" font-size=\"11\">" +
         xml_escape(series[k].label.empty() ? series[k].id : series[k].label) + "</text>\n";
  }
  return s + "</svg>\n";
}

std::string svg_shape_scatter(const KernelGeometry& g, const ChartOptions& opt) {
  const double rows = static_cast<double>(g.max_row() + 1), cols = static_cast<double>(g.max_col() + 1);
  const double cell = std::min((kWidth - 80) / cols, (kHeight - 80) / rows);
  const double ox = (kWidth - cell * cols) / 2, oy = 50;
  std::string s = header(opt);
  s += "<g stroke=\"#bbbbbb\" stroke-width=\"1\">\n";
  for (double r = 0; r <= rows; ++r)
    s += "<line x1=\"" + num(ox) + "\" y1=\"" + num(oy + r * cell) + "\" x2=\"" + num(ox + cols * cell) + "\" y2=\"" +
         num(oy + r * cell) + "\"/>\n";
  for (double c = 0; c <= cols; ++c)
    s += "<line x1=\"" + num(ox + c * cell) + "\" y1=\"" + num(oy) + "\" x2=\"" + num(ox + c * cell) + "\" y2=\"" +
         num(oy + rows * cell) + "\"/>\n";
  s += "</g>\n<g fill=\"#1f77b4\">\n";
  for (Index i = 0; i < g.n(); ++i) {
    const Coord& p = g[i];
    s += "<circle id=\"p" + std::to_string(i) + "\" cx=\"" + num(ox + (static_cast<double>(p.col) + 0.5) * cell) +
         "\" cy=\"" + num(oy + (static_cast<double>(p.row) + 0.5) * cell) + "\" r=\"" + num(cell * 0.3) + "\"/>\n";
  }
  return s + "</g>\n</svg>\n";
}

}  // namespace ldconv
