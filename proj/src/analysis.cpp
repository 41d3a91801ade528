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


#include "ldconv/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ldconv/errors.hpp"

namespace ldconv {
namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require_same_layer(const LdconvLayer<float>& a, const LdconvLayer<float>& b, const std::string& what) {
  if (a.n != b.n || a.c_in != b.c_in || a.c_out != b.c_out || a.stride != b.stride || a.padding != b.padding) {
    throw IncompatibleCheckpoint(what + " differs between checkpoints (N " + std::to_string(a.n) + " vs " +
                                 std::to_string(b.n) + ", channels " + std::to_string(a.c_in) + "->" +
                                 std::to_string(a.c_out) + " vs " + std::to_string(b.c_in) + "->" +
                                 std::to_string(b.c_out) + ")");
  }
}

}  // namespace

AoReport average_offset(const Tensor4<float>& offsets, std::string shape_id) {
  const auto [b, ch, h, w] = offsets.dims();
  AoReport r;
  r.shape_id = std::move(shape_id);
  r.per_position = Tensor3<double>({b, h, w});
  r.batch_mean = Tensor<double, 2>({h, w});
  r.per_sample.assign(static_cast<std::size_t>(b), 0.0);

  std::vector<double> mags(static_cast<std::size_t>(ch));
  for (Index s = 0; s < b; ++s)
    for (Index i = 0; i < h; ++i)
      for (Index j = 0; j < w; ++j) {
        for (Index c = 0; c < ch; ++c) mags[static_cast<std::size_t>(c)] = std::fabs(static_cast<double>(offsets(s, c, i, j)));
        std::sort(mags.begin(), mags.end());
        double sum = 0.0;
        for (double m : mags) sum += m;
        r.per_position(s, i, j) = ch > 0 ? sum / static_cast<double>(ch) : 0.0;
      }

  const Index plane = h * w;
  double total = 0.0;
  for (Index s = 0; s < b; ++s) {
    double acc = 0.0;
    for (Index p = 0; p < plane; ++p) acc += r.per_position.data()[s * plane + p];
    r.per_sample[static_cast<std::size_t>(s)] = plane > 0 ? acc / static_cast<double>(plane) : 0.0;
    total += acc;
  }
  for (Index p = 0; p < plane; ++p) {
    double acc = 0.0;
    for (Index s = 0; s < b; ++s) acc += r.per_position.data()[s * plane + p];
    r.batch_mean.data()[p] = b > 0 ? acc / static_cast<double>(b) : 0.0;
  }
  const Index count = r.per_position.size();
  if (count > 0) {
    r.mean = total / static_cast<double>(count);
    double var = 0.0;
    for (double v : r.per_position.span()) var += (v - r.mean) * (v - r.mean);
    r.std = std::sqrt(var / static_cast<double>(count));
  }
  return r;
}

Index ceil_sqrt(Index n) {
  Index k = static_cast<Index>(std::sqrt(static_cast<double>(n)));
  while (k * k < n) ++k;
  while (k > 0 && (k - 1) * (k - 1) >= n) --k;
  return k;
}

std::vector<GrowthRow> growth_audit(Index c_in, Index c_out, const std::vector<Index>& n_range, bool agg_bias,
                                    Index h, Index w) {
  if (n_range.empty()) throw InvalidArgument("growth audit needs at least one n");
  if (c_in < 1 || c_out < 1) throw InvalidArgument("channel counts must be >= 1");
  std::vector<GrowthRow> rows;
  for (std::size_t k = 0; k < n_range.size(); ++k) {
    const Index n = n_range[k];
    if (n < 1) throw InvalidArgument("n must be >= 1, got " + std::to_string(n));
    if (k > 0 && n <= n_range[k - 1]) throw InvalidArgument("n range must be strictly ascending");
    LdconvLayer<float> layer;
    layer.n = n;
    layer.c_in = c_in;
    layer.c_out = c_out;
    if (agg_bias) layer.agg_bias = std::vector<float>{};
    GrowthRow row;
    row.n = n;
    row.params = param_count(layer);
    row.flops = flops_estimate(layer, h, w);
    if (!rows.empty()) row.delta_params = row.params - rows.back().params;
    const Index ks = ceil_sqrt(n);
    row.std_conv_params = c_out * c_in * ks * ks;
    rows.push_back(row);
  }
  return rows;
}

std::vector<AoReport> shape_ao_compare(const std::vector<ShapeCheckpoint>& checkpoints, const Tensor4<float>& probe) {
  if (probe.dim(0) < 1) throw InvalidArgument("probe batch must hold at least one image");
  for (std::size_t k = 1; k < checkpoints.size(); ++k) {
    require_same_layer(checkpoints[0].net.l1, checkpoints[k].net.l1, "first layer");
    require_same_layer(checkpoints[0].net.l2, checkpoints[k].net.l2, "last layer");
  }
  std::vector<AoReport> out;
  for (const auto& ck : checkpoints) {
    const NetForward f = net_forward(ck.net, probe);
    out.push_back(average_offset(f.h2.cache.offsets, ck.id));
  }
  return out;
}

std::string ao_csv(const AoReport& report) {
  std::string s = "b,i,j,ao\n";
  const auto [b, h, w] = report.per_position.dims();
  for (Index x = 0; x < b; ++x)
    for (Index i = 0; i < h; ++i)
      for (Index j = 0; j < w; ++j)
        s += std::to_string(x) + "," + std::to_string(i) + "," + std::to_string(j) + "," +
             fmt_double(report.per_position(x, i, j)) + "\n";
  return s;
}

std::string growth_csv(const std::vector<GrowthRow>& rows) {
  std::string s = "n,params,flops,delta_params,std_conv_params\n";
  for (const auto& r : rows) {
    s += std::to_string(r.n) + "," + std::to_string(r.params) + "," + std::to_string(r.flops) + "," +
         (r.delta_params ? std::to_string(*r.delta_params) : "") + "," + std::to_string(r.std_conv_params) + "\n";
  }
  return s;
}

}  // namespace ldconv
