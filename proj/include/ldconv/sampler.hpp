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

#include <algorithm>
#include <cmath>
#include <vector>

#include "ldconv/errors.hpp"
#include "ldconv/parallel.hpp"
#include "ldconv/tensor.hpp"

namespace ldconv {

/// Fractional sampling coordinates, laid out (B, N, H_out, W_out) as two
/// parallel arrays. Construction rejects NaN.
template <typename Scalar>
class SampleGrid {
 public:
  SampleGrid() = default;
  SampleGrid(Tensor4<Scalar> rows, Tensor4<Scalar> cols)
      : rows_(std::move(rows)), cols_(std::move(cols)) {
    rows_.require_same_dims(cols_);
    for (Index i = 0; i < rows_.size(); ++i) {
      if (std::isnan(rows_[i]) || std::isnan(cols_[i])) {
        throw InvalidCoordinate("NaN sampling coordinate at flat index " + std::to_string(i));
      }
    }
  }

  const Dims<4>& dims() const { return rows_.dims(); }
  const Tensor4<Scalar>& rows() const { return rows_; }
  const Tensor4<Scalar>& cols() const { return cols_; }

 private:
  Tensor4<Scalar> rows_;
  Tensor4<Scalar> cols_;
};

namespace detail {

/// Clamped floor-cell decomposition of one coordinate along an axis of
/// length `extent`: lo/hi lattice indices, fractional weight `t`, and whether
/// the raw coordinate sits in the flat (clamped) region.
template <typename Scalar>
struct AxisCell {
  Index lo;
  Index hi;
  Scalar t;
  bool clamped;
};

template <typename Scalar>
AxisCell<Scalar> axis_cell(Scalar coord, Index extent) {
  const Scalar top = static_cast<Scalar>(extent - 1);
  const bool clamped = coord < Scalar(0) || coord > top;
  const Scalar c = std::clamp(coord, Scalar(0), top);
  const Index lo = static_cast<Index>(std::floor(c));
  const Index hi = std::min(lo + 1, extent - 1);
  return {lo, hi, c - static_cast<Scalar>(lo), clamped};
}

template <typename Scalar>
void check_sample_shapes(const Tensor4<Scalar>& x, const SampleGrid<Scalar>& grid) {
  if (grid.dims()[0] != x.dim(0)) {
    throw ShapeError("grid batch " + std::to_string(grid.dims()[0]) +
                     " does not match input batch " + std::to_string(x.dim(0)));
  }
  if (x.dim(2) < 1 || x.dim(3) < 1) throw ShapeError("cannot sample an empty feature map");
}

}  // namespace detail

/// Bilinear resampling of x (B,C,H,W) at every grid point, giving
/// (B, C, N, H_out, W_out). Coordinates are clamped to [0,H-1] x [0,W-1].
template <typename Scalar>
Tensor5<Scalar> bilinear_sample(const Tensor4<Scalar>& x, const SampleGrid<Scalar>& grid) {
  detail::check_sample_shapes(x, grid);
  const auto [B, C, H, W] = x.dims();
  const auto [Bg, N, Ho, Wo] = grid.dims();
  Tensor5<Scalar> out({B, C, N, Ho, Wo});
  const Index plane = Ho * Wo;

  parallel_for(B, [&](Index b) {
    for (Index n = 0; n < N; ++n)
      for (Index p = 0; p < plane; ++p) {
        const Index g = (b * N + n) * plane + p;
        const auto rc = detail::axis_cell(grid.rows()[g], H);
        const auto cc = detail::axis_cell(grid.cols()[g], W);
        const Scalar w00 = (1 - rc.t) * (1 - cc.t), w01 = (1 - rc.t) * cc.t;
        const Scalar w10 = rc.t * (1 - cc.t), w11 = rc.t * cc.t;
        for (Index c = 0; c < C; ++c) {
          const Scalar* src = &x(b, c, 0, 0);
          out[((b * C + c) * N + n) * plane + p] =
              w00 * src[rc.lo * W + cc.lo] + w01 * src[rc.lo * W + cc.hi] +
              w10 * src[rc.hi * W + cc.lo] + w11 * src[rc.hi * W + cc.hi];
        }
      }
  });
  return out;
}

template <typename Scalar>
struct SampleGrads {
  Tensor4<Scalar> x;     // (B, C, H, W)
  Tensor4<Scalar> rows;  // (B, N, H_out, W_out)
  Tensor4<Scalar> cols;
};

/// Adjoint of bilinear_sample. Feature gradients scatter into the four
/// corners; coordinate gradients are the analytic partials summed over
/// channels, zero wherever the coordinate is clamped. On lattice points the
/// floor cell is used (t = 0 inside [lo, lo+1]).
template <typename Scalar>
SampleGrads<Scalar> bilinear_backward(const Tensor4<Scalar>& x, const SampleGrid<Scalar>& grid,
                                      const Tensor5<Scalar>& upstream) {
  detail::check_sample_shapes(x, grid);
  const auto [B, C, H, W] = x.dims();
  const auto [Bg, N, Ho, Wo] = grid.dims();
  if (upstream.dims() != Dims<5>{B, C, N, Ho, Wo}) {
    throw ShapeError("upstream dims " + dims_to_string(upstream.dims()) +
                     " do not match the sampled layout");
  }
  SampleGrads<Scalar> g{Tensor4<Scalar>(x.dims()), Tensor4<Scalar>(grid.dims()),
                        Tensor4<Scalar>(grid.dims())};
  const Index plane = Ho * Wo;

  // Each batch index scatters only into its own slice of g.x.
  parallel_for(B, [&](Index b) {
    for (Index n = 0; n < N; ++n)
      for (Index p = 0; p < plane; ++p) {
        const Index gi = (b * N + n) * plane + p;
        const auto rc = detail::axis_cell(grid.rows()[gi], H);
        const auto cc = detail::axis_cell(grid.cols()[gi], W);
        const Scalar w00 = (1 - rc.t) * (1 - cc.t), w01 = (1 - rc.t) * cc.t;
        const Scalar w10 = rc.t * (1 - cc.t), w11 = rc.t * cc.t;
        const Index i00 = rc.lo * W + cc.lo, i01 = rc.lo * W + cc.hi;
        const Index i10 = rc.hi * W + cc.lo, i11 = rc.hi * W + cc.hi;
        Scalar d_row = 0, d_col = 0;
        for (Index c = 0; c < C; ++c) {
          const Scalar up = upstream[((b * C + c) * N + n) * plane + p];
          if (up == Scalar(0)) continue;
          const Scalar* src = &x(b, c, 0, 0);
          Scalar* dst = &g.x(b, c, 0, 0);
          dst[i00] += up * w00;
          dst[i01] += up * w01;
          dst[i10] += up * w10;
          dst[i11] += up * w11;
          d_row += up * ((1 - cc.t) * (src[i10] - src[i00]) + cc.t * (src[i11] - src[i01]));
          d_col += up * ((1 - rc.t) * (src[i01] - src[i00]) + rc.t * (src[i11] - src[i10]));
        }
        g.rows[gi] = rc.clamped ? Scalar(0) : d_row;
        g.cols[gi] = cc.clamped ? Scalar(0) : d_col;
      }
  });
  return g;
}

}  // namespace ldconv
