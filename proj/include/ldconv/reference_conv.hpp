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
#include <span>
#include <vector>

#include "ldconv/errors.hpp"
#include "ldconv/tensor.hpp"

namespace ldconv {

enum class Anchor { kTopLeft, kCenter };

struct Conv2dParams {
  Index stride = 1;
  Index pad = 0;
  Anchor anchor = Anchor::kTopLeft;
};

namespace detail {

inline Index conv_out_extent(Index in, Index k, const Conv2dParams& p) {
  return (in + 2 * p.pad - k) / p.stride + 1;
}

inline void check_conv_args(const Dims<4>& x, const Dims<4>& w, Index bias_len,
                            const Conv2dParams& p) {
  if (p.stride < 1) throw InvalidArgument("stride must be positive");
  if (p.pad < 0) throw InvalidArgument("padding must be non-negative");
  if (w[1] != x[1]) {
    throw ShapeError("weight C_in " + std::to_string(w[1]) +
                     " does not match input channels " + std::to_string(x[1]));
  }
  if (bias_len >= 0 && bias_len != w[0]) throw ShapeError("bias length must equal C_out");
  if (x[2] + 2 * p.pad - w[2] < 0 || x[3] + 2 * p.pad - w[3] < 0) {
    throw ShapeError("kernel larger than padded input");
  }
}

// Row offset into the padded map added to i*stride + dh.
inline Index anchor_shift(Index k, const Conv2dParams& p) {
  return p.anchor == Anchor::kTopLeft ? 0 : p.pad - (k - 1) / 2;
}

}  // namespace detail

/// Direct-summation 2-D cross-correlation. This is the slow, obviously
/// correct oracle the deformable operator is checked against; it never goes
/// through the im2col/GEMM path.
///
/// out(b,o,i,j) = bias[o] + sum_{c,dh,dw} w(o,c,dh,dw) *
///                x_padded(b, c, i*stride + dh + a_h, j*stride + dw + a_w)
///
/// With the top-left anchor a = 0. With the center anchor a = pad - (k-1)/2,
/// i.e. the window is centered on (i*stride, j*stride) of the unpadded input.
/// Reads outside the padded map contribute zero.
template <typename Scalar>
Tensor4<Scalar> conv2d_reference(const Tensor4<Scalar>& x, const Tensor4<Scalar>& w,
                                 std::optional<std::span<const Scalar>> bias,
                                 const Conv2dParams& p = {}) {
  detail::check_conv_args(x.dims(), w.dims(), bias ? static_cast<Index>(bias->size()) : -1, p);
  const auto [B, C, H, W] = x.dims();
  const auto [O, Ci, KH, KW] = w.dims();
  const Index Ho = detail::conv_out_extent(H, KH, p);
  const Index Wo = detail::conv_out_extent(W, KW, p);
  if (Ho < 1 || Wo < 1) throw ShapeError("convolution output would be empty");
  const Index ah = detail::anchor_shift(KH, p) - p.pad;
  const Index aw = detail::anchor_shift(KW, p) - p.pad;

  Tensor4<Scalar> out({B, O, Ho, Wo});
  for (Index b = 0; b < B; ++b)
    for (Index o = 0; o < O; ++o)
      for (Index i = 0; i < Ho; ++i)
        for (Index j = 0; j < Wo; ++j) {
          Scalar acc = bias ? (*bias)[o] : Scalar(0);
          for (Index c = 0; c < C; ++c)
            for (Index dh = 0; dh < KH; ++dh) {
              const Index r = i * p.stride + dh + ah;
              if (r < 0 || r >= H) continue;
              for (Index dw = 0; dw < KW; ++dw) {
                const Index s = j * p.stride + dw + aw;
                if (s < 0 || s >= W) continue;
                acc += w(o, c, dh, dw) * x(b, c, r, s);
              }
            }
          out(b, o, i, j) = acc;
        }
  return out;
}

template <typename Scalar>
struct Conv2dGrads {
  Tensor4<Scalar> x;
  Tensor4<Scalar> w;
  std::vector<Scalar> bias;
};

/// Reverse-mode adjoint of conv2d_reference, again by direct summation.
template <typename Scalar>
Conv2dGrads<Scalar> conv2d_reference_backward(const Tensor4<Scalar>& x,
                                              const Tensor4<Scalar>& w,
                                              const Tensor4<Scalar>& upstream,
                                              const Conv2dParams& p = {}) {
  detail::check_conv_args(x.dims(), w.dims(), -1, p);
  const auto [B, C, H, W] = x.dims();
  const auto [O, Ci, KH, KW] = w.dims();
  const Index Ho = detail::conv_out_extent(H, KH, p);
  const Index Wo = detail::conv_out_extent(W, KW, p);
  if (upstream.dims() != Dims<4>{B, O, Ho, Wo}) throw ShapeError("upstream dims mismatch");
  const Index ah = detail::anchor_shift(KH, p) - p.pad;
  const Index aw = detail::anchor_shift(KW, p) - p.pad;

  Conv2dGrads<Scalar> g{Tensor4<Scalar>(x.dims()), Tensor4<Scalar>(w.dims()),
                        std::vector<Scalar>(static_cast<std::size_t>(O), Scalar(0))};
  for (Index b = 0; b < B; ++b)
    for (Index o = 0; o < O; ++o)
      for (Index i = 0; i < Ho; ++i)
        for (Index j = 0; j < Wo; ++j) {
          const Scalar up = upstream(b, o, i, j);
          g.bias[o] += up;
          for (Index c = 0; c < C; ++c)
            for (Index dh = 0; dh < KH; ++dh) {
              const Index r = i * p.stride + dh + ah;
              if (r < 0 || r >= H) continue;
              for (Index dw = 0; dw < KW; ++dw) {
                const Index s = j * p.stride + dw + aw;
                if (s < 0 || s >= W) continue;
                g.w(o, c, dh, dw) += up * x(b, c, r, s);
                g.x(b, c, r, s) += up * w(o, c, dh, dw);
              }
            }
        }
  return g;
}

}  // namespace ldconv
