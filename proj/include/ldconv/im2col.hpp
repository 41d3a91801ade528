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

#include "ldconv/eigen_util.hpp"
#include "ldconv/tensor.hpp"

namespace ldconv::detail {

/// Patch matrix for one image: (C * kH * kW, Ho * Wo), zero outside the map.
/// Window (i, j) starts at (i*stride - pad, j*stride - pad).
template <typename Scalar>
RowMatrix<Scalar> im2col(const Scalar* image, Index C, Index H, Index W, Index k,
                         Index stride, Index pad, Index Ho, Index Wo) {
  RowMatrix<Scalar> cols = RowMatrix<Scalar>::Zero(C * k * k, Ho * Wo);
  for (Index c = 0; c < C; ++c)
    for (Index dh = 0; dh < k; ++dh)
      for (Index dw = 0; dw < k; ++dw) {
        Scalar* row = cols.row((c * k + dh) * k + dw).data();
        for (Index i = 0; i < Ho; ++i) {
          const Index r = i * stride - pad + dh;
          if (r < 0 || r >= H) continue;
          for (Index j = 0; j < Wo; ++j) {
            const Index s = j * stride - pad + dw;
            if (s >= 0 && s < W) row[i * Wo + j] = image[(c * H + r) * W + s];
          }
        }
      }
  return cols;
}

/// Adjoint of im2col: accumulates patch gradients back into `image_grad`.
template <typename Scalar>
void col2im(const RowMatrix<Scalar>& cols, Scalar* image_grad, Index C, Index H, Index W,
            Index k, Index stride, Index pad, Index Ho, Index Wo) {
  for (Index c = 0; c < C; ++c)
    for (Index dh = 0; dh < k; ++dh)
      for (Index dw = 0; dw < k; ++dw) {
        const Scalar* row = cols.row((c * k + dh) * k + dw).data();
        for (Index i = 0; i < Ho; ++i) {
          const Index r = i * stride - pad + dh;
          if (r < 0 || r >= H) continue;
          for (Index j = 0; j < Wo; ++j) {
            const Index s = j * stride - pad + dw;
            if (s >= 0 && s < W) image_grad[(c * H + r) * W + s] += row[i * Wo + j];
          }
        }
      }
}

}  // namespace ldconv::detail
