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
#include <array>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ldconv/errors.hpp"

namespace ldconv {

using Index = std::int64_t;

template <std::size_t Rank>
using Dims = std::array<Index, Rank>;

template <std::size_t Rank>
std::string dims_to_string(const Dims<Rank>& dims) {
  std::string out = "(";
  for (std::size_t i = 0; i < Rank; ++i) {
    if (i) out += ",";
    out += std::to_string(dims[i]);
  }
  return out + ")";
}

/// Dense row-major array with the last dimension fastest-varying.
///
/// Rank 4 is the (B, C, H, W) feature-map carrier; rank 5 holds resampled
/// features (B, C, N, H, W); rank 3 holds aggregation weights. Storage is
/// always exactly the product of the dims.
template <typename Scalar, std::size_t Rank>
class Tensor {
 public:
  using value_type = Scalar;
  static constexpr std::size_t rank = Rank;

  Tensor() { dims_.fill(0); }

  explicit Tensor(const Dims<Rank>& dims, Scalar fill = Scalar(0))
      : dims_(dims), data_(checked_size(dims), fill) {}

  Tensor(const Dims<Rank>& dims, std::vector<Scalar> data)
      : dims_(dims), data_(std::move(data)) {
    if (static_cast<Index>(data_.size()) != checked_size(dims)) {
      throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                       " does not match dims " + dims_to_string(dims));
    }
  }

  const Dims<Rank>& dims() const { return dims_; }
  Index dim(std::size_t i) const { return dims_[i]; }
  Index size() const { return static_cast<Index>(data_.size()); }
  bool empty() const { return data_.empty(); }

  Scalar* data() { return data_.data(); }
  const Scalar* data() const { return data_.data(); }
  std::span<Scalar> span() { return data_; }
  std::span<const Scalar> span() const { return data_; }
  std::vector<Scalar>& storage() { return data_; }
  const std::vector<Scalar>& storage() const { return data_; }

  template <typename... Idx>
  Index offset(Idx... idx) const {
    static_assert(sizeof...(Idx) == Rank);
    const std::array<Index, Rank> ix{static_cast<Index>(idx)...};
    Index off = 0;
    for (std::size_t i = 0; i < Rank; ++i) off = off * dims_[i] + ix[i];
    return off;
  }

  /// Inverse of offset().
  std::array<Index, Rank> unravel(Index flat) const {
    std::array<Index, Rank> ix{};
    for (std::size_t i = Rank; i-- > 0;) {
      ix[i] = flat % dims_[i];
      flat /= dims_[i];
    }
    return ix;
  }

  template <typename... Idx>
  Scalar& operator()(Idx... idx) {
    return data_[static_cast<std::size_t>(offset(idx...))];
  }
  template <typename... Idx>
  const Scalar& operator()(Idx... idx) const {
    return data_[static_cast<std::size_t>(offset(idx...))];
  }

  Scalar& operator[](Index i) { return data_[static_cast<std::size_t>(i)]; }
  const Scalar& operator[](Index i) const {
    return data_[static_cast<std::size_t>(i)];
  }

  /// Elements per leading index, e.g. C*H*W for a (B,C,H,W) tensor.
  Index stride0() const { return Rank == 0 || dims_[0] == 0 ? 0 : size() / dims_[0]; }

  Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> vec() {
    return {data_.data(), size()};
  }
  Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> vec() const {
    return {data_.data(), size()};
  }

  Tensor& operator+=(const Tensor& other) {
    require_same_dims(other);
    vec() += other.vec();
    return *this;
  }
  Tensor& operator-=(const Tensor& other) {
    require_same_dims(other);
    vec() -= other.vec();
    return *this;
  }
  Tensor& operator*=(Scalar s) {
    vec() *= s;
    return *this;
  }

  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  friend Tensor operator*(Scalar s, Tensor a) { return a *= s; }
  friend Tensor operator*(Tensor a, Scalar s) { return a *= s; }

  bool operator==(const Tensor& other) const = default;

  template <typename Other>
  Tensor<Other, Rank> cast() const {
    std::vector<Other> out(data_.begin(), data_.end());
    return Tensor<Other, Rank>(dims_, std::move(out));
  }

  void require_same_dims(const Tensor& other) const {
    if (dims_ != other.dims_) {
      throw ShapeError("dims mismatch " + dims_to_string(dims_) + " vs " +
                       dims_to_string(other.dims_));
    }
  }

 private:
  static Index checked_size(const Dims<Rank>& dims) {
    Index n = 1;
    for (Index d : dims) {
      if (d < 0) throw ShapeError("negative dimension in " + dims_to_string(dims));
      n *= d;
    }
    return n;
  }

  Dims<Rank> dims_;
  std::vector<Scalar> data_;
};

template <typename Scalar>
using Tensor3 = Tensor<Scalar, 3>;
template <typename Scalar>
using Tensor4 = Tensor<Scalar, 4>;
template <typename Scalar>
using Tensor5 = Tensor<Scalar, 5>;

template <typename Scalar = float, std::size_t Rank = 4>
Tensor<Scalar, Rank> zeros(const Dims<Rank>& dims) {
  return Tensor<Scalar, Rank>(dims);
}

template <typename Scalar, std::size_t Rank>
Scalar max_abs(const Tensor<Scalar, Rank>& t) {
  return t.empty() ? Scalar(0) : t.vec().cwiseAbs().maxCoeff();
}

/// max |a - b| / max(|a|, |b|, floor); a scale-aware elementwise comparison.
template <typename Scalar, std::size_t Rank>
double max_rel_diff(const Tensor<Scalar, Rank>& a, const Tensor<Scalar, Rank>& b,
                    double floor = 1e-12) {
  a.require_same_dims(b);
  double worst = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    const double x = a[i], y = b[i];
    const double denom = std::max({std::abs(x), std::abs(y), floor});
    worst = std::max(worst, std::abs(x - y) / denom);
  }
  return worst;
}

/// Zero-pad the two spatial axes of a (B,C,H,W) tensor by `pad` on each side.
template <typename Scalar>
Tensor4<Scalar> pad_spatial(const Tensor4<Scalar>& x, Index pad) {
  if (pad < 0) throw InvalidArgument("padding must be non-negative");
  if (pad == 0) return x;
  const auto [B, C, H, W] = x.dims();
  Tensor4<Scalar> out({B, C, H + 2 * pad, W + 2 * pad});
  for (Index b = 0; b < B; ++b)
    for (Index c = 0; c < C; ++c)
      for (Index h = 0; h < H; ++h)
        std::copy_n(&x(b, c, h, 0), W, &out(b, c, h + pad, pad));
  return out;
}

/// Adjoint of pad_spatial: crop the interior back out.
template <typename Scalar>
Tensor4<Scalar> crop_spatial(const Tensor4<Scalar>& x, Index pad) {
  if (pad == 0) return x;
  const auto [B, C, Hp, Wp] = x.dims();
  const Index H = Hp - 2 * pad, W = Wp - 2 * pad;
  if (H < 0 || W < 0) throw ShapeError("crop larger than tensor");
  Tensor4<Scalar> out({B, C, H, W});
  for (Index b = 0; b < B; ++b)
    for (Index c = 0; c < C; ++c)
      for (Index h = 0; h < H; ++h)
        std::copy_n(&x(b, c, h + pad, pad), W, &out(b, c, h, 0));
  return out;
}

}  // namespace ldconv
