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

#include <cmath>
#include <functional>
#include <string>
#include <type_traits>
#include <vector>

#include "ldconv/ldconv.hpp"
#include "ldconv/rng.hpp"
#include "ldconv/sampler.hpp"

namespace ldconv {

struct GradCheckOptions {
  Index n = 3;
  Dims<4> dims{1, 2, 5, 5};
  Index c_out = 2;
  Index stride = 1;
  Index padding = 0;
  PostOp post = PostOp::kNone;
  Strategy strategy = Strategy::kChannelStack;
  std::uint64_t seed = 0;
  /// Central-difference step; 0 picks 1e-4 for double and 1e-3 for float.
  double eps = 0.0;
  /// Scales the analytic input gradient by 1.05 (negative control).
  bool sabotage = false;
  int max_attempts = 2000;
};

struct GroupError {
  std::string name;
  double max_rel_error = 0.0;
  Index count = 0;
};

struct GradCheckResult {
  std::vector<GroupError> groups;
  double tolerance = 0.0;
  double eps = 0.0;
  int attempts = 0;
  bool passed = false;

  double worst() const {
    double w = 0.0;
    for (const auto& g : groups) w = std::max(w, g.max_rel_error);
    return w;
  }
};

/// 1e-6 in double precision, 1e-3 in single precision.
template <typename Scalar>
constexpr double gradcheck_tolerance() {
  return std::is_same_v<Scalar, double> ? 1e-6 : 1e-3;
}

template <typename Scalar>
double default_fd_step() {
  return std::is_same_v<Scalar, double> ? 1e-4 : 1e-3;
}

namespace detail {

/// max |a - n| / max(max|a|, max|n|): error measured against the group's
/// gradient scale.
inline double group_rel_error(const std::vector<double>& analytic,
                              const std::vector<double>& numeric) {
  double diff = 0.0, scale = 1e-12;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff = std::max(diff, std::abs(analytic[i] - numeric[i]));
    scale = std::max({scale, std::abs(analytic[i]), std::abs(numeric[i])});
  }
  return diff / scale;
}

template <typename Scalar, std::size_t Rank>
double weighted_sum(const Tensor<Scalar, Rank>& y, const Tensor<Scalar, Rank>& weights) {
  double acc = 0.0;
  for (Index i = 0; i < y.size(); ++i)
    acc += static_cast<double>(y[i]) * static_cast<double>(weights[i]);
  return acc;
}

/// Smallest distance from any coordinate to the integer lattice.
template <typename Scalar>
double lattice_margin(const SampleGrid<Scalar>& grid) {
  double m = 0.5;
  for (const auto* t : {&grid.rows(), &grid.cols()})
    for (Index i = 0; i < t->size(); ++i) {
      const double v = (*t)[i];
      m = std::min(m, std::abs(v - std::round(v)));
    }
  return m;
}

/// Central differences of `loss` with respect to every entry of `param`.
template <typename Scalar, typename Loss>
std::vector<double> numeric_grad(std::span<Scalar> param, double eps, Loss&& loss) {
  std::vector<double> out(param.size());
  for (std::size_t i = 0; i < param.size(); ++i) {
    const Scalar saved = param[i];
    param[i] = static_cast<Scalar>(saved + eps);
    const double up = loss();
    param[i] = static_cast<Scalar>(saved - eps);
    const double down = loss();
    param[i] = saved;
    // Divide by the step actually taken after rounding to Scalar.
    const double h = static_cast<double>(static_cast<Scalar>(saved + eps)) -
                     static_cast<double>(static_cast<Scalar>(saved - eps));
    out[i] = (up - down) / h;
  }
  return out;
}

template <typename Range>
std::vector<double> to_doubles(const Range& r) {
  return std::vector<double>(std::begin(r), std::end(r));
}

}  // namespace detail

/// Random layer whose offsets are far enough from the lattice that every
/// finite-difference probe stays inside one bilinear cell.
template <typename Scalar>
struct GradCheckInstance {
  LdconvLayer<Scalar> layer;
  Tensor4<Scalar> x;
  Tensor4<Scalar> probe;  // loss = sum(probe * y)
  int attempts = 0;
};

template <typename Scalar>
GradCheckInstance<Scalar> make_gradcheck_instance(const GradCheckOptions& opt, double margin) {
  for (const Index d : opt.dims)
    if (d < 1) throw InvalidArgument("gradient check dims must all be >= 1");
  for (int attempt = 1; attempt <= opt.max_attempts; ++attempt) {
    Rng rng = Rng(opt.seed, "gradcheck").split(std::to_string(attempt));
    LdconvConfig cfg;
    cfg.n = opt.n;
    cfg.c_in = opt.dims[1];
    cfg.c_out = opt.c_out;
    cfg.stride = opt.stride;
    cfg.padding = opt.padding;
    cfg.post = opt.post;
    cfg.strategy = opt.strategy;
    Rng init = rng.split("init");
    GradCheckInstance<Scalar> inst{make_layer<Scalar>(cfg, init), {}, {}, attempt};
    Rng params = rng.split("params");
    for (auto& v : inst.layer.offset_weights.storage()) v = params.uniform<Scalar>(-0.1, 0.1);
    for (auto& v : inst.layer.offset_bias) v = params.uniform<Scalar>(-1.5, 1.5);
    for (auto& v : inst.layer.norm_scale) v = params.uniform<Scalar>(0.5, 1.5);
    for (auto& v : inst.layer.norm_shift) v = params.uniform<Scalar>(-0.5, 0.5);
    Rng data = rng.split("x");
    inst.x = rand_uniform<Scalar>(opt.dims, data, -1, 1);
    const auto out = forward(inst.layer, inst.x);
    if (detail::lattice_margin(out.cache.grid) <= margin) continue;
    Rng probe = rng.split("probe");
    inst.probe = rand_uniform<Scalar>(out.y.dims(), probe, -1, 1);
    return inst;
  }
  throw InvalidArgument("no lattice-free gradient-check instance within max_attempts");
}

/// Finite-difference audit of every gradient the layer produces.
template <typename Scalar>
GradCheckResult check_layer_gradients(const GradCheckOptions& opt) {
  const double eps = opt.eps > 0 ? opt.eps : default_fd_step<Scalar>();
  GradCheckInstance<Scalar> inst = make_gradcheck_instance<Scalar>(opt, 10 * eps);
  auto& layer = inst.layer;
  auto& x = inst.x;

  const auto out = forward(layer, x);
  LdconvGrads<Scalar> g = backward(layer, out.cache, inst.probe);
  if (opt.sabotage)
    for (auto& v : g.x.storage()) v *= Scalar(1.05);

  auto loss = [&] { return detail::weighted_sum(forward(layer, x).y, inst.probe); };
  GradCheckResult res;
  res.tolerance = gradcheck_tolerance<Scalar>();
  res.eps = eps;
  res.attempts = inst.attempts;
  auto add = [&](std::string name, std::span<Scalar> param, const std::vector<double>& analytic) {
    const auto numeric = detail::numeric_grad<Scalar>(param, eps, loss);
    res.groups.push_back(
        {std::move(name), detail::group_rel_error(analytic, numeric), static_cast<Index>(param.size())});
  };
  add("x", x.span(), detail::to_doubles(g.x.storage()));
  add("offset_weights", layer.offset_weights.span(), detail::to_doubles(g.offset_weights.storage()));
  add("offset_bias", layer.offset_bias, detail::to_doubles(g.offset_bias));
  add("agg_weights", layer.agg_weights.span(), detail::to_doubles(g.agg_weights.storage()));
  // Normalization removes per-channel constants, so with the post stage the
  // bias gradient is identically zero and has no scale to compare against.
  if (layer.agg_bias && layer.post == PostOp::kNone)
    add("agg_bias", *layer.agg_bias, detail::to_doubles(g.agg_bias));
  if (layer.post == PostOp::kNormAct) {
    add("norm_scale", layer.norm_scale, detail::to_doubles(g.norm_scale));
    add("norm_shift", layer.norm_shift, detail::to_doubles(g.norm_shift));
  }
  res.passed = res.worst() < res.tolerance;
  return res;
}

/// Finite-difference audit of bilinear_backward on a random lattice-free grid.
template <typename Scalar>
GradCheckResult check_sampler_gradients(const GradCheckOptions& opt) {
  const double eps = opt.eps > 0 ? opt.eps : default_fd_step<Scalar>();
  const double margin = 10 * eps;
  const auto [B, C, H, W] = opt.dims;
  if (B < 1 || C < 1 || H < 1 || W < 1) throw InvalidArgument("gradient check dims must all be >= 1");
  const Dims<4> grid_dims{B, opt.n, std::max<Index>(1, H - 2), std::max<Index>(1, W - 2)};
  for (int attempt = 1; attempt <= opt.max_attempts; ++attempt) {
    Rng rng = Rng(opt.seed, "sampler-gradcheck").split(std::to_string(attempt));
    Rng rx = rng.split("x"), rr = rng.split("rows"), rc = rng.split("cols"), rp = rng.split("probe");
    Tensor4<Scalar> x = rand_uniform<Scalar>(opt.dims, rx, -1, 1);
    // Coordinates reach one pixel past either border to exercise clamping.
    Tensor4<Scalar> rows = rand_uniform<Scalar>(grid_dims, rr, -1, static_cast<Scalar>(H));
    Tensor4<Scalar> cols = rand_uniform<Scalar>(grid_dims, rc, -1, static_cast<Scalar>(W));
    if (detail::lattice_margin(SampleGrid<Scalar>(rows, cols)) <= margin) continue;
    const Tensor5<Scalar> probe = rand_uniform<Scalar, 5>(
        {B, C, grid_dims[1], grid_dims[2], grid_dims[3]}, rp, -1, 1);

    SampleGrads<Scalar> g = bilinear_backward(x, SampleGrid<Scalar>(rows, cols), probe);
    if (opt.sabotage)
      for (auto& v : g.x.storage()) v *= Scalar(1.05);
    auto loss = [&] {
      return detail::weighted_sum(bilinear_sample(x, SampleGrid<Scalar>(rows, cols)), probe);
    };
    GradCheckResult res;
    res.tolerance = gradcheck_tolerance<Scalar>();
    res.eps = eps;
    res.attempts = attempt;
    auto add = [&](std::string name, std::span<Scalar> param, const std::vector<double>& analytic) {
      const auto numeric = detail::numeric_grad<Scalar>(param, eps, loss);
      res.groups.push_back({std::move(name), detail::group_rel_error(analytic, numeric),
                            static_cast<Index>(param.size())});
    };
    add("sampler.x", x.span(), detail::to_doubles(g.x.storage()));
    add("sampler.rows", rows.span(), detail::to_doubles(g.rows.storage()));
    add("sampler.cols", cols.span(), detail::to_doubles(g.cols.storage()));
    res.passed = res.worst() < res.tolerance;
    return res;
  }
  throw InvalidArgument("no lattice-free sampler instance within max_attempts");
}

}  // namespace ldconv
