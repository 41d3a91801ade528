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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ldconv/eigen_util.hpp"
#include "ldconv/errors.hpp"
#include "ldconv/geometry.hpp"
#include "ldconv/im2col.hpp"
#include "ldconv/parallel.hpp"
#include "ldconv/rng.hpp"
#include "ldconv/sampler.hpp"
#include "ldconv/tensor.hpp"

namespace ldconv {

/// Data layouts that realize the aggregation sum over (channel, point).
enum class Strategy {
  kConv3d,        // (C, N, H, W) volume, (N,1,1) window with depth stride N
  kChannelStack,  // (C*N, H, W) stack, 1x1 mixing
  kColumnConv,    // (C, H, W*N) stack, (1,N) window with column stride N
};

enum class PostOp { kNone, kNormAct };

std::string_view to_string(Strategy s);
std::string_view to_string(PostOp p);
Strategy parse_strategy(std::string_view name);
PostOp parse_post(std::string_view name);

inline constexpr Strategy kAllStrategies[] = {Strategy::kConv3d, Strategy::kChannelStack,
                                              Strategy::kColumnConv};

inline constexpr double kNormEpsilon = 1e-5;

struct LdconvConfig {
  Index n = 5;
  Index c_in = 1;
  Index c_out = 1;
  Index stride = 1;
  Index padding = 0;
  bool agg_bias = true;
  Strategy strategy = Strategy::kChannelStack;
  PostOp post = PostOp::kNone;
  /// Defaults to gen_initial_coords(n).
  std::optional<KernelGeometry> geometry{};
  /// Recorded in checkpoints when the geometry came from a file.
  std::string shape_file{};
};

/// Parameters and hyperparameters of one layer. Offsets are shared across
/// input channels: the predictor emits 2N channels, rows first then columns.
template <typename Scalar>
struct LdconvLayer {
  Index n = 0;
  Index c_in = 0;
  Index c_out = 0;
  Index stride = 1;
  Index padding = 0;
  KernelGeometry geometry = gen_initial_coords(1);
  std::string shape_file{};
  Tensor4<Scalar> offset_weights;  // (2N, C_in, 3, 3)
  std::vector<Scalar> offset_bias;  // 2N
  Tensor3<Scalar> agg_weights;      // (C_out, C_in, N)
  std::optional<std::vector<Scalar>> agg_bias;
  Strategy strategy = Strategy::kChannelStack;
  PostOp post = PostOp::kNone;
  std::vector<Scalar> norm_scale;  // C_out, post == kNormAct only
  std::vector<Scalar> norm_shift;

  void validate() const {
    if (n < 1) throw InvalidArgument("kernel size n must be >= 1");
    if (c_in < 1 || c_out < 1) throw InvalidArgument("channel counts must be >= 1");
    if (stride < 1) throw InvalidArgument("stride must be >= 1");
    if (padding < 0) throw InvalidArgument("padding must be >= 0");
    if (geometry.n() != n) throw ShapeCountError("geometry point count differs from n");
    if (offset_weights.dims() != Dims<4>{2 * n, c_in, 3, 3})
      throw ShapeError("offset_weights must be (2N, C_in, 3, 3)");
    if (static_cast<Index>(offset_bias.size()) != 2 * n)
      throw ShapeError("offset_bias must have 2N entries");
    if (agg_weights.dims() != Dims<3>{c_out, c_in, n})
      throw ShapeError("agg_weights must be (C_out, C_in, N)");
    if (agg_bias && static_cast<Index>(agg_bias->size()) != c_out)
      throw ShapeError("agg_bias must have C_out entries");
    if (post == PostOp::kNormAct && (static_cast<Index>(norm_scale.size()) != c_out ||
                                     static_cast<Index>(norm_shift.size()) != c_out))
      throw ShapeError("norm parameters must have C_out entries");
  }

  template <typename Other>
  LdconvLayer<Other> cast() const {
    LdconvLayer<Other> o;
    o.n = n;
    o.c_in = c_in;
    o.c_out = c_out;
    o.stride = stride;
    o.padding = padding;
    o.geometry = geometry;
    o.shape_file = shape_file;
    o.offset_weights = offset_weights.template cast<Other>();
    o.offset_bias.assign(offset_bias.begin(), offset_bias.end());
    o.agg_weights = agg_weights.template cast<Other>();
    if (agg_bias) o.agg_bias = std::vector<Other>(agg_bias->begin(), agg_bias->end());
    o.strategy = strategy;
    o.post = post;
    o.norm_scale.assign(norm_scale.begin(), norm_scale.end());
    o.norm_shift.assign(norm_shift.begin(), norm_shift.end());
    return o;
  }
};

/// Offsets start at zero (undeformed geometry); aggregation weights and bias
/// are uniform in +-sqrt(1 / (C_in * N)); norm scale 1, shift 0.
template <typename Scalar>
LdconvLayer<Scalar> make_layer(const LdconvConfig& cfg, Rng& rng) {
  if (cfg.n < 1) throw InvalidArgument("kernel size n must be >= 1");
  if (cfg.c_in < 1 || cfg.c_out < 1) throw InvalidArgument("channel counts must be >= 1");
  LdconvLayer<Scalar> l;
  l.n = cfg.n;
  l.c_in = cfg.c_in;
  l.c_out = cfg.c_out;
  l.stride = cfg.stride;
  l.padding = cfg.padding;
  l.geometry = cfg.geometry ? *cfg.geometry : gen_initial_coords(cfg.n);
  l.shape_file = cfg.shape_file;
  l.offset_weights = Tensor4<Scalar>({2 * cfg.n, cfg.c_in, 3, 3});
  l.offset_bias.assign(static_cast<std::size_t>(2 * cfg.n), Scalar(0));
  const Scalar bound = static_cast<Scalar>(std::sqrt(1.0 / static_cast<double>(cfg.c_in * cfg.n)));
  l.agg_weights = rand_uniform<Scalar, 3>({cfg.c_out, cfg.c_in, cfg.n}, rng, -bound, bound);
  if (cfg.agg_bias) {
    std::vector<Scalar> bias(static_cast<std::size_t>(cfg.c_out));
    for (auto& v : bias) v = rng.uniform(-bound, bound);
    l.agg_bias = std::move(bias);
  }
  l.strategy = cfg.strategy;
  l.post = cfg.post;
  if (cfg.post == PostOp::kNormAct) {
    l.norm_scale.assign(static_cast<std::size_t>(cfg.c_out), Scalar(1));
    l.norm_shift.assign(static_cast<std::size_t>(cfg.c_out), Scalar(0));
  }
  l.validate();
  return l;
}

namespace detail {

template <typename Scalar>
BaseGrid layer_grid(const LdconvLayer<Scalar>& layer, const Dims<4>& x_dims) {
  if (x_dims[1] != layer.c_in) {
    throw ShapeError("input has " + std::to_string(x_dims[1]) + " channels, layer expects " +
                     std::to_string(layer.c_in));
  }
  return base_grid(x_dims[2], x_dims[3], layer.stride, layer.padding);
}

/// 3x3 offset predictor, pad 1, on an already zero-padded input.
template <typename Scalar>
Tensor4<Scalar> offset_conv(const LdconvLayer<Scalar>& layer, const Tensor4<Scalar>& xp) {
  const auto [B, C, H, W] = xp.dims();
  const Index Ho = (H - 1) / layer.stride + 1;
  const Index Wo = (W - 1) / layer.stride + 1;
  if (H < 1 || W < 1 || Ho < 1 || Wo < 1) throw DegenerateGrid("offset grid would be empty");
  const Index K = 2 * layer.n;
  Tensor4<Scalar> out({B, K, Ho, Wo});
  const auto weights = as_matrix(layer.offset_weights.data(), K, C * 9);
  const ConstVectorMap<Scalar> bias(layer.offset_bias.data(), K);
  parallel_for(B, [&](Index b) {
    const RowMatrix<Scalar> cols = im2col(&xp(b, 0, 0, 0), C, H, W, 3, layer.stride, 1, Ho, Wo);
    auto dst = as_matrix(&out(b, 0, 0, 0), K, Ho * Wo);
    dst.noalias() = weights * cols;
    dst.colwise() += bias;
  });
  return out;
}

template <typename Scalar>
void aggregate_conv3d(const LdconvLayer<Scalar>& layer, const Scalar* volume, Scalar* out,
                      Index plane) {
  // Volume (C, D, H*W) with D = N. Kernel depth N, depth stride N, so the
  // single output depth slice reads depths [0, N). Kernel element (o, c, kd)
  // maps to canonical weight (o, c, kd).
  const Index C = layer.c_in, N = layer.n, depth = N;
  const Index out_depth = (depth - N) / N + 1;
  for (Index o = 0; o < layer.c_out; ++o)
    for (Index d = 0; d < out_depth; ++d) {
      Scalar* dst = out + (o * out_depth + d) * plane;
      for (Index c = 0; c < C; ++c)
        for (Index kd = 0; kd < N; ++kd) {
          const Scalar w = layer.agg_weights(o, c, kd);
          const Scalar* src = volume + (c * depth + d * N + kd) * plane;
          for (Index p = 0; p < plane; ++p) dst[p] += w * src[p];
        }
    }
}

template <typename Scalar>
void aggregate_channel_stack(const LdconvLayer<Scalar>& layer, const Scalar* sampled, Scalar* out,
                             Index plane) {
  // Stacked channel k = c*N + n is already contiguous in the (C, N, H, W)
  // layout, so the stack is a reinterpretation and the 1x1 conv is one GEMM.
  const Index K = layer.c_in * layer.n;
  const auto weights = as_matrix(layer.agg_weights.data(), layer.c_out, K);
  as_matrix(out, layer.c_out, plane).noalias() += weights * as_matrix(sampled, K, plane);
}

template <typename Scalar>
void aggregate_column_conv(const LdconvLayer<Scalar>& layer, const Scalar* sampled, Scalar* out,
                           Index Ho, Index Wo) {
  const Index C = layer.c_in, N = layer.n, plane = Ho * Wo;
  const Index wide = Wo * N;
  // Width stack: stacked(c, i, j*N + n) = sampled(c, n, i, j).
  std::vector<Scalar> stacked(static_cast<std::size_t>(C * Ho * wide));
  for (Index c = 0; c < C; ++c)
    for (Index n = 0; n < N; ++n)
      for (Index i = 0; i < Ho; ++i)
        for (Index j = 0; j < Wo; ++j)
          stacked[static_cast<std::size_t>((c * Ho + i) * wide + j * N + n)] =
              sampled[(c * N + n) * plane + i * Wo + j];
  // (1, N) window, stride (1, N); kernel element (o, c, 0, k) maps to (o, c, k).
  const Index out_w = (wide - N) / N + 1;
  for (Index o = 0; o < layer.c_out; ++o)
    for (Index c = 0; c < C; ++c)
      for (Index i = 0; i < Ho; ++i) {
        const Scalar* row = stacked.data() + (c * Ho + i) * wide;
        Scalar* dst = out + o * plane + i * Wo;
        for (Index j = 0; j < out_w; ++j) {
          Scalar acc = 0;
          for (Index k = 0; k < N; ++k) acc += layer.agg_weights(o, c, k) * row[j * N + k];
          dst[j] += acc;
        }
      }
}

template <typename Scalar>
Scalar sigmoid(Scalar v) {
  return Scalar(1) / (Scalar(1) + std::exp(-v));
}

}  // namespace detail

/// Offset field (B, 2N, H_out, W_out) for input x; layer padding is applied
/// first, then a 3x3 pad-1 convolution at the layer stride.
template <typename Scalar>
Tensor4<Scalar> predict_offsets(const LdconvLayer<Scalar>& layer, const Tensor4<Scalar>& x) {
  detail::layer_grid(layer, x.dims());
  return detail::offset_conv(layer, pad_spatial(x, layer.padding));
}

/// grid(b,n,i,j) = P0(i,j) + P_n + offset, rows from channel n and columns
/// from channel N + n.
template <typename Scalar>
SampleGrid<Scalar> assemble_grid(const LdconvLayer<Scalar>& layer, const Tensor4<Scalar>& offsets) {
  const auto [B, K, Ho, Wo] = offsets.dims();
  if (K != 2 * layer.n) {
    throw ShapeError("offset field has " + std::to_string(K) + " channels, expected 2N = " +
                     std::to_string(2 * layer.n));
  }
  const Index N = layer.n;
  Tensor4<Scalar> rows({B, N, Ho, Wo}), cols({B, N, Ho, Wo});
  for (Index b = 0; b < B; ++b)
    for (Index n = 0; n < N; ++n) {
      const Coord pn = layer.geometry[n];
      for (Index i = 0; i < Ho; ++i)
        for (Index j = 0; j < Wo; ++j) {
          rows(b, n, i, j) = static_cast<Scalar>(i * layer.stride + pn.row) + offsets(b, n, i, j);
          cols(b, n, i, j) =
              static_cast<Scalar>(j * layer.stride + pn.col) + offsets(b, N + n, i, j);
        }
    }
  return SampleGrid<Scalar>(std::move(rows), std::move(cols));
}

/// out(b,o,i,j) = bias[o] + sum_{c,n} agg_weights(o,c,n) * sampled(b,c,n,i,j)
/// through the data layout of `strategy`.
template <typename Scalar>
Tensor4<Scalar> aggregate(const LdconvLayer<Scalar>& layer, const Tensor5<Scalar>& sampled,
                          Strategy strategy) {
  const auto [B, C, N, Ho, Wo] = sampled.dims();
  if (C != layer.c_in || N != layer.n) {
    throw ShapeError("sampled dims " + dims_to_string(sampled.dims()) + " do not match layer");
  }
  Tensor4<Scalar> out({B, layer.c_out, Ho, Wo});
  const Index plane = Ho * Wo;
  parallel_for(B, [&](Index b) {
    const Scalar* src = &sampled(b, 0, 0, 0, 0);
    Scalar* dst = &out(b, 0, 0, 0);
    if (layer.agg_bias)
      for (Index o = 0; o < layer.c_out; ++o)
        std::fill_n(dst + o * plane, plane, (*layer.agg_bias)[o]);
    switch (strategy) {
      case Strategy::kConv3d:
        detail::aggregate_conv3d(layer, src, dst, plane);
        break;
      case Strategy::kChannelStack:
        detail::aggregate_channel_stack(layer, src, dst, plane);
        break;
      case Strategy::kColumnConv:
        detail::aggregate_column_conv(layer, src, dst, Ho, Wo);
        break;
      default:
        throw InvalidArgument("unknown aggregation strategy");
    }
  });
  return out;
}

template <typename Scalar>
Tensor4<Scalar> aggregate(const LdconvLayer<Scalar>& layer, const Tensor5<Scalar>& sampled) {
  return aggregate(layer, sampled, layer.strategy);
}

/// Everything backward() needs from one forward call.
template <typename Scalar>
struct LdconvCache {
  Dims<4> input_dims{};
  Tensor4<Scalar> padded;
  Tensor4<Scalar> offsets;
  SampleGrid<Scalar> grid;
  Tensor5<Scalar> sampled;
  Tensor4<Scalar> aggregated;
  // Post stage only.
  Tensor4<Scalar> normalized;
  Tensor4<Scalar> affine;
  std::vector<Scalar> inv_std;
};

template <typename Scalar>
struct LdconvOutput {
  Tensor4<Scalar> y;
  LdconvCache<Scalar> cache;
};

template <typename Scalar>
LdconvOutput<Scalar> forward(const LdconvLayer<Scalar>& layer, const Tensor4<Scalar>& x) {
  layer.validate();
  detail::layer_grid(layer, x.dims());
  LdconvCache<Scalar> cache;
  cache.input_dims = x.dims();
  cache.padded = pad_spatial(x, layer.padding);
  cache.offsets = detail::offset_conv(layer, cache.padded);
  cache.grid = assemble_grid(layer, cache.offsets);
  cache.sampled = bilinear_sample(cache.padded, cache.grid);
  cache.aggregated = aggregate(layer, cache.sampled);
  if (layer.post == PostOp::kNone) {
    Tensor4<Scalar> y = cache.aggregated;
    return {std::move(y), std::move(cache)};
  }

  // Per-channel normalization over (B, H, W), affine, then x * sigmoid(x).
  const auto [B, O, Ho, Wo] = cache.aggregated.dims();
  const Index plane = Ho * Wo;
  const double count = static_cast<double>(B * plane);
  cache.normalized = Tensor4<Scalar>(cache.aggregated.dims());
  cache.affine = Tensor4<Scalar>(cache.aggregated.dims());
  cache.inv_std.assign(static_cast<std::size_t>(O), Scalar(0));
  Tensor4<Scalar> y(cache.aggregated.dims());
  for (Index o = 0; o < O; ++o) {
    double sum = 0, sq = 0;
    for (Index b = 0; b < B; ++b) {
      const Scalar* src = &cache.aggregated(b, o, 0, 0);
      for (Index p = 0; p < plane; ++p) sum += src[p];
    }
    const double mean = sum / count;
    for (Index b = 0; b < B; ++b) {
      const Scalar* src = &cache.aggregated(b, o, 0, 0);
      for (Index p = 0; p < plane; ++p) sq += (src[p] - mean) * (src[p] - mean);
    }
    const Scalar inv_std = static_cast<Scalar>(1.0 / std::sqrt(sq / count + kNormEpsilon));
    cache.inv_std[o] = inv_std;
    for (Index b = 0; b < B; ++b)
      for (Index p = 0; p < plane; ++p) {
        const Index idx = (b * O + o) * plane + p;
        const Scalar xhat = static_cast<Scalar>(cache.aggregated[idx] - mean) * inv_std;
        const Scalar z = layer.norm_scale[o] * xhat + layer.norm_shift[o];
        cache.normalized[idx] = xhat;
        cache.affine[idx] = z;
        y[idx] = z * detail::sigmoid(z);
      }
  }
  return {std::move(y), std::move(cache)};
}

template <typename Scalar>
struct LdconvGrads {
  Tensor4<Scalar> x;
  Tensor4<Scalar> offset_weights;
  std::vector<Scalar> offset_bias;
  Tensor3<Scalar> agg_weights;
  std::vector<Scalar> agg_bias;  // empty when the layer has no bias
  std::vector<Scalar> norm_scale;
  std::vector<Scalar> norm_shift;
};

template <typename Scalar>
LdconvGrads<Scalar> backward(const LdconvLayer<Scalar>& layer, const LdconvCache<Scalar>& cache,
                             const Tensor4<Scalar>& upstream) {
  const auto [B, O, Ho, Wo] = cache.aggregated.dims();
  if (upstream.dims() != cache.aggregated.dims()) {
    throw ShapeError("upstream dims " + dims_to_string(upstream.dims()) + " differ from output " +
                     dims_to_string(cache.aggregated.dims()));
  }
  const Index plane = Ho * Wo;
  const Index N = layer.n, C = layer.c_in;
  LdconvGrads<Scalar> g;

  // Post stage.
  Tensor4<Scalar> d_agg;
  if (layer.post == PostOp::kNone) {
    d_agg = upstream;
  } else {
    d_agg = Tensor4<Scalar>(upstream.dims());
    g.norm_scale.assign(static_cast<std::size_t>(O), Scalar(0));
    g.norm_shift.assign(static_cast<std::size_t>(O), Scalar(0));
    const double count = static_cast<double>(B * plane);
    Tensor4<Scalar> d_hat(upstream.dims());
    for (Index o = 0; o < O; ++o) {
      double sum_dhat = 0, sum_dhat_xhat = 0, d_scale = 0, d_shift = 0;
      for (Index b = 0; b < B; ++b)
        for (Index p = 0; p < plane; ++p) {
          const Index idx = (b * O + o) * plane + p;
          const Scalar z = cache.affine[idx];
          const Scalar s = detail::sigmoid(z);
          const Scalar dz = upstream[idx] * (s + z * s * (1 - s));
          d_scale += dz * cache.normalized[idx];
          d_shift += dz;
          const Scalar dh = dz * layer.norm_scale[o];
          d_hat[idx] = dh;
          sum_dhat += dh;
          sum_dhat_xhat += dh * cache.normalized[idx];
        }
      g.norm_scale[o] = static_cast<Scalar>(d_scale);
      g.norm_shift[o] = static_cast<Scalar>(d_shift);
      const double mean_dhat = sum_dhat / count, mean_dhat_xhat = sum_dhat_xhat / count;
      for (Index b = 0; b < B; ++b)
        for (Index p = 0; p < plane; ++p) {
          const Index idx = (b * O + o) * plane + p;
          d_agg[idx] = static_cast<Scalar>(
              cache.inv_std[o] * (d_hat[idx] - mean_dhat - cache.normalized[idx] * mean_dhat_xhat));
        }
    }
  }

  // Aggregation: one adjoint serves every strategy since all realize the
  // same linear map on the canonical (C_out, C_in*N) weight view.
  const Index K = C * N;
  const auto weights = as_matrix(layer.agg_weights.data(), O, K);
  Tensor5<Scalar> d_sampled(cache.sampled.dims());
  std::vector<RowMatrix<Scalar>> d_w_per_batch(static_cast<std::size_t>(B));
  parallel_for(B, [&](Index b) {
    const auto dy = as_matrix(&d_agg(b, 0, 0, 0), O, plane);
    as_matrix(&d_sampled(b, 0, 0, 0, 0), K, plane).noalias() = weights.transpose() * dy;
    d_w_per_batch[static_cast<std::size_t>(b)].noalias() =
        dy * as_matrix(&cache.sampled(b, 0, 0, 0, 0), K, plane).transpose();
  });
  g.agg_weights = Tensor3<Scalar>(layer.agg_weights.dims());
  auto d_w = as_matrix(g.agg_weights.data(), O, K);
  for (const auto& part : d_w_per_batch) d_w += part;
  if (layer.agg_bias) {
    g.agg_bias.assign(static_cast<std::size_t>(O), Scalar(0));
    for (Index b = 0; b < B; ++b)
      for (Index o = 0; o < O; ++o) {
        const Scalar* src = &d_agg(b, o, 0, 0);
        Scalar acc = 0;
        for (Index p = 0; p < plane; ++p) acc += src[p];
        g.agg_bias[o] += acc;
      }
  }

  // Resampling, then the grid gradient is the offset-field gradient.
  SampleGrads<Scalar> sg = bilinear_backward(cache.padded, cache.grid, d_sampled);
  Tensor4<Scalar> d_offsets({B, 2 * N, Ho, Wo});
  for (Index b = 0; b < B; ++b) {
    std::copy_n(&sg.rows(b, 0, 0, 0), N * plane, &d_offsets(b, 0, 0, 0));
    std::copy_n(&sg.cols(b, 0, 0, 0), N * plane, &d_offsets(b, N, 0, 0));
  }

  // Offset predictor.
  const auto [Bp, Cp, Hp, Wp] = cache.padded.dims();
  const Index Kc = 2 * N;
  Tensor4<Scalar> d_padded = std::move(sg.x);
  const auto off_w = as_matrix(layer.offset_weights.data(), Kc, C * 9);
  std::vector<RowMatrix<Scalar>> d_off_w_per_batch(static_cast<std::size_t>(B));
  parallel_for(B, [&](Index b) {
    const RowMatrix<Scalar> cols =
        detail::im2col(&cache.padded(b, 0, 0, 0), C, Hp, Wp, 3, layer.stride, 1, Ho, Wo);
    const auto d_off = as_matrix(&d_offsets(b, 0, 0, 0), Kc, plane);
    d_off_w_per_batch[static_cast<std::size_t>(b)].noalias() = d_off * cols.transpose();
    const RowMatrix<Scalar> d_cols = off_w.transpose() * d_off;
    detail::col2im(d_cols, &d_padded(b, 0, 0, 0), C, Hp, Wp, 3, layer.stride, 1, Ho, Wo);
  });
  g.offset_weights = Tensor4<Scalar>(layer.offset_weights.dims());
  auto d_off_w = as_matrix(g.offset_weights.data(), Kc, C * 9);
  for (const auto& part : d_off_w_per_batch) d_off_w += part;
  g.offset_bias.assign(static_cast<std::size_t>(Kc), Scalar(0));
  for (Index b = 0; b < B; ++b)
    for (Index k = 0; k < Kc; ++k) {
      const Scalar* src = &d_offsets(b, k, 0, 0);
      Scalar acc = 0;
      for (Index p = 0; p < plane; ++p) acc += src[p];
      g.offset_bias[k] += acc;
    }

  g.x = crop_spatial(d_padded, layer.padding);
  return g;
}

/// 2N*C_in*9 + 2N + C_out*C_in*N (+ C_out with aggregation bias, + 2*C_out
/// for the norm scale/shift of the post stage).
template <typename Scalar>
Index param_count(const LdconvLayer<Scalar>& layer) {
  Index count = 2 * layer.n * layer.c_in * 9 + 2 * layer.n + layer.c_out * layer.c_in * layer.n;
  if (layer.agg_bias) count += layer.c_out;
  if (layer.post == PostOp::kNormAct) count += 2 * layer.c_out;
  return count;
}

/// Operation count per image at output size H_out x W_out:
///   H_out*W_out * (2N*C_in*9      offset-conv MACs
///                  + 8*N*C_in     bilinear ops per sample per channel
///                  + C_out*C_in*N aggregation MACs)
template <typename Scalar>
Index flops_estimate(const LdconvLayer<Scalar>& layer, Index h_in, Index w_in) {
  const BaseGrid grid = base_grid(h_in, w_in, layer.stride, layer.padding);
  const Index per_position = 2 * layer.n * layer.c_in * 9 + 8 * layer.n * layer.c_in +
                             layer.c_out * layer.c_in * layer.n;
  return grid.h_out * grid.w_out * per_position;
}

}  // namespace ldconv
