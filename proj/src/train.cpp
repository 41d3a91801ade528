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

#include "ldconv/train.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>

#include "ldconv/errors.hpp"
#include "ldconv/rng.hpp"

namespace ldconv {
namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;
constexpr Index kSide = 28;

std::uint32_t read_be32(std::string_view bytes, std::size_t pos) {
  if (pos + 4 > bytes.size()) throw LengthError("IDX header truncated");
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < 4; ++i) v = (v << 8) | static_cast<unsigned char>(bytes[pos + i]);
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(f), {}};
}

void draw_bar(Tensor4<float>& img, Index m, Rng& rng, bool horizontal, Index lane_lo, Index lane_hi) {
  const Index thickness = 2 + static_cast<Index>(rng.below(2));
  const Index length = 12 + static_cast<Index>(rng.below(13));
  const Index lane = lane_lo + static_cast<Index>(rng.below(static_cast<std::uint64_t>(
                                   std::max<Index>(1, lane_hi - lane_lo - thickness + 1))));
  const Index start = static_cast<Index>(rng.below(static_cast<std::uint64_t>(kSide - length + 1)));
  const float intensity = rng.uniform(0.7f, 1.0f);
  for (Index a = lane; a < lane + thickness; ++a)
    for (Index b = start; b < start + length; ++b) {
      float& px = horizontal ? img(m, 0, a, b) : img(m, 0, b, a);
      px = std::max(px, intensity);
    }
}

}  // namespace

Dataset Dataset::slice(Index begin, Index count) const {
  if (begin < 0 || count < 0 || begin + count > size()) throw InvalidArgument("dataset slice out of range");
  const Index per = images.stride0();
  Dataset out;
  out.images = Tensor4<float>({count, images.dim(1), images.dim(2), images.dim(3)});
  std::copy_n(images.data() + begin * per, count * per, out.images.data());
  out.labels.assign(labels.begin() + begin, labels.begin() + begin + count);
  return out;
}

Dataset parse_idx(std::string_view image_bytes, std::string_view label_bytes) {
  if (read_be32(image_bytes, 0) != kImageMagic) throw FormatError("bad IDX image magic");
  if (read_be32(label_bytes, 0) != kLabelMagic) throw FormatError("bad IDX label magic");
  const Index m = read_be32(image_bytes, 4);
  const Index rows = read_be32(image_bytes, 8);
  const Index cols = read_be32(image_bytes, 12);
  const Index labels = read_be32(label_bytes, 4);
  const std::size_t image_payload = static_cast<std::size_t>(m * rows * cols);
  if (image_bytes.size() < 16 + image_payload) throw LengthError("IDX image payload truncated");
  if (label_bytes.size() < 8 + static_cast<std::size_t>(labels)) throw LengthError("IDX label payload truncated");
  if (labels != m) {
    throw DatasetError("IDX has " + std::to_string(m) + " images but " + std::to_string(labels) + " labels");
  }
  Dataset d;
  d.images = Tensor4<float>({m, 1, rows, cols});
  for (std::size_t i = 0; i < image_payload; ++i)
    d.images[static_cast<Index>(i)] = static_cast<unsigned char>(image_bytes[16 + i]) / 255.0f;
  d.labels.resize(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    d.labels[static_cast<std::size_t>(i)] = static_cast<unsigned char>(label_bytes[8 + i]);
    if (d.labels[static_cast<std::size_t>(i)] >= kNetClasses) throw DatasetError("IDX label out of range");
  }
  return d;
}

Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path) {
  return parse_idx(read_file(images_path), read_file(labels_path));
}

Dataset synthetic_bars(Index count, std::uint64_t seed, std::string_view stream) {
  Dataset d;
  d.images = Tensor4<float>({count, 1, kSide, kSide});
  d.labels.resize(static_cast<std::size_t>(count));
  const Rng root(seed, stream);
  for (Index m = 0; m < count; ++m) {
    Rng rng = root.split(std::to_string(m));
    const int label = static_cast<int>(rng.below(4));
    d.labels[static_cast<std::size_t>(m)] = label;
    for (Index p = 0; p < kSide * kSide; ++p) d.images[m * kSide * kSide + p] = rng.uniform(0.0f, 0.1f);
    switch (label) {
      case 0:
        draw_bar(d.images, m, rng, true, 0, kSide);
        break;
      case 1:
        draw_bar(d.images, m, rng, false, 0, kSide);
        break;
      case 2:
        draw_bar(d.images, m, rng, true, 0, kSide);
        draw_bar(d.images, m, rng, false, 0, kSide);
        break;
      default:
        // Upper and lower halves keep the two bars apart.
        draw_bar(d.images, m, rng, true, 0, kSide / 2 - 2);
        draw_bar(d.images, m, rng, true, kSide / 2 + 2, kSide);
        break;
    }
  }
  return d;
}

Index TinyNet::param_count() const {
  return ldconv::param_count(l1) + ldconv::param_count(l2) + fc_w.size() + fc_b.size();
}

TinyNet make_tiny_net(const TinyNetConfig& cfg, std::uint64_t seed) {
  const Rng root(seed, "tinynet");
  LdconvConfig c1{.n = cfg.n1, .c_in = 1, .c_out = kNetWidth1, .stride = 2, .padding = 0,
                  .agg_bias = true, .strategy = cfg.strategy, .post = cfg.post,
                  .geometry = cfg.geometry1, .shape_file = cfg.shape_file};
  LdconvConfig c2 = c1;
  c2.n = cfg.n2;
  c2.c_in = kNetWidth1;
  c2.c_out = kNetWidth2;
  c2.geometry = cfg.geometry2;
  Rng r1 = root.split("l1"), r2 = root.split("l2"), rf = root.split("fc");
  TinyNet net{make_layer<float>(c1, r1), make_layer<float>(c2, r2), RowMatrix<float>(kNetClasses, kNetWidth2),
              Eigen::VectorXf::Zero(kNetClasses)};
  const float bound = 1.0f / std::sqrt(static_cast<float>(kNetWidth2));
  for (Index i = 0; i < net.fc_w.size(); ++i) net.fc_w.data()[i] = rf.uniform(-bound, bound);
  return net;
}

NetForward net_forward(const TinyNet& net, const Tensor4<float>& images) {
  NetForward f{forward(net.l1, images), {}, {}, {}};
  f.h2 = forward(net.l2, f.h1.y);
  const auto [B, C, H, W] = f.h2.y.dims();
  f.pooled = RowMatrix<float>(B, C);
  const Index plane = H * W;
  for (Index b = 0; b < B; ++b)
    for (Index c = 0; c < C; ++c) {
      const float* src = &f.h2.y(b, c, 0, 0);
      float acc = 0.0f;
      for (Index p = 0; p < plane; ++p) acc += src[p];
      f.pooled(b, c) = acc / static_cast<float>(plane);
    }
  f.logits = f.pooled * net.fc_w.transpose();
  f.logits.rowwise() += net.fc_b.transpose();
  return f;
}

double cross_entropy(const RowMatrix<float>& logits, std::span<const int> labels, RowMatrix<float>* d_logits) {
  const Index B = logits.rows(), K = logits.cols();
  if (static_cast<Index>(labels.size()) != B) throw ShapeError("labels do not match logits rows");
  if (d_logits) d_logits->resize(B, K);
  double total = 0.0;
  for (Index b = 0; b < B; ++b) {
    const double peak = logits.row(b).maxCoeff();
    double z = 0.0;
    for (Index k = 0; k < K; ++k) z += std::exp(static_cast<double>(logits(b, k)) - peak);
    const int y = labels[static_cast<std::size_t>(b)];
    total += std::log(z) - (logits(b, y) - peak);
    if (d_logits)
      for (Index k = 0; k < K; ++k) {
        const double p = std::exp(static_cast<double>(logits(b, k)) - peak) / z;
        (*d_logits)(b, k) = static_cast<float>((p - (k == y ? 1.0 : 0.0)) / static_cast<double>(B));
      }
  }
  return total / static_cast<double>(B);
}

NetGrads net_backward(const TinyNet& net, const NetForward& f, const RowMatrix<float>& d_logits) {
  NetGrads g;
  g.fc_w = d_logits.transpose() * f.pooled;
  g.fc_b = d_logits.colwise().sum().transpose();
  const RowMatrix<float> d_pooled = d_logits * net.fc_w;
  Tensor4<float> d_h2(f.h2.y.dims());
  const auto [B, C, H, W] = d_h2.dims();
  const Index plane = H * W;
  for (Index b = 0; b < B; ++b)
    for (Index c = 0; c < C; ++c)
      std::fill_n(&d_h2(b, c, 0, 0), plane, d_pooled(b, c) / static_cast<float>(plane));
  g.l2 = backward(net.l2, f.h2.cache, d_h2);
  g.l1 = backward(net.l1, f.h1.cache, g.l2.x);
  return g;
}

namespace {

template <typename Container>
void descend(Container& param, const Container& grad, float lr) {
  for (std::size_t i = 0; i < param.size(); ++i) param[i] -= lr * grad[i];
}

void descend_layer(LdconvLayer<float>& l, const LdconvGrads<float>& g, float lr) {
  descend(l.offset_weights.storage(), g.offset_weights.storage(), lr);
  descend(l.offset_bias, g.offset_bias, lr);
  descend(l.agg_weights.storage(), g.agg_weights.storage(), lr);
  if (l.agg_bias) descend(*l.agg_bias, g.agg_bias, lr);
  if (l.post == PostOp::kNormAct) {
    descend(l.norm_scale, g.norm_scale, lr);
    descend(l.norm_shift, g.norm_shift, lr);
  }
}

}  // namespace

void sgd_step(TinyNet& net, const NetGrads& g, float lr) {
  descend_layer(net.l1, g.l1, lr);
  descend_layer(net.l2, g.l2, lr);
  net.fc_w -= lr * g.fc_w;
  net.fc_b -= lr * g.fc_b;
}

std::vector<int> predict(const RowMatrix<float>& logits) {
  std::vector<int> out(static_cast<std::size_t>(logits.rows()));
  for (Index b = 0; b < logits.rows(); ++b) {
    int best = 0;
    for (Index k = 1; k < logits.cols(); ++k)
      if (logits(b, k) > logits(b, best)) best = static_cast<int>(k);
    out[static_cast<std::size_t>(b)] = best;
  }
  return out;
}

double accuracy(const RowMatrix<float>& logits, std::span<const int> labels) {
  if (labels.empty()) throw InvalidArgument("accuracy of an empty batch");
  const auto pred = predict(logits);
  Index hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += pred[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

double evaluate(const TinyNet& net, const Dataset& data) {
  if (data.size() == 0) throw InvalidArgument("cannot evaluate on an empty dataset");
  Index hits = 0;
  for (Index begin = 0; begin < data.size(); begin += kEvalBatch) {
    const Index count = std::min(kEvalBatch, data.size() - begin);
    const Dataset batch = data.slice(begin, count);
    const auto pred = predict(net_forward(net, batch.images).logits);
    for (Index i = 0; i < count; ++i) hits += pred[static_cast<std::size_t>(i)] == batch.labels[static_cast<std::size_t>(i)];
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

double evaluate_loss(const TinyNet& net, const Dataset& data) {
  if (data.size() == 0) throw InvalidArgument("cannot evaluate on an empty dataset");
  double total = 0.0;
  for (Index begin = 0; begin < data.size(); begin += kEvalBatch) {
    const Index count = std::min(kEvalBatch, data.size() - begin);
    const Dataset batch = data.slice(begin, count);
    total += cross_entropy(net_forward(net, batch.images).logits, batch.labels) * static_cast<double>(count);
  }
  return total / static_cast<double>(data.size());
}

TrainResult train(TinyNet& net, const Dataset& data, const TrainConfig& cfg, const Dataset* heldout,
                  Index probe_count) {
  if (!(cfg.lr >= 0.0f)) throw InvalidArgument("learning rate must be non-negative");
  if (cfg.batch < 1) throw InvalidArgument("batch size must be >= 1");
  if (cfg.epochs < 1) throw InvalidArgument("epochs must be >= 1");
  const Index m = cfg.subset > 0 ? cfg.subset : data.size();
  if (m > data.size()) {
    throw InvalidArgument("subset " + std::to_string(m) + " exceeds dataset size " + std::to_string(data.size()));
  }
  if (m == 0) throw InvalidArgument("cannot train on an empty dataset");
  const Dataset train_set = data.slice(0, m);
  const Index per = train_set.images.stride0();

  TrainResult res;
  std::vector<Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  const Rng shuffle_root(cfg.seed, "shuffle");
  for (Index epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle = shuffle_root.split(std::to_string(epoch));
    for (Index i = m - 1; i > 0; --i)
      std::swap(order[static_cast<std::size_t>(i)],
                order[static_cast<std::size_t>(shuffle.below(static_cast<std::uint64_t>(i + 1)))]);

    double loss_sum = 0.0;
    Index hits = 0, batch_no = 0;
    for (Index begin = 0; begin < m; begin += cfg.batch, ++batch_no) {
      const Index count = std::min(cfg.batch, m - begin);
      Tensor4<float> images({count, 1, train_set.images.dim(2), train_set.images.dim(3)});
      std::vector<int> labels(static_cast<std::size_t>(count));
      for (Index k = 0; k < count; ++k) {
        const Index src = order[static_cast<std::size_t>(begin + k)];
        std::copy_n(train_set.images.data() + src * per, per, images.data() + k * per);
        labels[static_cast<std::size_t>(k)] = train_set.labels[static_cast<std::size_t>(src)];
      }
      const std::string where = "epoch " + std::to_string(epoch + 1) + ", batch " + std::to_string(batch_no + 1);
      NetForward f;
      try {
        f = net_forward(net, images);
      } catch (const InvalidCoordinate&) {
        // NaN offsets: the predictor weights or inputs have blown up.
        throw DivergenceError("non-finite sampling offsets at " + where);
      }
      RowMatrix<float> d_logits;
      const double loss = cross_entropy(f.logits, labels, &d_logits);
      if (!std::isfinite(loss)) throw DivergenceError("non-finite loss at " + where);
      loss_sum += loss * static_cast<double>(count);
      const auto pred = predict(f.logits);
      for (Index k = 0; k < count; ++k) hits += pred[static_cast<std::size_t>(k)] == labels[static_cast<std::size_t>(k)];
      if (cfg.lr > 0.0f) sgd_step(net, net_backward(net, f, d_logits), cfg.lr);
    }
    res.loss.push_back(loss_sum / static_cast<double>(m));
    res.acc.push_back(static_cast<double>(hits) / static_cast<double>(m));
  }

  res.train_acc = evaluate(net, train_set);
  res.train_loss = evaluate_loss(net, train_set);
  if (heldout && heldout->size() > 0) res.heldout_acc = evaluate(net, *heldout);
  res.final_acc = res.train_acc;
  res.param_count = net.param_count();

  const Dataset& probe_src = heldout && heldout->size() > 0 ? *heldout : train_set;
  const Dataset probe = probe_src.slice(0, std::min(probe_count, probe_src.size()));
  const NetForward f = net_forward(net, probe.images);
  res.offsets1 = f.h1.cache.offsets;
  res.offsets2 = f.h2.cache.offsets;
  return res;
}

}  // namespace ldconv
