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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ldconv/eigen_util.hpp"
#include "ldconv/ldconv.hpp"
#include "ldconv/tensor.hpp"

namespace ldconv {

struct Dataset {
  Tensor4<float> images;  // (M, 1, 28, 28), values in [0, 1]
  std::vector<int> labels;

  Index size() const { return static_cast<Index>(labels.size()); }
  /// Copies samples [begin, begin + count).
  Dataset slice(Index begin, Index count) const;
};

/// IDX pair: big-endian u32 magic 0x00000803 / 0x00000801, big-endian u32
/// dims, then raw u8 payload. Pixels are scaled by 1/255.
Dataset parse_idx(std::string_view image_bytes, std::string_view label_bytes);
Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path);

/// Axis-aligned bar images, four classes: 0 one horizontal bar, 1 one
/// vertical bar, 2 a horizontal and a vertical bar, 3 two horizontal bars.
Dataset synthetic_bars(Index count, std::uint64_t seed, std::string_view stream = "train");

inline constexpr Index kNetClasses = 10;
inline constexpr Index kNetWidth1 = 8;
inline constexpr Index kNetWidth2 = 16;

struct TinyNetConfig {
  Index n1 = 5;
  Index n2 = 5;
  Strategy strategy = Strategy::kChannelStack;
  PostOp post = PostOp::kNormAct;
  /// Initial geometries; default generator shapes when absent.
  std::optional<KernelGeometry> geometry1;
  std::optional<KernelGeometry> geometry2;
  std::string shape_file;
};

/// LDConv(1->8, stride 2) -> LDConv(8->16, stride 2) -> global average pool
/// -> linear(16->10). Each LDConv ends in its post stage, whose x*sigmoid(x)
/// is the network's activation.
struct TinyNet {
  LdconvLayer<float> l1;
  LdconvLayer<float> l2;
  RowMatrix<float> fc_w;  // (10, 16)
  Eigen::VectorXf fc_b;   // 10

  Index param_count() const;
  void set_strategy(Strategy s) {
    l1.strategy = s;
    l2.strategy = s;
  }
};

TinyNet make_tiny_net(const TinyNetConfig& cfg, std::uint64_t seed);

struct NetForward {
  LdconvOutput<float> h1;
  LdconvOutput<float> h2;
  RowMatrix<float> pooled;  // (B, 16)
  RowMatrix<float> logits;  // (B, 10)
};

NetForward net_forward(const TinyNet& net, const Tensor4<float>& images);

struct NetGrads {
  LdconvGrads<float> l1;
  LdconvGrads<float> l2;
  RowMatrix<float> fc_w;
  Eigen::VectorXf fc_b;
};

/// Mean softmax cross-entropy (max-subtracted) and its gradients.
double cross_entropy(const RowMatrix<float>& logits, std::span<const int> labels,
                     RowMatrix<float>* d_logits = nullptr);
NetGrads net_backward(const TinyNet& net, const NetForward& fwd, const RowMatrix<float>& d_logits);
void sgd_step(TinyNet& net, const NetGrads& g, float lr);

/// Argmax with ties to the lowest class index.
std::vector<int> predict(const RowMatrix<float>& logits);
double accuracy(const RowMatrix<float>& logits, std::span<const int> labels);

inline constexpr Index kEvalBatch = 128;

/// Fraction of correct argmax predictions, in batches of kEvalBatch.
double evaluate(const TinyNet& net, const Dataset& data);
/// Sample-weighted mean cross-entropy, in batches of kEvalBatch.
double evaluate_loss(const TinyNet& net, const Dataset& data);

struct TrainConfig {
  Index epochs = 10;
  Index batch = 32;
  float lr = 0.05f;
  std::uint64_t seed = 0;
  /// Number of training samples to use; 0 means all.
  Index subset = 0;
};

struct TrainResult {
  std::vector<double> loss;  // per-epoch mean
  std::vector<double> acc;   // per-epoch running train accuracy
  double train_acc = 0.0;    // evaluate() on the training subset after the last epoch
  double train_loss = 0.0;   // evaluate_loss() on the training subset after the last epoch
  std::optional<double> heldout_acc;
  double final_acc = 0.0;    // same as train_acc; held-out accuracy is reported separately
  Index param_count = 0;
  /// Offset fields of both layers on the probe batch, for AO analysis.
  Tensor4<float> offsets1;
  Tensor4<float> offsets2;
};

/// Mini-batch SGD on softmax cross-entropy. The probe batch for offset
/// capture is the first images of `heldout` (or of the training subset).
TrainResult train(TinyNet& net, const Dataset& data, const TrainConfig& cfg,
                  const Dataset* heldout = nullptr, Index probe_count = 4);

}  // namespace ldconv
