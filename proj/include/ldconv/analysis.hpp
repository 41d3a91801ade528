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

#include <string>
#include <vector>

#include "ldconv/tensor.hpp"
#include "ldconv/train.hpp"

namespace ldconv {

/// Average Offset of an offset field (B, 2N, H, W): the mean absolute value
/// over the 2N channels at every position, plus batch and spatial reductions.
struct AoReport {
  std::string shape_id;
  Tensor3<double> per_position;     // (B, H, W)
  Tensor<double, 2> batch_mean;     // (H, W), mean over the batch
  std::vector<double> per_sample;   // B, spatial mean of per_position
  double mean = 0.0;                // over all (b, i, j)
  double std = 0.0;                 // population standard deviation
};

/// Channel values are sorted by magnitude before summing, so the result is
/// bitwise invariant under any permutation of the 2N channels.
AoReport average_offset(const Tensor4<float>& offsets, std::string shape_id = {});

struct GrowthRow {
  Index n = 0;
  Index params = 0;
  Index flops = 0;
  std::optional<Index> delta_params;  // absent on the first row
  Index std_conv_params = 0;          // C_out * C_in * k^2, k = ceil(sqrt(n))
};

/// One row per n in n_range (non-empty, strictly ascending). FLOPs are for an
/// h x w input at stride 1 without padding.
std::vector<GrowthRow> growth_audit(Index c_in, Index c_out, const std::vector<Index>& n_range,
                                    bool agg_bias = true, Index h = 32, Index w = 32);

/// Smallest k with k * k >= n.
Index ceil_sqrt(Index n);

struct ShapeCheckpoint {
  std::string id;
  TinyNet net;
};

/// Offsets of the last LDConv layer on `probe`, one report per checkpoint.
/// Layers must agree in N, channels, stride and padding.
std::vector<AoReport> shape_ao_compare(const std::vector<ShapeCheckpoint>& checkpoints,
                                       const Tensor4<float>& probe);

/// "b,i,j,ao" rows with round-trip precision.
std::string ao_csv(const AoReport& report);
std::string growth_csv(const std::vector<GrowthRow>& rows);

}  // namespace ldconv
