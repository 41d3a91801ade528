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
#include <string>
#include <vector>

#include "json.hpp"
#include "ldconv/ldconv.hpp"
#include "ldconv/tensor_io.hpp"
#include "ldconv/train.hpp"

namespace ldconv {

/// Layer records: "offset_w" (2N, C_in, 3, 3), "offset_b" (2N, 1, 1, 1),
/// "agg_w" (C_out, C_in, N, 1), "agg_b" (C_out, 1, 1, 1) when biased, and
/// "norm_scale" / "norm_shift" (C_out, 1, 1, 1) with the norm-act post stage.
std::vector<NamedTensor> layer_records(const LdconvLayer<float>& layer, const std::string& prefix = {});

/// Sidecar: {n, c_in, c_out, stride, padding, strategy, post, shape_file?,
/// agg_bias, coords}. coords lets custom shapes reload without the file.
nlohmann::json layer_sidecar(const LdconvLayer<float>& layer);

LdconvLayer<float> layer_from(const std::vector<NamedTensor>& records, const nlohmann::json& sidecar,
                              const std::string& prefix = {});

/// <path> holds the records, <path>.json (extension replaced) the sidecar.
void save_layer_checkpoint(const std::filesystem::path& path, const LdconvLayer<float>& layer);
LdconvLayer<float> load_layer_checkpoint(const std::filesystem::path& path);

/// Layers as "l1." / "l2." prefixed records plus "fc_w" (10, 16, 1, 1) and
/// "fc_b" (10, 1, 1, 1); sidecar {"model": "tinynet", "l1": {...}, "l2": {...}}.
void save_net_checkpoint(const std::filesystem::path& path, const TinyNet& net);
TinyNet load_net_checkpoint(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& path);

}  // namespace ldconv
