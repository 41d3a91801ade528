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
#include <string_view>
#include <vector>

#include "ldconv/tensor.hpp"

namespace ldconv {

struct NamedTensor {
  std::string name;
  Tensor4<float> tensor;
};

/// Binary tensor container.
///
/// One tensor: "LDT1", u32 rank (= 4), four u32 dims, then B*C*H*W f32,
/// everything little-endian. A file is a concatenation of records, each
/// being a u16 name length, the UTF-8 name, then one tensor.
std::string encode_tensor(const Tensor4<float>& t);
Tensor4<float> decode_tensor(std::string_view bytes, std::size_t& pos);

std::string encode_container(const std::vector<NamedTensor>& records);
std::vector<NamedTensor> decode_container(std::string_view bytes);

void save_container(const std::filesystem::path& path,
                    const std::vector<NamedTensor>& records);
std::vector<NamedTensor> load_container(const std::filesystem::path& path);

/// Looks up `name`; throws FormatError when it is absent.
const Tensor4<float>& find_record(const std::vector<NamedTensor>& records,
                                  std::string_view name);

}  // namespace ldconv
