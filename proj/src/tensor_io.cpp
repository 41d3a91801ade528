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

#include "ldconv/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "ldconv/errors.hpp"

namespace ldconv {
namespace {

constexpr std::string_view kMagic = "LDT1";

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void need(std::string_view bytes, std::size_t pos, std::size_t n) {
  if (pos + n > bytes.size()) throw LengthError("tensor container truncated");
}

std::uint32_t get_u32(std::string_view bytes, std::size_t& pos) {
  need(bytes, pos, 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
  }
  pos += 4;
  return v;
}

std::uint16_t get_u16(std::string_view bytes, std::size_t& pos) {
  need(bytes, pos, 2);
  const auto lo = static_cast<unsigned char>(bytes[pos]);
  const auto hi = static_cast<unsigned char>(bytes[pos + 1]);
  pos += 2;
  return static_cast<std::uint16_t>(lo | (hi << 8));
}

}  // namespace

std::string encode_tensor(const Tensor4<float>& t) {
  std::string out(kMagic);
  put_u32(out, 4);
  for (Index d : t.dims()) put_u32(out, static_cast<std::uint32_t>(d));
  for (float v : t.storage()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Tensor4<float> decode_tensor(std::string_view bytes, std::size_t& pos) {
  need(bytes, pos, kMagic.size());
  if (bytes.substr(pos, kMagic.size()) != kMagic) throw FormatError("bad tensor magic");
  pos += kMagic.size();
  const std::uint32_t rank = get_u32(bytes, pos);
  if (rank != 4) throw FormatError("unsupported tensor rank " + std::to_string(rank));
  Dims<4> dims{};
  for (auto& d : dims) d = get_u32(bytes, pos);
  Tensor4<float> t(dims);
  need(bytes, pos, static_cast<std::size_t>(t.size()) * 4);
  for (auto& v : t.storage()) v = std::bit_cast<float>(get_u32(bytes, pos));
  return t;
}

std::string encode_container(const std::vector<NamedTensor>& records) {
  std::string out;
  for (const auto& r : records) {
    if (r.name.size() > 0xffff) throw InvalidArgument("record name too long");
    put_u16(out, static_cast<std::uint16_t>(r.name.size()));
    out += r.name;
    out += encode_tensor(r.tensor);
  }
  return out;
}

std::vector<NamedTensor> decode_container(std::string_view bytes) {
  std::vector<NamedTensor> records;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const std::uint16_t len = get_u16(bytes, pos);
    need(bytes, pos, len);
    std::string name(bytes.substr(pos, len));
    pos += len;
    records.push_back({std::move(name), decode_tensor(bytes, pos)});
  }
  return records;
}

void save_container(const std::filesystem::path& path,
                    const std::vector<NamedTensor>& records) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot open " + path.string() + " for writing");
  const std::string bytes = encode_container(records);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::vector<NamedTensor> load_container(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot open " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(f), {}};
  return decode_container(bytes);
}

const Tensor4<float>& find_record(const std::vector<NamedTensor>& records,
                                  std::string_view name) {
  for (const auto& r : records)
    if (r.name == name) return r.tensor;
  throw FormatError("missing record '" + std::string(name) + "'");
}

}  // namespace ldconv
