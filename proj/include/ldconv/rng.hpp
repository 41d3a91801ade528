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
#include <cstdint>
#include <string_view>

#include "ldconv/errors.hpp"
#include "ldconv/tensor.hpp"

namespace ldconv {

/// Counter-based generator: draw k of stream s under seed is a pure function
/// of (seed, s, k). Named streams are therefore independent of the order in
/// which other streams are consumed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::string_view stream = "default")
      : seed_(seed), key_(mix(seed ^ mix(hash(stream)))) {}

  std::uint64_t seed() const { return seed_; }

  /// A child generator whose key depends only on this key and `name`.
  Rng split(std::string_view name) const {
    Rng child(seed_);
    child.key_ = mix(key_ ^ mix(hash(name) + 0x632be59bd9b4e019ULL));
    return child;
  }

  std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi) after rounding to Scalar.
  template <typename Scalar>
  Scalar uniform(Scalar lo, Scalar hi) {
    Scalar v = static_cast<Scalar>(static_cast<double>(lo) +
                                   (static_cast<double>(hi) - lo) * next_unit());
    if (v >= hi) v = std::nextafter(hi, lo);
    if (v < lo) v = lo;
    return v;
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  static std::uint64_t hash(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
    return h;
  }

  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

template <typename Scalar = float, std::size_t Rank = 4>
Tensor<Scalar, Rank> rand_uniform(const Dims<Rank>& dims, Rng& rng, Scalar lo,
                                  Scalar hi) {
  if (!(lo < hi)) throw InvalidRange("rand_uniform requires lo < hi");
  Tensor<Scalar, Rank> t(dims);
  for (auto& v : t.storage()) v = rng.uniform(lo, hi);
  return t;
}

}  // namespace ldconv
