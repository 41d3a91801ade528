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

#include <cstdlib>
#include <limits>

#include "doctest.h"
#include "ldconv/gradcheck.hpp"
#include "ldconv/rng.hpp"
#include "ldconv/sampler.hpp"

using namespace ldconv;

namespace {

SampleGrid<float> single_point(float r, float c) {
  return {Tensor4<float>({1, 1, 1, 1}, std::vector<float>{r}),
          Tensor4<float>({1, 1, 1, 1}, std::vector<float>{c})};
}

Tensor4<float> ramp(Index h, Index w) {
  Tensor4<float> x({1, 1, h, w});
  for (Index i = 0; i < x.size(); ++i) x[i] = static_cast<float>(i * i % 7) + 0.5f * i;
  return x;
}

}  // namespace

TEST_CASE("bilinear_sample examples") {
  const auto x = ramp(4, 5);
  CHECK(bilinear_sample(x, single_point(2, 3))[0] == x(0, 0, 2, 3));

  const Tensor4<float> quad({1, 1, 2, 2}, std::vector<float>{0, 1, 2, 3});
  CHECK(bilinear_sample(quad, single_point(0.5f, 0.5f))[0] == 1.5f);

  CHECK(bilinear_sample(x, single_point(-1.0f, 0.0f))[0] == x(0, 0, 0, 0));
  CHECK(bilinear_sample(x, single_point(9.0f, 7.5f))[0] == x(0, 0, 3, 4));

  const Tensor4<float> line({1, 1, 1, 3}, std::vector<float>{0, 10, 20});
  CHECK(bilinear_sample(line, single_point(0.0f, 1.25f))[0] == doctest::Approx(12.5f));
}

TEST_CASE("bilinear_sample output layout (B, C, N, H_out, W_out)") {
  Rng rng(2);
  const auto x = rand_uniform<float>({2, 3, 5, 5}, rng, -1.0f, 1.0f);
  const auto rows = rand_uniform<float>({2, 4, 2, 3}, rng, 0.0f, 4.0f);
  const auto cols = rand_uniform<float>({2, 4, 2, 3}, rng, 0.0f, 4.0f);
  const auto s = bilinear_sample(x, SampleGrid<float>(rows, cols));
  CHECK(s.dims() == Dims<5>{2, 3, 4, 2, 3});
  // Same coordinates give the same weights on every channel.
  Tensor4<float> y = x;
  for (Index i = 0; i < y.size(); ++i) y[i] = 2.0f;
  const auto t = bilinear_sample(y, SampleGrid<float>(rows, cols));
  for (Index i = 0; i < t.size(); ++i) CHECK(t[i] == doctest::Approx(2.0f));
}

TEST_CASE("grid construction and shape errors") {
  const float nan = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(single_point(nan, 0.0f), InvalidCoordinate);
  CHECK_THROWS_AS(single_point(0.0f, nan), InvalidCoordinate);
  const Tensor4<float> x({2, 1, 3, 3});
  CHECK_THROWS_AS(bilinear_sample(x, single_point(0, 0)), ShapeError);
  CHECK_THROWS_AS(bilinear_backward(x, single_point(0, 0), Tensor5<float>({1, 1, 1, 1, 1})), ShapeError);
  const Tensor4<float> one({1, 1, 3, 3});
  CHECK_THROWS_AS(bilinear_backward(one, single_point(0, 0), Tensor5<float>({1, 2, 1, 1, 1})), ShapeError);
}

// The corner weights sum to 1 in exact arithmetic; in floating point the
// four-term sum is within a few ulps.
TEST_CASE("partition of unity: constant maps sample to the constant") {
  Rng rng(4);
  const Tensor4<double> x({1, 1, 6, 7}, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double r = rng.uniform(0.0, 5.0), c = rng.uniform(0.0, 6.0);
    const SampleGrid<double> g(Tensor4<double>({1, 1, 1, 1}, std::vector<double>{r}),
                               Tensor4<double>({1, 1, 1, 1}, std::vector<double>{c}));
    CHECK(std::abs(bilinear_sample(x, g)[0] - 1.0) <= 4 * std::numeric_limits<double>::epsilon());
  }
}

TEST_CASE("sampling is linear in x") {
  Rng rng(6);
  const auto x = rand_uniform<float>({2, 3, 6, 6}, rng, -1.0f, 1.0f);
  const auto y = rand_uniform<float>({2, 3, 6, 6}, rng, -1.0f, 1.0f);
  const SampleGrid<float> g(rand_uniform<float>({2, 5, 4, 4}, rng, -1.0f, 6.0f),
                            rand_uniform<float>({2, 5, 4, 4}, rng, -1.0f, 6.0f));
  const float a = 0.7f, b = -1.3f;
  const auto lhs = bilinear_sample(a * x + b * y, g);
  const auto rhs = a * bilinear_sample(x, g) + b * bilinear_sample(y, g);
  for (Index i = 0; i < lhs.size(); ++i) CHECK(std::abs(lhs[i] - rhs[i]) <= 1e-5f);
}

TEST_CASE("bilinear_backward: zero upstream gives zero gradients") {
  Rng rng(8);
  const auto x = rand_uniform<float>({1, 2, 4, 4}, rng, -1.0f, 1.0f);
  const SampleGrid<float> g(rand_uniform<float>({1, 3, 2, 2}, rng, 0.0f, 3.0f),
                            rand_uniform<float>({1, 3, 2, 2}, rng, 0.0f, 3.0f));
  const auto grads = bilinear_backward(x, g, Tensor5<float>({1, 2, 3, 2, 2}));
  CHECK(max_abs(grads.x) == 0.0f);
  CHECK(max_abs(grads.rows) == 0.0f);
  CHECK(max_abs(grads.cols) == 0.0f);
}

TEST_CASE("bilinear_backward at an interior lattice point uses the floor cell") {
  const auto x = ramp(4, 5);
  const auto grads = bilinear_backward(x, single_point(1, 2), Tensor5<float>({1, 1, 1, 1, 1}, 1.0f));
  for (Index i = 0; i < x.size(); ++i) CHECK(grads.x[i] == (i == x.offset(0, 0, 1, 2) ? 1.0f : 0.0f));
  CHECK(grads.rows[0] == x(0, 0, 2, 2) - x(0, 0, 1, 2));
  CHECK(grads.cols[0] == x(0, 0, 1, 3) - x(0, 0, 1, 2));
}

TEST_CASE("bilinear_backward is flat in the clamped region") {
  const auto x = ramp(4, 5);
  const auto below = bilinear_backward(x, single_point(-0.5f, 1.5f), Tensor5<float>({1, 1, 1, 1, 1}, 1.0f));
  CHECK(below.rows[0] == 0.0f);
  CHECK(below.cols[0] != 0.0f);
  const auto right = bilinear_backward(x, single_point(1.5f, 4.5f), Tensor5<float>({1, 1, 1, 1, 1}, 1.0f));
  CHECK(right.cols[0] == 0.0f);
  CHECK(right.rows[0] != 0.0f);
}

TEST_CASE("bilinear gradients match central differences (double)") {
  Rng dims_rng(10);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GradCheckOptions opt;
    opt.seed = seed;
    opt.n = 1 + static_cast<Index>(dims_rng.below(5));
    opt.dims = {1 + static_cast<Index>(dims_rng.below(2)), 1 + static_cast<Index>(dims_rng.below(3)),
                3 + static_cast<Index>(dims_rng.below(4)), 3 + static_cast<Index>(dims_rng.below(4))};
    const auto res = check_sampler_gradients<double>(opt);
    INFO("seed " << seed << " dims " << dims_to_string(opt.dims) << " n " << opt.n);
    for (const auto& g : res.groups) {
      INFO(g.name);
      CHECK(g.max_rel_error < 1e-6);
    }
  }
}

TEST_CASE("sabotaged sampler gradient is caught") {
  GradCheckOptions opt;
  opt.sabotage = true;
  CHECK_FALSE(check_sampler_gradients<double>(opt).passed);
}

TEST_CASE("results do not depend on the worker count") {
  Rng rng(12);
  const auto x = rand_uniform<float>({5, 3, 6, 6}, rng, -1.0f, 1.0f);
  const SampleGrid<float> g(rand_uniform<float>({5, 4, 4, 4}, rng, -1.0f, 6.0f),
                            rand_uniform<float>({5, 4, 4, 4}, rng, -1.0f, 6.0f));
  const auto up = rand_uniform<float, 5>({5, 3, 4, 4, 4}, rng, -1.0f, 1.0f);
  ::setenv("LDCONV_THREADS", "1", 1);
  const auto s1 = bilinear_sample(x, g);
  const auto g1 = bilinear_backward(x, g, up);
  ::setenv("LDCONV_THREADS", "3", 1);
  const auto s3 = bilinear_sample(x, g);
  const auto g3 = bilinear_backward(x, g, up);
  ::unsetenv("LDCONV_THREADS");
  CHECK(s1 == s3);
  CHECK(g1.x == g3.x);
  CHECK(g1.rows == g3.rows);
  CHECK(g1.cols == g3.cols);
}
