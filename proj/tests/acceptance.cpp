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


// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only when
// all criteria hold within their time limits.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <string>
#include <sys/wait.h>

#include "ldconv/analysis.hpp"
#include "ldconv/gradcheck.hpp"
#include "ldconv/ldconv.hpp"
#include "ldconv/reference_conv.hpp"
#include "ldconv/rng.hpp"
#include "ldconv/svg.hpp"
#include "ldconv/train.hpp"
#include "oracles/initial_coords_oracle.hpp"

namespace fs = std::filesystem;
using namespace ldconv;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < limit_s;
  const bool pass = out.ok && in_time;
  if (!pass) ++failures;
  std::printf("[%s] %d %s: %s (%.2f s, limit %.0f s%s)\n", pass ? "PASS" : "FAIL", id, name, out.detail.c_str(), secs,
              limit_s, in_time ? "" : ", exceeded");
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

LdconvLayer<float> random_layer(Rng& rng, Index n, Index c_in, Index c_out, Index stride, Index padding, bool offsets) {
  LdconvConfig cfg;
  cfg.n = n;
  cfg.c_in = c_in;
  cfg.c_out = c_out;
  cfg.stride = stride;
  cfg.padding = padding;
  LdconvLayer<float> l = make_layer<float>(cfg, rng);
  if (offsets) {
    l.offset_weights = rand_uniform<float>(l.offset_weights.dims(), rng, -0.1f, 0.1f);
    for (auto& b : l.offset_bias) b = rng.uniform(-1.5f, 1.5f);
  }
  return l;
}

Outcome coords_oracle() {
  for (Index n = 1; n <= 64; ++n) {
    const auto p = oracle::get_p_n(n);
    const KernelGeometry g = gen_initial_coords(n);
    if (static_cast<Index>(p.size()) != 2 * n) return {false, "oracle size mismatch at n=" + std::to_string(n)};
    for (Index k = 0; k < n; ++k)
      if (g[k].row != p[static_cast<std::size_t>(k)] || g[k].col != p[static_cast<std::size_t>(n + k)])
        return {false, "mismatch at n=" + std::to_string(n) + ", point " + std::to_string(k)};
  }
  return {true, "n = 1..64 match exactly"};
}

Outcome strategy_equivalence() {
  Rng rng(2024, "acceptance-strategies");
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 1 + rng.below(16), c_in = 1 + rng.below(8), c_out = 1 + rng.below(8);
    const Index stride = 1 + rng.below(2), padding = rng.below(2);
    const Index b = 1 + rng.below(2), h = 3 + rng.below(14), w = 3 + rng.below(14);
    LdconvLayer<float> l = random_layer(rng, n, c_in, c_out, stride, padding, true);
    const Tensor4<float> x = rand_uniform<float>({b, c_in, h, w}, rng, -1.0f, 1.0f);
    l.strategy = Strategy::kConv3d;
    const Tensor4<float> ref = forward(l, x).y;
    for (Strategy s : kAllStrategies) {
      l.strategy = s;
      worst = std::max(worst, max_rel_diff(forward(l, x).y, ref, 1.0));
    }
  }
  return {worst <= 1e-5, "100 configs, max rel diff " + fmt("%.2e", worst) + " (f32, tol 1e-5)"};
}

Outcome standard_conv_equivalence() {
  Rng rng(7, "acceptance-reference");
  const Index ns[] = {1, 4, 9};
  double worst = 0.0;
  int cases = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = ns[trial % 3], k = ceil_sqrt(n);
    const Index stride = 1 + rng.below(2);
    const Index padding = trial % 2;  // every other case uses the padded variant
    const Index c_in = 1 + rng.below(4), c_out = 1 + rng.below(4);
    const Index h = k + 2 + rng.below(8), w = k + 2 + rng.below(8);
    const LdconvLayer<float> l = random_layer(rng, n, c_in, c_out, stride, padding, false);
    const Tensor4<float> x = rand_uniform<float>({2, c_in, h, w}, rng, -1.0f, 1.0f);
    Tensor4<float> wk({c_out, c_in, k, k});
    for (Index o = 0; o < c_out; ++o)
      for (Index c = 0; c < c_in; ++c)
        for (Index p = 0; p < n; ++p) wk(o, c, l.geometry[p].row, l.geometry[p].col) = l.agg_weights(o, c, p);
    const Tensor4<float> ref = conv2d_reference<float>(x, wk, std::span<const float>(*l.agg_bias),
                                                       {.stride = stride, .pad = padding, .anchor = Anchor::kTopLeft});
    const Tensor4<float> y = forward(l, x).y;
    // Compared over the reference's full-window outputs.
    for (Index b = 0; b < 2; ++b)
      for (Index o = 0; o < c_out; ++o)
        for (Index i = 0; i < ref.dim(2); ++i)
          for (Index j = 0; j < ref.dim(3); ++j) {
            const double a = y(b, o, i, j), r = ref(b, o, i, j);
            worst = std::max(worst, std::abs(a - r) / std::max({std::abs(a), std::abs(r), 1.0}));
          }
    ++cases;
  }
  return {worst <= 1e-5, std::to_string(cases) + " cases (N in {1,4,9}, stride 1-2, padding 0/1), max rel diff " +
                             fmt("%.2e", worst)};
}

Outcome gradient_correctness() {
  const Index ns[] = {1, 3, 5, 9};
  double worst = 0.0;
  int instances = 0;
  for (Index n : ns)
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(seed, "acceptance-gradcheck-dims");
      GradCheckOptions opt;
      opt.n = n;
      opt.seed = seed;
      opt.dims = {1 + static_cast<Index>(rng.below(2)), 1 + static_cast<Index>(rng.below(3)),
                  4 + static_cast<Index>(rng.below(3)), 4 + static_cast<Index>(rng.below(3))};
      opt.c_out = 1 + rng.below(3);
      for (const auto& r : {check_layer_gradients<double>(opt), check_sampler_gradients<double>(opt)}) {
        worst = std::max(worst, r.worst());
        if (!r.passed) return {false, "N=" + std::to_string(n) + " seed " + std::to_string(seed) + " rel error " + fmt("%.2e", r.worst())};
      }
      ++instances;
    }
  GradCheckOptions bad;
  bad.sabotage = true;
  const bool control_fails = !check_layer_gradients<double>(bad).passed && !check_sampler_gradients<double>(bad).passed;
  return {control_fails, std::to_string(instances) + " instances, max rel error " + fmt("%.2e", worst) +
                             " (f64, tol 1e-6); sabotage " + (control_fails ? "fails as required" : "PASSED unexpectedly")};
}

Outcome linear_growth() {
  std::vector<Index> ns;
  for (Index n = 1; n <= 16; ++n) ns.push_back(n);
  const auto rows = growth_audit(16, 32, ns);
  for (std::size_t k = 2; k < rows.size(); ++k)
    if (*rows[k].delta_params != *rows[1].delta_params) return {false, "delta changes at n=" + std::to_string(rows[k].n)};
  Series ld{"ldconv", "LDConv", {}}, sq{"standard", "k x k", {}};
  for (const auto& r : rows) {
    ld.points.emplace_back(static_cast<double>(r.n), static_cast<double>(r.params));
    sq.points.emplace_back(static_cast<double>(r.n), static_cast<double>(r.std_conv_params));
  }
  const std::string svg = svg_line_chart({ld, sq}, {"growth", "N", "params", std::nullopt});
  const bool curves = svg.find("id=\"ldconv\"") != std::string::npos && svg.find("id=\"standard\"") != std::string::npos;
  return {curves, "delta " + std::to_string(*rows[1].delta_params) + " for every N = 2..16; chart has " +
                      (curves ? "both curves" : "missing curves")};
}

Outcome ao_metric() {
  const AoReport zero = average_offset(Tensor4<float>({2, 8, 3, 3}));
  bool ok = zero.mean == 0.0;
  for (double v : zero.per_position.span()) ok = ok && v == 0.0;
  Tensor4<float> four({1, 4, 1, 1});
  four(0, 0, 0, 0) = 1;
  four(0, 1, 0, 0) = -1;
  four(0, 2, 0, 0) = 2;
  four(0, 3, 0, 0) = -2;
  ok = ok && average_offset(four).per_position(0, 0, 0) == 1.5;

  Rng rng(11, "acceptance-ao");
  const Tensor4<float> off = rand_uniform<float>({2, 10, 5, 5}, rng, -3.0f, 3.0f);
  const AoReport base = average_offset(off);
  bool homogeneous = true;
  for (int t = 0; t < 10; ++t) {
    // Random signed powers of two: exactly representable scalings.
    const float c = std::ldexp(rng.below(2) ? 1.0f : -1.0f, static_cast<int>(rng.below(41)) - 20);
    const AoReport s = average_offset(off * c);
    for (Index k = 0; k < base.per_position.size(); ++k)
      homogeneous = homogeneous && s.per_position[k] == std::fabs(static_cast<double>(c)) * base.per_position[k];
  }
  return {ok && homogeneous, std::string("zero -> 0, [1,-1,2,-2] -> 1.5, ") +
                                 (homogeneous ? "exact" : "INEXACT") + " homogeneity for 10 random signed 2^k"};
}

Outcome training_sanity() {
  TrainConfig over;
  over.epochs = 200;
  over.batch = 8;
  over.lr = 0.05f;
  over.seed = 0;
  over.subset = 32;
  const Dataset small = synthetic_bars(32, 0, "train");
  TinyNet a = make_tiny_net({}, 0), b = make_tiny_net({}, 0);
  const TrainResult ra = train(a, small, over);
  const TrainResult rb = train(b, small, over);
  const bool reproducible = std::memcmp(ra.loss.data(), rb.loss.data(), ra.loss.size() * sizeof(double)) == 0 &&
                            ra.train_loss == rb.train_loss;
  const bool overfit = ra.train_acc == 1.0 && ra.train_loss < 0.05;

  TrainConfig std_cfg;
  std_cfg.epochs = 10;
  std_cfg.batch = 32;
  std_cfg.lr = 0.05f;
  std_cfg.seed = 0;
  const Dataset train_set = synthetic_bars(2048, 0, "train");
  const Dataset heldout = synthetic_bars(512, 0, "heldout");
  TinyNet net = make_tiny_net({}, 0);
  const TrainResult rs = train(net, train_set, std_cfg, &heldout);
  const bool standard = rs.heldout_acc && *rs.heldout_acc >= 0.90;
  return {overfit && standard && reproducible,
          "overfit train acc " + fmt("%.3f", ra.train_acc) + ", loss " + fmt("%.4f", ra.train_loss) +
              "; standard held-out acc " + fmt("%.4f", rs.heldout_acc.value_or(0.0)) + "; reruns " +
              (reproducible ? "bitwise identical" : "DIFFER")};
}

Outcome offset_signal() {
  TinyNet net = make_tiny_net({}, 5);
  const TinyNet before = net;
  Rng rng(5, "acceptance-random-data");
  Dataset d;
  d.images = rand_uniform<float>({8, 1, 28, 28}, rng, 0.0f, 1.0f);
  for (int i = 0; i < 8; ++i) d.labels.push_back(static_cast<int>(rng.below(10)));
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch = 8;
  train(net, d, cfg);
  const float d1 = max_abs(net.l1.offset_weights - before.l1.offset_weights);
  const float d2 = max_abs(net.l2.offset_weights - before.l2.offset_weights);
  return {d1 > 0.0f || d2 > 0.0f, "max offset-weight change " + fmt("%.3e", d1) + " (l1), " + fmt("%.3e", d2) + " (l2)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

Outcome cli_determinism() {
  const fs::path dir = fs::temp_directory_path() / "ldconv_acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "cfg.json") << R"({"n1": 5, "n2": 5, "strategy": "channel-stack", "epochs": 3, "batch": 16, "lr": 0.05, "seed": 1, "subset": 128})";
  auto run = [&](const std::string& args) {
    const std::string cmd = "cd '" + dir.string() + "' && LDCONV_THREADS=1 '" LDCONV_CLI_PATH "' " + args + " > /dev/null";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  };
  for (const char* tag : {"a", "b"}) {
    if (run(std::string("train cfg.json --synthetic --no-timestamp --out train_") + tag) != 0) return {false, "train failed"};
    if (run(std::string("check-grad --f64 --seed 3 --no-timestamp --out cg_") + tag + ".json") != 0)
      return {false, "check-grad failed"};
  }
  const bool train_same = slurp(dir / "train_a/report.json") == slurp(dir / "train_b/report.json") &&
                          slurp(dir / "train_a/checkpoint.ldt") == slurp(dir / "train_b/checkpoint.ldt");
  const bool cg_same = slurp(dir / "cg_a.json") == slurp(dir / "cg_b.json");
  const bool nonempty = !slurp(dir / "train_a/report.json").empty() && !slurp(dir / "cg_a.json").empty();
  fs::remove_all(dir);
  return {train_same && cg_same && nonempty, std::string("train report ") + (train_same ? "identical" : "DIFFERS") +
                                                 ", check-grad report " + (cg_same ? "identical" : "DIFFERS")};
}

}  // namespace

int main() {
  criterion(1, "coordinate-generator oracle", 1, coords_oracle);
  criterion(2, "strategy equivalence", 30, strategy_equivalence);
  criterion(3, "standard-conv equivalence", 10, standard_conv_equivalence);
  criterion(4, "gradient correctness", 120, gradient_correctness);
  criterion(5, "linear-growth audit", 1, linear_growth);
  criterion(6, "AO metric", 1, ao_metric);
  criterion(7, "training sanity", 300, training_sanity);
  criterion(8, "offset learning signal", 5, offset_signal);
  criterion(9, "CLI determinism", 120, cli_determinism);
  std::printf("%s: %d of 9 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
