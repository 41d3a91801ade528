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


// ldconv: command-line front end. Exit codes: 0 success, 1 quantitative
// failure (gradient tolerance, strategy disagreement, divergence), 2 usage or
// input error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ldconv/analysis.hpp"
#include "ldconv/checkpoint.hpp"
#include "ldconv/errors.hpp"
#include "ldconv/gradcheck.hpp"
#include "ldconv/ldconv.hpp"
#include "ldconv/report.hpp"
#include "ldconv/svg.hpp"
#include "ldconv/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ldconv;

namespace {

constexpr int kOk = 0;
constexpr int kQuantFail = 1;

struct Globals {
  bool no_timestamp = false;
};

std::optional<std::string> stamp(const Globals& g) {
  if (g.no_timestamp) return std::nullopt;
  return utc_timestamp();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write " + path.string());
  f << text;
}

Dims<4> parse_dims(const std::string& text) {
  Dims<4> d{};
  std::stringstream ss(text);
  std::string item;
  std::size_t k = 0;
  while (std::getline(ss, item, ',')) {
    if (k == 4) throw InvalidArgument("dims must be B,C,H,W, got '" + text + "'");
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw InvalidArgument("dims must be integers, got '" + text + "'");
    if (v < 1) throw InvalidArgument("invalid dims '" + text + "': every extent must be >= 1");
    d[k++] = v;
  }
  if (k != 4) throw InvalidArgument("dims must be B,C,H,W, got '" + text + "'");
  return d;
}

json dims_json(const Dims<4>& d) { return json::array({d[0], d[1], d[2], d[3]}); }

// ---------------------------------------------------------------- gen-coords

struct GenCoordsArgs {
  std::optional<Index> n;
  std::string shape_file;
  std::string format = "csv";
  std::string out = "-";
};

int cmd_gen_coords(const GenCoordsArgs& a, const Globals& g) {
  const bool has_n = a.n.has_value(), has_file = !a.shape_file.empty();
  if (has_n == has_file) throw InvalidArgument("give exactly one of --n and --shape-file");
  if (has_n && *a.n < 1) throw InvalidArgument("--n must be >= 1, got " + std::to_string(*a.n));
  const KernelGeometry geo = has_file ? load_shape_file(a.shape_file) : gen_initial_coords(*a.n);
  std::string text;
  if (a.format == "csv") {
    text = "index,row,col\n";
    for (Index i = 0; i < geo.n(); ++i)
      text += std::to_string(i) + "," + std::to_string(geo[i].row) + "," + std::to_string(geo[i].col) + "\n";
  } else {
    const std::string title =
        has_file ? "shape " + fs::path(a.shape_file).filename().string() : "initial coordinates, N = " + std::to_string(geo.n());
    text = svg_shape_scatter(geo, {title, "col", "row", stamp(g)});
  }
  write_text(a.out, text);
  return kOk;
}

// ---------------------------------------------------------------- check-grad

struct CheckGradArgs {
  Index n = 3;
  std::string dims = "1,2,5,5";
  Index c_out = 2;
  std::uint64_t seed = 0;
  double eps = 0.0;
  bool f64 = false;
  bool sabotage = false;
  std::string post = "none";
  std::string out;
};

template <typename Scalar>
json run_suites(const GradCheckOptions& base, bool with_post, bool& passed) {
  json suites = json::object();
  auto record = [&](const std::string& name, const GradCheckResult& r) {
    json groups = json::object();
    for (const auto& gr : r.groups) {
      groups[gr.name] = gr.max_rel_error;
      std::printf("%-16s %-16s %.3e %s\n", name.c_str(), gr.name.c_str(), gr.max_rel_error,
                  gr.max_rel_error < r.tolerance ? "ok" : "FAIL");
    }
    suites[name] = {{"groups", groups}, {"max_rel_error", r.worst()}, {"attempts", r.attempts}, {"passed", r.passed}};
    passed = passed && r.passed;
  };
  record("sampler", check_sampler_gradients<Scalar>(base));
  GradCheckOptions plain = base;
  plain.post = PostOp::kNone;
  record("layer", check_layer_gradients<Scalar>(plain));
  if (with_post) {
    GradCheckOptions norm = base;
    norm.post = PostOp::kNormAct;
    record("layer.norm-act", check_layer_gradients<Scalar>(norm));
  }
  return suites;
}

int cmd_check_grad(const CheckGradArgs& a, const Globals& g) {
  if (a.n < 1) throw InvalidArgument("--n must be >= 1");
  if (a.c_out < 1) throw InvalidArgument("--c-out must be >= 1");
  if (a.eps < 0) throw InvalidArgument("--eps must be >= 0");
  GradCheckOptions opt;
  opt.n = a.n;
  opt.dims = parse_dims(a.dims);
  opt.c_out = a.c_out;
  opt.seed = a.seed;
  opt.eps = a.eps;
  opt.sabotage = a.sabotage;
  const bool with_post = parse_post(a.post) == PostOp::kNormAct;
  bool passed = true;
  const json suites = a.f64 ? run_suites<double>(opt, with_post, passed) : run_suites<float>(opt, with_post, passed);
  const double tol = a.f64 ? gradcheck_tolerance<double>() : gradcheck_tolerance<float>();
  const double eps = a.eps > 0 ? a.eps : (a.f64 ? default_fd_step<double>() : default_fd_step<float>());
  std::printf("check-grad: %s (tolerance %.0e, %s)\n", passed ? "PASS" : "FAIL", tol, a.f64 ? "f64" : "f32");

  if (!a.out.empty()) {
    RunReport r;
    r.command = "check-grad";
    r.config = {{"n", a.n}, {"dims", dims_json(opt.dims)}, {"c_out", a.c_out}, {"seed", a.seed},
                {"eps", eps}, {"f64", a.f64}, {"sabotage", a.sabotage}, {"post", a.post}};
    r.timestamp = stamp(g);
    r.set("suites", suites);
    r.set("tolerance", tol);
    r.set("passed", passed);
    r.save(a.out);
  }
  return passed ? kOk : kQuantFail;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  Index n = 9;
  Index c_in = 16;
  Index c_out = 32;
  std::string dims;
  int iters = 20;
  int warmup = 3;
  std::uint64_t seed = 0;
  std::string out;
};

double checksum(const Tensor4<float>& y) {
  double s = 0.0;
  for (float v : y.span()) s += static_cast<double>(v);
  return s;
}

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
  return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
}

int cmd_bench(const BenchArgs& a, const Globals& g) {
  if (a.iters < 1) throw InvalidArgument("--iters must be >= 1");
  if (a.warmup < 0) throw InvalidArgument("--warmup must be >= 0");
  const Dims<4> dims = a.dims.empty() ? Dims<4>{1, a.c_in, 32, 32} : parse_dims(a.dims);
  if (dims[1] != a.c_in)
    throw InvalidArgument("--dims channel extent " + std::to_string(dims[1]) + " differs from --c-in " +
                          std::to_string(a.c_in));
  LdconvConfig cfg;
  cfg.n = a.n;
  cfg.c_in = a.c_in;
  cfg.c_out = a.c_out;
  Rng root(a.seed, "bench");
  Rng rl = root.split("layer"), ro = root.split("offsets"), rx = root.split("x");
  LdconvLayer<float> layer = make_layer<float>(cfg, rl);
  // Non-trivial offsets so every strategy resamples at fractional positions.
  layer.offset_weights = rand_uniform<float>(layer.offset_weights.dims(), ro, -0.1f, 0.1f);
  for (auto& b : layer.offset_bias) b = ro.uniform(-1.5f, 1.5f);
  const Tensor4<float> x = rand_uniform<float>(dims, rx, -1.0f, 1.0f);

  std::vector<Tensor4<float>> outputs;
  for (Strategy s : kAllStrategies) {
    layer.strategy = s;
    outputs.push_back(forward(layer, x).y);
  }
  double worst = 0.0;
  // Relative to max(|a|, |b|, 1): near-zero outputs come from cancellation
  // and carry only absolute rounding error.
  for (const auto& y : outputs) worst = std::max(worst, max_rel_diff(y, outputs[0], 1.0));
  const bool agree = worst <= 1e-5;

  RunReport r;
  r.command = "bench";
  r.config = {{"n", a.n}, {"c_in", a.c_in}, {"c_out", a.c_out}, {"dims", dims_json(dims)},
              {"iters", a.iters}, {"warmup", a.warmup}, {"seed", a.seed}, {"threads", thread_count()}};
  r.timestamp = stamp(g);
  r.set("outputs_agree", agree);
  r.set("max_rel_diff", worst);
  double lo = checksum(outputs[0]), hi = lo;
  for (const auto& y : outputs) {
    lo = std::min(lo, checksum(y));
    hi = std::max(hi, checksum(y));
  }
  r.set("checksum_spread", (hi - lo) / std::max({std::fabs(lo), std::fabs(hi), 1.0}));
  json rows = json::array();
  std::printf("%-14s %12s %12s %16s\n", "strategy", "median_ms", "p90_ms", "checksum");
  for (std::size_t k = 0; k < std::size(kAllStrategies); ++k) {
    const Strategy s = kAllStrategies[k];
    json row = {{"strategy", std::string(to_string(s))}, {"checksum", checksum(outputs[k])}};
    if (agree) {
      layer.strategy = s;
      for (int i = 0; i < a.warmup; ++i) (void)forward(layer, x);
      std::vector<double> ms;
      for (int i = 0; i < a.iters; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto y = forward(layer, x);
        const auto t1 = std::chrono::steady_clock::now();
        ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
      }
      row["median_ms"] = percentile(ms, 0.5);
      row["p90_ms"] = percentile(ms, 0.9);
      std::printf("%-14s %12.3f %12.3f %16.9e\n", row["strategy"].get<std::string>().c_str(), row["median_ms"].get<double>(),
                  row["p90_ms"].get<double>(), row["checksum"].get<double>());
    }
    rows.push_back(row);
  }
  r.set("strategies", rows);
  std::printf("outputs_agree: %s (max rel diff %.3e)\n", agree ? "true" : "false", worst);
  if (!a.out.empty()) r.save(a.out);
  return agree ? kOk : kQuantFail;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string config;
  bool synthetic = false;
  std::string out = "train_out";
};

constexpr Index kSyntheticTrain = 2048;
constexpr Index kHeldout = 512;

json ao_summary(const AoReport& r) {
  return {{"mean", r.mean}, {"std", r.std}, {"per_sample", r.per_sample}};
}

int cmd_train(const TrainArgs& a, const Globals& g) {
  std::ifstream f(a.config);
  if (!f) throw InvalidArgument("cannot open config " + a.config);
  json cfg;
  try {
    cfg = json::parse(f);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("malformed config: ") + e.what());
  }
  if (!cfg.is_object()) throw FormatError("config must be a JSON object");
  static const std::vector<std::string> known = {"n1",   "n2",     "strategy", "epochs",  "batch",     "lr",
                                                 "seed", "subset", "data_dir", "heldout", "shape_file"};
  for (const auto& [k, v] : cfg.items())
    if (std::find(known.begin(), known.end(), k) == known.end()) throw InvalidArgument("unknown config key '" + k + "'");

  TinyNetConfig net_cfg;
  TrainConfig tc;
  Index heldout_count = kHeldout;
  std::string data_dir;
  try {
    net_cfg.n1 = cfg.value("n1", Index{5});
    net_cfg.n2 = cfg.value("n2", Index{5});
    net_cfg.strategy = parse_strategy(cfg.value("strategy", std::string("channel-stack")));
    tc.epochs = cfg.value("epochs", tc.epochs);
    tc.batch = cfg.value("batch", tc.batch);
    tc.lr = cfg.value("lr", tc.lr);
    tc.seed = cfg.value("seed", tc.seed);
    tc.subset = cfg.value("subset", tc.subset);
    heldout_count = cfg.value("heldout", heldout_count);
    data_dir = cfg.value("data_dir", std::string{});
    net_cfg.shape_file = cfg.value("shape_file", std::string{});
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad config value: ") + e.what());
  }
  if (tc.subset < 0) throw InvalidArgument("subset must be >= 0");
  if (heldout_count < 0) throw InvalidArgument("heldout must be >= 0");
  if (!net_cfg.shape_file.empty()) {
    net_cfg.geometry1 = load_shape_file(net_cfg.shape_file, net_cfg.n1);
    net_cfg.geometry2 = load_shape_file(net_cfg.shape_file, net_cfg.n2);
  }

  Dataset train_set, heldout;
  if (a.synthetic) {
    train_set = synthetic_bars(std::max(kSyntheticTrain, tc.subset), tc.seed, "train");
    heldout = synthetic_bars(heldout_count, tc.seed, "heldout");
  } else {
    if (data_dir.empty()) throw InvalidArgument("config has no data_dir; pass --synthetic to use generated data");
    const fs::path dir = data_dir;
    train_set = load_idx(dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte");
    if (fs::exists(dir / "t10k-images-idx3-ubyte")) {
      const Dataset test = load_idx(dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte");
      heldout = test.slice(0, std::min(heldout_count, test.size()));
    }
  }

  TinyNet net = make_tiny_net(net_cfg, tc.seed);
  const TrainResult res = train(net, train_set, tc, heldout.size() > 0 ? &heldout : nullptr);
  for (std::size_t e = 0; e < res.loss.size(); ++e)
    std::printf("epoch %3zu  loss %.6f  acc %.4f\n", e + 1, res.loss[e], res.acc[e]);
  std::printf("train_acc %.4f  train_loss %.6f", res.train_acc, res.train_loss);
  if (res.heldout_acc) std::printf("  heldout_acc %.4f", *res.heldout_acc);
  std::printf("\n");

  const fs::path out = a.out;
  fs::create_directories(out);
  save_net_checkpoint(out / "checkpoint.ldt", net);
  const AoReport ao1 = average_offset(res.offsets1, "l1");
  const AoReport ao2 = average_offset(res.offsets2, "l2");
  write_text(out / "ao_l1.csv", ao_csv(ao1));
  write_text(out / "ao_l2.csv", ao_csv(ao2));
  std::vector<std::pair<double, double>> curve;
  for (std::size_t e = 0; e < res.loss.size(); ++e) curve.emplace_back(static_cast<double>(e + 1), res.loss[e]);
  write_text(out / "loss.svg", svg_line_chart({{"loss", "train loss", curve}}, {"training loss", "epoch", "loss", stamp(g)}));

  RunReport r;
  r.command = "train";
  r.config = cfg;
  r.config["synthetic"] = a.synthetic;
  r.timestamp = stamp(g);
  r.set("loss", res.loss);
  r.set("acc", res.acc);
  r.set("final_acc", res.final_acc);
  r.set("train_loss", res.train_loss);
  if (res.heldout_acc) r.set("heldout_acc", *res.heldout_acc);
  r.set("param_count", res.param_count);
  r.set("ao", {{"l1", ao_summary(ao1)}, {"l2", ao_summary(ao2)}, {"probe_count", res.offsets2.dim(0)}});
  r.artifacts = {{"checkpoint", "checkpoint.ldt"}, {"checkpoint_sidecar", "checkpoint.json"},
                 {"ao_l1", "ao_l1.csv"},           {"ao_l2", "ao_l2.csv"},
                 {"loss_plot", "loss.svg"}};
  r.save(out / "report.json");
  return kOk;
}

// ---------------------------------------------------------------- analyze-ao

struct AnalyzeArgs {
  std::vector<std::string> checkpoints;
  std::string probe;
  Index probe_count = 4;
  std::uint64_t seed = 0;
  std::string out = "ao_out";
};

int cmd_analyze_ao(const AnalyzeArgs& a, const Globals& g) {
  if (a.probe_count < 1) throw InvalidArgument("--probe-count must be >= 1");
  std::vector<ShapeCheckpoint> cks;
  for (const auto& p : a.checkpoints) cks.push_back({p, load_net_checkpoint(p)});
  Tensor4<float> probe;
  if (!a.probe.empty()) {
    const auto records = load_container(a.probe);
    if (records.empty()) throw FormatError("probe container " + a.probe + " is empty");
    probe = records.front().tensor;
    if (probe.dim(1) != 1 || probe.dim(2) != 28 || probe.dim(3) != 28)
      throw ShapeError("probe must be (B, 1, 28, 28), got " + dims_to_string(probe.dims()));
  } else {
    probe = synthetic_bars(a.probe_count, a.seed, "heldout").images;
  }
  const auto reports = shape_ao_compare(cks, probe);

  const fs::path out = a.out;
  fs::create_directories(out);
  RunReport r;
  r.command = "analyze-ao";
  r.config = {{"checkpoints", a.checkpoints}, {"probe", a.probe}, {"probe_count", probe.dim(0)}, {"seed", a.seed}};
  r.timestamp = stamp(g);
  json shapes = json::array();
  std::vector<Series> series;
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const AoReport& rep = reports[k];
    const std::string tag = "shape" + std::to_string(k);
    write_text(out / ("ao_" + tag + ".csv"), ao_csv(rep));
    write_text(out / (tag + ".svg"),
               svg_shape_scatter(cks[k].net.l2.geometry, {"initial shape " + rep.shape_id, "col", "row", stamp(g)}));
    Series s{tag, rep.shape_id, {}};
    for (Index p = 0; p < rep.batch_mean.size(); ++p) s.points.emplace_back(static_cast<double>(p), rep.batch_mean[p]);
    series.push_back(std::move(s));
    const std::string& shape_file = cks[k].net.l2.shape_file;
    shapes.push_back({{"id", rep.shape_id}, {"shape", shape_file.empty() ? "generator" : shape_file},
                      {"n", cks[k].net.l2.n}, {"mean", rep.mean}, {"std", rep.std}, {"per_sample", rep.per_sample},
                      {"batch_mean", std::vector<double>(rep.batch_mean.span().begin(), rep.batch_mean.span().end())}});
    r.artifacts["ao_" + tag] = "ao_" + tag + ".csv";
    r.artifacts["shape_" + tag] = tag + ".svg";
    std::printf("%-24s mean AO %.6f  std %.6f\n", rep.shape_id.c_str(), rep.mean, rep.std);
  }
  write_text(out / "ao.svg", svg_line_chart(series, {"average offset of the last layer", "sampling location", "AO", stamp(g)}));
  r.artifacts["ao_plot"] = "ao.svg";
  r.set("shapes", shapes);
  r.save(out / "ao_report.json");
  return kOk;
}

// ---------------------------------------------------------------- growth

struct GrowthArgs {
  Index c_in = 16;
  Index c_out = 32;
  Index n_min = 1;
  Index n_max = 16;
  bool no_bias = false;
  Index h = 32;
  Index w = 32;
  std::string out = "growth_out";
};

int cmd_growth(const GrowthArgs& a, const Globals& g) {
  if (a.n_max < 1) throw InvalidArgument("--n-max must be >= 1");
  if (a.n_min < 1 || a.n_min > a.n_max) throw InvalidArgument("--n-min must be in [1, n-max]");
  if (a.h < 1 || a.w < 1) throw InvalidArgument("--height and --width must be >= 1");
  std::vector<Index> ns;
  for (Index n = a.n_min; n <= a.n_max; ++n) ns.push_back(n);
  const auto rows = growth_audit(a.c_in, a.c_out, ns, !a.no_bias, a.h, a.w);
  const std::string csv = growth_csv(rows);
  std::cout << csv;

  Series ld{"ldconv", "LDConv (linear)", {}}, std_conv{"standard", "k x k conv (quadratic)", {}};
  for (const auto& r : rows) {
    ld.points.emplace_back(static_cast<double>(r.n), static_cast<double>(r.params));
    std_conv.points.emplace_back(static_cast<double>(r.n), static_cast<double>(r.std_conv_params));
  }
  const fs::path out = a.out;
  fs::create_directories(out);
  write_text(out / "growth.csv", csv);
  write_text(out / "growth.svg",
             svg_line_chart({ld, std_conv}, {"parameters per layer, C_in = " + std::to_string(a.c_in) +
                                                 ", C_out = " + std::to_string(a.c_out),
                                             "N (sampling points)", "parameters", stamp(g)}));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear deformable convolution toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_flag("--no-timestamp", g.no_timestamp, "Omit timestamps from reports and SVG files");

  GenCoordsArgs gc;
  auto* s_gc = app.add_subcommand("gen-coords", "Print or plot the initial sampling coordinates");
  s_gc->add_option("--n", gc.n, "Number of sampling points");
  s_gc->add_option("--shape-file", gc.shape_file, "Custom shape file with 'row col' lines");
  s_gc->add_option("--format", gc.format)->check(CLI::IsMember({"csv", "svg"}));
  s_gc->add_option("--out", gc.out, "Output path ('-' for stdout)");

  CheckGradArgs cg;
  auto* s_cg = app.add_subcommand("check-grad", "Finite-difference audit of sampler and layer gradients");
  s_cg->add_option("--n", cg.n);
  s_cg->add_option("--dims", cg.dims, "B,C,H,W");
  s_cg->add_option("--c-out", cg.c_out);
  s_cg->add_option("--seed", cg.seed);
  s_cg->add_option("--eps", cg.eps, "Central-difference step (0: 1e-4 in f64, 1e-3 in f32)");
  s_cg->add_flag("--f64", cg.f64, "Check in 64-bit precision");
  s_cg->add_flag("--sabotage", cg.sabotage, "Corrupt the analytic input gradient (negative control)");
  s_cg->add_option("--post", cg.post, "Also check the layer with this post stage")->check(CLI::IsMember({"none", "norm-act"}));
  s_cg->add_option("--out", cg.out, "Write a JSON report");

  BenchArgs bn;
  auto* s_bn = app.add_subcommand("bench", "Time the aggregation strategies");
  s_bn->add_option("--n", bn.n);
  s_bn->add_option("--c-in", bn.c_in);
  s_bn->add_option("--c-out", bn.c_out);
  s_bn->add_option("--dims", bn.dims, "B,C,H,W (default 1,C_in,32,32)");
  s_bn->add_option("--iters", bn.iters);
  s_bn->add_option("--warmup", bn.warmup);
  s_bn->add_option("--seed", bn.seed);
  s_bn->add_option("--out", bn.out, "Write a JSON report");

  TrainArgs tr;
  auto* s_tr = app.add_subcommand("train", "Train the two-layer classifier");
  s_tr->add_option("config", tr.config, "Config JSON")->required();
  s_tr->add_flag("--synthetic", tr.synthetic, "Use the generated bar dataset instead of data_dir");
  s_tr->add_option("--out", tr.out, "Output directory");

  AnalyzeArgs an;
  auto* s_an = app.add_subcommand("analyze-ao", "Average-offset analysis of trained checkpoints");
  s_an->add_option("--checkpoint", an.checkpoints, "Net checkpoint (.ldt), repeatable")->required();
  s_an->add_option("--probe", an.probe, "Tensor container whose first record is the probe batch");
  s_an->add_option("--probe-count", an.probe_count, "Synthetic probe images when --probe is absent");
  s_an->add_option("--seed", an.seed);
  s_an->add_option("--out", an.out, "Output directory");

  GrowthArgs gr;
  auto* s_gr = app.add_subcommand("growth", "Parameter growth audit");
  s_gr->add_option("--c-in", gr.c_in);
  s_gr->add_option("--c-out", gr.c_out);
  s_gr->add_option("--n-min", gr.n_min);
  s_gr->add_option("--n-max", gr.n_max);
  s_gr->add_flag("--no-bias", gr.no_bias, "Count layers without aggregation bias");
  s_gr->add_option("--height", gr.h, "Input height for FLOPs");
  s_gr->add_option("--width", gr.w, "Input width for FLOPs");
  s_gr->add_option("--out", gr.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*s_gc) return cmd_gen_coords(gc, g);
    if (*s_cg) return cmd_check_grad(cg, g);
    if (*s_bn) return cmd_bench(bn, g);
    if (*s_tr) return cmd_train(tr, g);
    if (*s_an) return cmd_analyze_ao(an, g);
    if (*s_gr) return cmd_growth(gr, g);
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kQuantFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
