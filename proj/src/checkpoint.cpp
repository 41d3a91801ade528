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


#include "ldconv/checkpoint.hpp"

#include <fstream>
#include <iterator>

#include "ldconv/errors.hpp"

namespace ldconv {
namespace {

using nlohmann::json;

Tensor4<float> column(const std::vector<float>& v) {
  return Tensor4<float>({static_cast<Index>(v.size()), 1, 1, 1}, v);
}

std::vector<float> flat(const Tensor4<float>& t, Index expected, const std::string& name) {
  if (t.size() != expected) throw IncompatibleCheckpoint("record " + name + " has " + std::to_string(t.size()) +
                                                         " values, expected " + std::to_string(expected));
  return {t.data(), t.data() + t.size()};
}

const Tensor4<float>& record(const std::vector<NamedTensor>& records, const std::string& name, const Dims<4>& dims) {
  const Tensor4<float>& t = find_record(records, name);
  if (t.dims() != dims)
    throw IncompatibleCheckpoint("record " + name + " is " + dims_to_string(t.dims()) + ", expected " +
                                 dims_to_string(dims));
  return t;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open checkpoint sidecar " + path.string());
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw FormatError("malformed sidecar " + path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw InvalidArgument("cannot write " + path.string());
  f << j.dump(2) << "\n";
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  auto p = path;
  return p.replace_extension(".json");
}

std::vector<NamedTensor> layer_records(const LdconvLayer<float>& layer, const std::string& prefix) {
  std::vector<NamedTensor> out;
  out.push_back({prefix + "offset_w", layer.offset_weights});
  out.push_back({prefix + "offset_b", column(layer.offset_bias)});
  out.push_back({prefix + "agg_w", Tensor4<float>({layer.c_out, layer.c_in, layer.n, 1}, layer.agg_weights.storage())});
  if (layer.agg_bias) out.push_back({prefix + "agg_b", column(*layer.agg_bias)});
  if (layer.post == PostOp::kNormAct) {
    out.push_back({prefix + "norm_scale", column(layer.norm_scale)});
    out.push_back({prefix + "norm_shift", column(layer.norm_shift)});
  }
  return out;
}

json layer_sidecar(const LdconvLayer<float>& layer) {
  json j;
  j["n"] = layer.n;
  j["c_in"] = layer.c_in;
  j["c_out"] = layer.c_out;
  j["stride"] = layer.stride;
  j["padding"] = layer.padding;
  j["strategy"] = std::string(to_string(layer.strategy));
  j["post"] = std::string(to_string(layer.post));
  j["agg_bias"] = layer.agg_bias.has_value();
  if (!layer.shape_file.empty()) j["shape_file"] = layer.shape_file;
  json coords = json::array();
  for (const Coord& c : layer.geometry.coords()) coords.push_back({c.row, c.col});
  j["coords"] = coords;
  return j;
}

LdconvLayer<float> layer_from(const std::vector<NamedTensor>& records, const json& sc, const std::string& prefix) {
  LdconvLayer<float> l;
  try {
    l.n = sc.at("n").get<Index>();
    l.c_in = sc.at("c_in").get<Index>();
    l.c_out = sc.at("c_out").get<Index>();
    l.stride = sc.at("stride").get<Index>();
    l.padding = sc.at("padding").get<Index>();
    l.strategy = parse_strategy(sc.at("strategy").get<std::string>());
    l.post = parse_post(sc.at("post").get<std::string>());
    l.shape_file = sc.value("shape_file", std::string{});
    if (sc.contains("coords")) {
      std::vector<Coord> coords;
      for (const auto& c : sc.at("coords")) coords.push_back({c.at(0).get<Index>(), c.at(1).get<Index>()});
      l.geometry = KernelGeometry(std::move(coords));
    } else {
      l.geometry = gen_initial_coords(l.n);
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed layer sidecar: ") + e.what());
  }
  if (l.n < 1 || l.c_in < 1 || l.c_out < 1) throw FormatError("sidecar has non-positive layer sizes");

  l.offset_weights = record(records, prefix + "offset_w", {2 * l.n, l.c_in, 3, 3});
  l.offset_bias = flat(record(records, prefix + "offset_b", {2 * l.n, 1, 1, 1}), 2 * l.n, prefix + "offset_b");
  l.agg_weights = Tensor3<float>({l.c_out, l.c_in, l.n}, record(records, prefix + "agg_w", {l.c_out, l.c_in, l.n, 1}).storage());
  if (sc.value("agg_bias", true))
    l.agg_bias = flat(record(records, prefix + "agg_b", {l.c_out, 1, 1, 1}), l.c_out, prefix + "agg_b");
  if (l.post == PostOp::kNormAct) {
    l.norm_scale = flat(record(records, prefix + "norm_scale", {l.c_out, 1, 1, 1}), l.c_out, prefix + "norm_scale");
    l.norm_shift = flat(record(records, prefix + "norm_shift", {l.c_out, 1, 1, 1}), l.c_out, prefix + "norm_shift");
  }
  try {
    l.validate();
  } catch (const Error& e) {
    throw IncompatibleCheckpoint(std::string("inconsistent checkpoint: ") + e.what());
  }
  return l;
}

void save_layer_checkpoint(const std::filesystem::path& path, const LdconvLayer<float>& layer) {
  save_container(path, layer_records(layer));
  write_json(sidecar_path(path), layer_sidecar(layer));
}

LdconvLayer<float> load_layer_checkpoint(const std::filesystem::path& path) {
  return layer_from(load_container(path), read_json(sidecar_path(path)));
}

void save_net_checkpoint(const std::filesystem::path& path, const TinyNet& net) {
  std::vector<NamedTensor> records = layer_records(net.l1, "l1.");
  for (auto& r : layer_records(net.l2, "l2.")) records.push_back(std::move(r));
  records.push_back({"fc_w", Tensor4<float>({net.fc_w.rows(), net.fc_w.cols(), 1, 1},
                                            std::vector<float>(net.fc_w.data(), net.fc_w.data() + net.fc_w.size()))});
  records.push_back({"fc_b", Tensor4<float>({net.fc_b.size(), 1, 1, 1},
                                            std::vector<float>(net.fc_b.data(), net.fc_b.data() + net.fc_b.size()))});
  save_container(path, records);
  write_json(sidecar_path(path), json{{"model", "tinynet"}, {"l1", layer_sidecar(net.l1)}, {"l2", layer_sidecar(net.l2)}});
}

TinyNet load_net_checkpoint(const std::filesystem::path& path) {
  const auto records = load_container(path);
  const json sc = read_json(sidecar_path(path));
  if (sc.value("model", std::string{}) != "tinynet" || !sc.contains("l1") || !sc.contains("l2"))
    throw IncompatibleCheckpoint(path.string() + " is not a tinynet checkpoint");
  TinyNet net{layer_from(records, sc["l1"], "l1."), layer_from(records, sc["l2"], "l2."), {}, {}};
  if (net.l1.c_in != 1 || net.l1.c_out != kNetWidth1 || net.l2.c_in != kNetWidth1 || net.l2.c_out != kNetWidth2)
    throw IncompatibleCheckpoint("unexpected tinynet layer widths in " + path.string());
  const Tensor4<float>& w = record(records, "fc_w", {kNetClasses, kNetWidth2, 1, 1});
  const Tensor4<float>& b = record(records, "fc_b", {kNetClasses, 1, 1, 1});
  net.fc_w = Eigen::Map<const RowMatrix<float>>(w.data(), kNetClasses, kNetWidth2);
  net.fc_b = Eigen::Map<const Eigen::VectorXf>(b.data(), kNetClasses);
  return net;
}

}  // namespace ldconv
