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


#include "ldconv/report.hpp"

#include <ctime>
#include <fstream>

#include "ldconv/errors.hpp"

namespace ldconv {
namespace {

bool reserved(const std::string& key) {
  return key == "command" || key == "config" || key == "timestamp" || key == "artifacts";
}

}  // namespace

void RunReport::set(const std::string& key, nlohmann::json value) {
  if (reserved(key)) throw InvalidArgument("metric name '" + key + "' is reserved");
  metrics[key] = std::move(value);
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : metrics) j[k] = v;
  j["command"] = command;
  j["config"] = config;
  if (timestamp) j["timestamp"] = *timestamp;
  j["artifacts"] = artifacts;
  return j;
}

RunReport RunReport::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("report must be a JSON object");
  RunReport r;
  try {
    r.command = j.at("command").get<std::string>();
    r.config = j.value("config", nlohmann::json::object());
    if (j.contains("timestamp")) r.timestamp = j.at("timestamp").get<std::string>();
    if (j.contains("artifacts")) r.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed report: ") + e.what());
  }
  for (const auto& [k, v] : j.items())
    if (!reserved(k)) r.metrics[k] = v;
  return r;
}

std::string RunReport::dump() const { return to_json().dump(2) + "\n"; }

void RunReport::save(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write " + path.string());
  f << dump();
}

RunReport RunReport::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("cannot open " + path.string());
  try {
    return from_json(nlohmann::json::parse(f));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("malformed report: ") + e.what());
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

}  // namespace ldconv
