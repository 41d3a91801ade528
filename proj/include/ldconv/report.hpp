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
#include <map>
#include <optional>
#include <string>

#include "json.hpp"

namespace ldconv {

/// Machine-readable record of one CLI invocation. Serialized as a single
/// object: the reserved keys "command", "config", "timestamp" (omitted when
/// unset) and "artifacts", with every metric as a further top-level key.
struct RunReport {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::optional<std::string> timestamp;
  std::map<std::string, nlohmann::json> metrics;  // number, bool, array or object
  std::map<std::string, std::string> artifacts;   // role -> path relative to the report

  void set(const std::string& key, nlohmann::json value);

  nlohmann::json to_json() const;
  static RunReport from_json(const nlohmann::json& j);
  /// Two-space indented JSON with sorted keys and a trailing newline.
  std::string dump() const;
  void save(const std::filesystem::path& path) const;
  static RunReport load(const std::filesystem::path& path);

  bool operator==(const RunReport&) const = default;
};

/// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

}  // namespace ldconv
