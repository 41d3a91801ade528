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

#include "ldconv/ldconv.hpp"

namespace ldconv {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kConv3d:
      return "conv3d";
    case Strategy::kChannelStack:
      return "channel-stack";
    case Strategy::kColumnConv:
      return "column-conv";
  }
  throw InvalidArgument("unknown aggregation strategy");
}

std::string_view to_string(PostOp p) {
  return p == PostOp::kNone ? "none" : "norm-act";
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : kAllStrategies)
    if (to_string(s) == name) return s;
  throw InvalidArgument("unknown aggregation strategy '" + std::string(name) +
                        "' (expected conv3d, channel-stack or column-conv)");
}

PostOp parse_post(std::string_view name) {
  if (name == "none") return PostOp::kNone;
  if (name == "norm-act") return PostOp::kNormAct;
  throw InvalidArgument("unknown post stage '" + std::string(name) + "'");
}

}  // namespace ldconv
