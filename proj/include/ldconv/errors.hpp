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

#include <stdexcept>
#include <string>

namespace ldconv {

/// Base of every error raised by the library. The CLI maps subclasses to
/// exit codes, so keep the hierarchy shallow.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define LDCONV_DEFINE_ERROR(Name)       \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  };

LDCONV_DEFINE_ERROR(ShapeError)
LDCONV_DEFINE_ERROR(InvalidArgument)
LDCONV_DEFINE_ERROR(InvalidRange)
LDCONV_DEFINE_ERROR(DegenerateGrid)
LDCONV_DEFINE_ERROR(DuplicateCoordinate)
LDCONV_DEFINE_ERROR(OutOfConvention)
LDCONV_DEFINE_ERROR(ShapeCountError)
LDCONV_DEFINE_ERROR(InvalidCoordinate)
LDCONV_DEFINE_ERROR(FormatError)
LDCONV_DEFINE_ERROR(LengthError)
LDCONV_DEFINE_ERROR(DatasetError)
LDCONV_DEFINE_ERROR(DivergenceError)
LDCONV_DEFINE_ERROR(IncompatibleCheckpoint)

#undef LDCONV_DEFINE_ERROR

}  // namespace ldconv
