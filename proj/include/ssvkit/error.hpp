// Copyright 2026 The ssvkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace ssvkit {

enum class ErrorKind {
  JitterExceeded,
  NonFinite,
  DimensionMismatch,
  TooFewPoints,
  CountOutOfRange,
  DimensionTooLarge,
  BoundaryCoalition,
  SingularSystem,
  DesignMismatch,
  InvalidArgument,
  Parse,
};

const char *to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` distinguishes failure
/// classes so callers (the CLI in particular) can map them to exit codes.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for failures of the linear algebra rather than of the inputs.
  bool is_numerical() const noexcept {
    return kind_ == ErrorKind::JitterExceeded || kind_ == ErrorKind::NonFinite ||
           kind_ == ErrorKind::SingularSystem;
  }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string &message) {
  throw Error(kind, message);
}

} // namespace ssvkit
