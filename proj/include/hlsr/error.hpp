// Copyright 2026 The hlsr Authors
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
#include <string_view>

namespace hlsr {

enum class ErrorKind {
  invalid_input,
  overflow,
  structural,
  protocol,
  configuration,
  validation,
  deadlock,
  limit,
  io,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid_input";
    case ErrorKind::overflow: return "overflow";
    case ErrorKind::structural: return "structural";
    case ErrorKind::protocol: return "protocol";
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::validation: return "validation";
    case ErrorKind::deadlock: return "deadlock";
    case ErrorKind::limit: return "limit";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

// Every failure raised by the library carries a kind so the CLI can map it
// to a machine-readable diagnostic.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hlsr
