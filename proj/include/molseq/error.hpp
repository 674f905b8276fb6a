// SPDX-FileCopyrightText: Copyright (c) 2026 The molseq Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace molseq {

//! Error category; the numeric values double as CLI exit codes.
enum class ErrorKind : int {
  Domain = 1,  //!< invalid molecule, token, numeric failure, ...
  Io     = 2,
  Config = 3,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

//! Syntax-level failure with the 0-based offset of the offending character/symbol.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(ErrorKind::Domain, what + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

inline Error domain_error(const std::string& what) {
  return Error(ErrorKind::Domain, what);
}
inline Error io_error(const std::string& what) {
  return Error(ErrorKind::Io, what);
}
inline Error config_error(const std::string& what) {
  return Error(ErrorKind::Config, what);
}

}  // namespace molseq
