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

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace molseq::util {

//! Shortest text that parses back to exactly `v`.
std::string format_double(double v);
//! Fixed number of significant digits, for reports.
std::string format_fixed(double v, int digits);

//! Strict parsers; throw config_error naming `key` on malformed input.
double parse_double(std::string_view key, std::string_view text);
std::int64_t parse_int(std::string_view key, std::string_view text);
bool parse_bool(std::string_view key, std::string_view text);

using KeyValues = std::map<std::string, std::string>;

/// Parses "key = value" lines. Blank lines and lines starting with '#' are
/// skipped; whitespace around keys and values is trimmed. Throws
/// config_error on a line without '=' or a duplicate key.
KeyValues parse_key_values(std::string_view text);
std::string format_key_values(const KeyValues& kv);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace molseq::util
