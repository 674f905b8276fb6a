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
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "molseq/util/format.hpp"

namespace molseq::app {

/// Flat key=value run configuration. Every recognised key has a default;
/// later merges override earlier ones and unknown keys are config errors.
class RunConfig {
 public:
  RunConfig();

  void merge_text(std::string_view text);
  void merge_file(const std::string& path);
  void set(const std::string& key, const std::string& value);

  const std::string& get(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  const util::KeyValues& values() const noexcept { return values_; }
  std::string serialize() const { return util::format_key_values(values_); }

 private:
  util::KeyValues values_;
};

enum class LogLevel { Info = 0, Warning = 1, Output = 2 };
using Logger = std::function<void(LogLevel, std::string_view)>;

//! Counts of input lines that could not be processed.
struct RunSummary {
  std::size_t processed = 0;
  std::size_t rejected = 0;
};

/// Each command writes <out_dir>/<command>.config with the resolved
/// configuration, then its outputs. Commands that reject input lines throw
/// domain_error after writing outputs unless `lenient` is set.
RunSummary run_convert(const RunConfig& config, const Logger& log);
RunSummary run_train(const RunConfig& config, const Logger& log);
RunSummary run_generate(const RunConfig& config, const Logger& log);
RunSummary run_eval_gen(const RunConfig& config, const Logger& log);
RunSummary run_embed(const RunConfig& config, const Logger& log);
RunSummary run_eval_prop(const RunConfig& config, const Logger& log);

//! "fnv1a64:<hex>" digest of a file's bytes.
std::string file_id(const std::string& path);

}  // namespace molseq::app
