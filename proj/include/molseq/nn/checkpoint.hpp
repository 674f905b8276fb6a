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

#include <string>
#include <utility>
#include <vector>

#include "molseq/nn/tensor.hpp"
#include "molseq/util/format.hpp"

namespace molseq::nn {

/// Versioned binary container: magic "MOLSEQCK", u32 version, u32 length +
/// key=value metadata text, u32 tensor count, then per tensor u32 name
/// length, name, u32 rank, u32 dims, little-endian float32 data.
struct Checkpoint {
  util::KeyValues meta;
  std::vector<std::pair<std::string, Mat<float>>> tensors;

  //! nullptr when absent.
  const Mat<float>* find(std::string_view name) const;
  //! Throws domain_error when absent.
  const std::string& require(const std::string& key) const;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string serialize_checkpoint(const Checkpoint& ckpt);
//! Throws domain_error on a malformed or truncated container.
Checkpoint parse_checkpoint(std::string_view bytes);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace molseq::nn
