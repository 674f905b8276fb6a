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

#include <vector>

#include <Eigen/Core>

namespace molseq::nn {

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using RowVec = Eigen::Matrix<T, 1, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kLayerNormEps = 1e-5;

//! Rows [q_begin, q_begin + q_len) attend to rows [k_begin, k_begin + k_len).
struct AttentionSegment {
  int q_begin = 0;
  int q_len = 0;
  int k_begin = 0;
  int k_len = 0;
};

struct AttentionSpec {
  int heads = 1;
  //! Query i (within its segment) sees keys j <= i + (k_len - q_len).
  bool causal = false;
  std::vector<AttentionSegment> segments;
  //! Optional, one entry per key row; 0 excludes the key (padding).
  std::vector<char> key_valid;
};

}  // namespace molseq::nn
