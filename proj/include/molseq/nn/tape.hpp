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

#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "molseq/nn/tensor.hpp"

namespace molseq::nn {

/// Reverse-mode differentiation over row-major matrices. Every operation
/// records its value and a backward closure; backward() replays them in
/// reverse. Parameter leaves accumulate into caller-owned gradient buffers.
template <class T>
class Tape {
 public:
  using M = Mat<T>;

  struct Var {
    int id = -1;
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  //! `value` must outlive the tape. `grad` (same shape, may be null) receives accumulated gradients.
  Var param(const M& value, M* grad);
  Var constant(M value);

  const M& value(Var v) const { return *nodes_[v.id]->value; }

  Var matmul(Var a, Var b);     // a * b
  Var matmul_nt(Var a, Var b);  // a * b^T
  Var add(Var a, Var b);
  Var add_bias(Var a, Var bias);  // bias is 1 x cols, broadcast over rows
  Var layer_norm(Var x, Var gain, Var bias);
  Var gelu(Var x);
  Var gather_rows(Var table, std::vector<int> rows);
  Var attention(Var q, Var k, Var v, AttentionSpec spec);
  //! Inverted dropout; identity when rate == 0.
  Var dropout(Var x, T rate, std::mt19937_64& rng);
  //! 1 x 1: scale * sum over rows with target >= 0 of -log softmax(logits)[target].
  //! The sum is accumulated in double; \p unscaled receives it when non-null.
  Var cross_entropy(Var logits, std::vector<int> targets, T scale, double* unscaled = nullptr);

  //! Seeds d(root) = 1 for a 1 x 1 root and propagates to all parameters.
  void backward(Var root);

  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    M own;
    const M* value = nullptr;
    M grad;
    M* grad_sink = nullptr;  // parameter gradient buffer
    bool needs_grad = false;
    std::function<void()> back;
  };

  Var push(M value, bool needs_grad);
  bool needs(Var v) const { return nodes_[v.id]->needs_grad; }
  //! Gradient accumulator of a node, zero-initialised on first use.
  M& grad(Var v);

  std::vector<std::unique_ptr<Node>> nodes_;
};

extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace molseq::nn
