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

#include <cmath>
#include <limits>
#include <numbers>

#include "molseq/nn/tensor.hpp"

namespace molseq::nn::kernels {

template <class T>
struct NormCache {
  Mat<T> xhat;
  std::vector<T> inv_std;
};

template <class T>
Mat<T> layer_norm(const Mat<T>& x, const Mat<T>& gain, const Mat<T>& bias, NormCache<T>* cache) {
  const Eigen::Index n = x.rows(), d = x.cols();
  Mat<T> xhat(n, d);
  std::vector<T> inv(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const T mean = x.row(r).mean();
    const T var = (x.row(r).array() - mean).square().mean();
    inv[r] = T(1) / std::sqrt(var + T(kLayerNormEps));
    xhat.row(r) = (x.row(r).array() - mean) * inv[r];
  }
  Mat<T> y = (xhat.array().rowwise() * gain.row(0).array()).rowwise() + bias.row(0).array();
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->inv_std = std::move(inv);
  }
  return y;
}

template <class T>
T gelu(T x) {
  return T(0.5) * x * (T(1) + std::erf(x * T(std::numbers::sqrt2 / 2)));
}

template <class T>
T gelu_grad(T x) {
  const T cdf = T(0.5) * (T(1) + std::erf(x * T(std::numbers::sqrt2 / 2)));
  const T pdf = std::exp(T(-0.5) * x * x) * T(std::numbers::inv_sqrtpi / std::numbers::sqrt2);
  return cdf + x * pdf;
}

//! In-place numerically stable softmax of each row; -inf entries get probability 0.
template <class Derived>
void softmax_rows(Eigen::MatrixBase<Derived>& s) {
  using T = typename Derived::Scalar;
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    const T m = s.row(r).maxCoeff();
    if (m == -std::numeric_limits<T>::infinity()) {
      s.row(r).setZero();
      continue;
    }
    s.row(r) = (s.row(r).array() - m).exp();
    s.row(r) /= s.row(r).sum();
  }
}

/// Multi-head scaled dot-product attention for one segment. Writes the
/// (q_len x d) result into `out` rows starting at seg.q_begin and, when
/// `probs` is given, appends one (q_len x k_len) probability matrix per head.
template <class T>
void attention_segment(const Mat<T>& q, const Mat<T>& k, const Mat<T>& v, const AttentionSpec& spec,
                       const AttentionSegment& seg, Mat<T>& out, std::vector<Mat<T>>* probs) {
  const int d = static_cast<int>(q.cols());
  const int dh = d / spec.heads;
  const T scale = T(1) / std::sqrt(T(dh));
  const int offset = seg.k_len - seg.q_len;
  for (int h = 0; h < spec.heads; ++h) {
    Mat<T> s = (q.block(seg.q_begin, h * dh, seg.q_len, dh) * k.block(seg.k_begin, h * dh, seg.k_len, dh).transpose()) * scale;
    if (spec.causal || !spec.key_valid.empty()) {
      for (int i = 0; i < seg.q_len; ++i) {
        for (int j = 0; j < seg.k_len; ++j) {
          const bool hidden = (spec.causal && j > i + offset) ||
                              (!spec.key_valid.empty() && !spec.key_valid[seg.k_begin + j]);
          if (hidden) s(i, j) = -std::numeric_limits<T>::infinity();
        }
      }
    }
    softmax_rows(s);
    out.block(seg.q_begin, h * dh, seg.q_len, dh).noalias() = s * v.block(seg.k_begin, h * dh, seg.k_len, dh);
    if (probs) probs->push_back(std::move(s));
  }
}

}  // namespace molseq::nn::kernels
