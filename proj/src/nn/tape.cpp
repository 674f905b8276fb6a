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

#include "molseq/nn/tape.hpp"

#include <cmath>

#include "kernels.hpp"
#include "molseq/error.hpp"
#include "molseq/random.hpp"

namespace molseq::nn {

template <class T>
typename Tape<T>::Var Tape<T>::push(M value, bool needs_grad) {
  auto node = std::make_unique<Node>();
  node->own = std::move(value);
  node->value = &node->own;
  node->needs_grad = needs_grad;
  nodes_.push_back(std::move(node));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

template <class T>
typename Tape<T>::M& Tape<T>::grad(Var v) {
  Node& n = *nodes_[v.id];
  if (n.grad_sink) return *n.grad_sink;
  if (n.grad.size() == 0) n.grad = M::Zero(n.value->rows(), n.value->cols());
  return n.grad;
}

template <class T>
typename Tape<T>::Var Tape<T>::param(const M& value, M* grad_buffer) {
  auto node = std::make_unique<Node>();
  node->value = &value;
  node->grad_sink = grad_buffer;
  node->needs_grad = grad_buffer != nullptr;
  nodes_.push_back(std::move(node));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

template <class T>
typename Tape<T>::Var Tape<T>::constant(M value) {
  return push(std::move(value), false);
}

template <class T>
typename Tape<T>::Var Tape<T>::matmul(Var a, Var b) {
  M out;
  out.noalias() = value(a) * value(b);
  Var r = push(std::move(out), needs(a) || needs(b));
  nodes_[r.id]->back = [this, a, b, r] {
    const M& g = grad(r);
    if (needs(a)) grad(a).noalias() += g * value(b).transpose();
    if (needs(b)) grad(b).noalias() += value(a).transpose() * g;
  };
  return r;
}

template <class T>
typename Tape<T>::Var Tape<T>::matmul_nt(Var a, Var b) {
  M out;
  out.noalias() = value(a) * value(b).transpose();
  Var r = push(std::move(out), needs(a) || needs(b));
  nodes_[r.id]->back = [this, a, b, r] {
    const M& g = grad(r);
    if (needs(a)) grad(a).noalias() += g * value(b);
    if (needs(b)) grad(b).noalias() += g.transpose() * value(a);
  };
  return r;
}

template <class T>
typename Tape<T>::Var Tape<T>::add(Var a, Var b) {
  Var r = push(value(a) + value(b), needs(a) || needs(b));
  nodes_[r.id]->back = [this, a, b, r] {
    const M& g = grad(r);
    if (needs(a)) grad(a) += g;
    if (needs(b)) grad(b) += g;
  };
  return r;
}

template <class T>
typename Tape<T>::Var Tape<T>::add_bias(Var a, Var bias) {
  M out = value(a).rowwise() + value(bias).row(0);
  Var r = push(std::move(out), needs(a) || needs(bias));
  nodes_[r.id]->back = [this, a, bias, r] {
    const M& g = grad(r);
    if (needs(a)) grad(a) += g;
    if (needs(bias)) grad(bias) += g.colwise().sum();
  };
  return r;
}

template <class T>
typename Tape<T>::Var Tape<T>::layer_norm(Var x, Var gain, Var bias) {
  auto cache = std::make_shared<kernels::NormCache<T>>();
  M out = kernels::layer_norm(value(x), value(gain), value(bias), cache.get());
  Var r = push(std::move(out), needs(x) || needs(gain) || needs(bias));
  nodes_[r.id]->back = [this, x, gain, bias, r, cache] {
    const M& g = grad(r);
    const M& xhat = cache->xhat;
    if (needs(gain)) grad(gain) += (g.array() * xhat.array()).colwise().sum().matrix();
    if (needs(bias)) grad(bias) += g.colwise().sum();
    if (!needs(x)) return;
    const T d = static_cast<T>(xhat.cols());
    M dxhat = g.array().rowwise() * value(gain).row(0).array();
    M& gx = grad(x);
    for (Eigen::Index i = 0; i < xhat.rows(); ++i) {
      const T s1 = dxhat.row(i).sum();
      const T s2 = dxhat.row(i).dot(xhat.row(i));
      gx.row(i).array() += (cache->inv_std[i] / d) * (d * dxhat.row(i).array() - s1 - xhat.row(i).array() * s2);
    }
  };
  return r;
}

template <class T>
typename Tape<T>::Var Tape<T>::gelu(Var x) {
  M out = value(x).unaryExpr([](T v) { return kernels::gelu(v); });
  Var r = push(std::move(out), needs(x));
  nodes_[r.id]->back = [this, x, r] {
    grad(x).array() += grad(r).array() * value(x).unaryExpr([](T v) { return kernels::gelu_grad(v); }).array();
  };
  return r;
}

template <class T>
typename Tape<T>::Var Tape<T>::gather_rows(Var table, std::vector<int> rows) {
  const M& t = value(table);
  M out(static_cast<Eigen::Index>(rows.size()), t.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= t.rows()) throw domain_error("row index " + std::to_string(rows[i]) + " out of range");
    out.row(static_cast<Eigen::Index>(i)) = t.row(rows[i]);
  }
  Var r = push(std::move(out), needs(table));
  nodes_[r.id]->back = [this, table, r, rows = std::move(rows)] {
    const M& g = grad(r);
    M& gt = grad(table);
    for (std::size_t i = 0; i < rows.size(); ++i) gt.row(rows[i]) += g.row(static_cast<Eigen::Index>(i));
  };
  return r;
}

template <class T>
typename Tape<T>::Var Tape<T>::attention(Var q, Var k, Var v, AttentionSpec spec) {
  const M& Q = value(q);
  const M& K = value(k);
  const M& V = value(v);
  if (Q.cols() % spec.heads != 0) throw domain_error("attention width not divisible by head count");
  auto probs = std::make_shared<std::vector<M>>();
  M out = M::Zero(Q.rows(), Q.cols());
  for (const auto& seg : spec.segments) kernels::attention_segment(Q, K, V, spec, seg, out, probs.get());
  Var r = push(std::move(out), needs(q) || needs(k) || needs(v));
  nodes_[r.id]->back = [this, q, k, v, r, probs, spec = std::move(spec)] {
    const M& g = grad(r);
    const M& Q = value(q);
    const M& K = value(k);
    const M& V = value(v);
    const int dh = static_cast<int>(Q.cols()) / spec.heads;
    const T scale = T(1) / std::sqrt(T(dh));
    M* gq = needs(q) ? &grad(q) : nullptr;
    M* gk = needs(k) ? &grad(k) : nullptr;
    M* gv = needs(v) ? &grad(v) : nullptr;
    std::size_t p = 0;
    for (const auto& seg : spec.segments) {
      for (int h = 0; h < spec.heads; ++h, ++p) {
        const M& P = (*probs)[p];
        const auto go = g.block(seg.q_begin, h * dh, seg.q_len, dh);
        if (gv) gv->block(seg.k_begin, h * dh, seg.k_len, dh).noalias() += P.transpose() * go;
        M dp = go * V.block(seg.k_begin, h * dh, seg.k_len, dh).transpose();
        // dS = P * (dP - rowsum(dP * P))
        const auto rowdot = (dp.array() * P.array()).rowwise().sum().eval();
        M ds = (P.array() * (dp.array().colwise() - rowdot)).matrix() * scale;
        if (gq) gq->block(seg.q_begin, h * dh, seg.q_len, dh).noalias() += ds * K.block(seg.k_begin, h * dh, seg.k_len, dh);
        if (gk) gk->block(seg.k_begin, h * dh, seg.k_len, dh).noalias() += ds.transpose() * Q.block(seg.q_begin, h * dh, seg.q_len, dh);
      }
    }
  };
  return r;
}

template <class T>
typename Tape<T>::Var Tape<T>::dropout(Var x, T rate, std::mt19937_64& rng) {
  if (rate <= T(0)) return x;
  const M& X = value(x);
  auto mask = std::make_shared<M>(X.rows(), X.cols());
  const T keep_scale = T(1) / (T(1) - rate);
  for (Eigen::Index i = 0; i < mask->size(); ++i) {
    mask->data()[i] = uniform01(rng) < static_cast<double>(rate) ? T(0) : keep_scale;
  }
  Var r = push(X.cwiseProduct(*mask), needs(x));
  nodes_[r.id]->back = [this, x, r, mask] { grad(x) += grad(r).cwiseProduct(*mask); };
  return r;
}

template <class T>
typename Tape<T>::Var Tape<T>::cross_entropy(Var logits, std::vector<int> targets, T scale, double* unscaled) {
  const M& L = value(logits);
  if (static_cast<Eigen::Index>(targets.size()) != L.rows()) throw domain_error("cross_entropy: target count mismatch");
  auto probs = std::make_shared<M>(L);
  kernels::softmax_rows(*probs);
  double total = 0;
  for (Eigen::Index i = 0; i < L.rows(); ++i) {
    const int t = targets[i];
    if (t < 0) continue;
    if (t >= L.cols()) throw domain_error("cross_entropy: target out of range");
    // log softmax computed from the logits directly for accuracy
    const double m = static_cast<double>(L.row(i).maxCoeff());
    const double lse = m + std::log((L.row(i).array().template cast<double>() - m).exp().sum());
    total += lse - static_cast<double>(L(i, t));
  }
  if (unscaled) *unscaled = total;
  M out(1, 1);
  out(0, 0) = static_cast<T>(total * static_cast<double>(scale));
  Var r = push(std::move(out), needs(logits));
  nodes_[r.id]->back = [this, logits, r, probs, scale, targets = std::move(targets)] {
    const T g = grad(r)(0, 0) * scale;
    M& gl = grad(logits);
    for (Eigen::Index i = 0; i < probs->rows(); ++i) {
      const int t = targets[i];
      if (t < 0) continue;
      gl.row(i) += g * probs->row(i);
      gl(i, t) -= g;
    }
  };
  return r;
}

template <class T>
void Tape<T>::backward(Var root) {
  if (value(root).size() != 1) throw domain_error("backward requires a scalar root");
  if (!needs(root)) return;
  grad(root)(0, 0) += T(1);
  for (int i = root.id; i >= 0; --i) {
    Node& n = *nodes_[i];
    if (n.back && n.needs_grad && (n.grad.size() != 0)) n.back();
  }
}

template class Tape<float>;
template class Tape<double>;

}  // namespace molseq::nn
