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

#include "molseq/chem/canonical.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <utility>

#include "molseq/chem/smiles.hpp"

namespace molseq::chem {

namespace {

using Ranks = std::vector<int>;

class CanonicalSearch {
 public:
  explicit CanonicalSearch(const MolecularGraph& g) : g_(g), n_(g.num_atoms()) {
    codes_.resize(n_);
    for (int v = 0; v < n_; ++v) {
      const Atom& a = g.atom(v);
      std::int64_t code = atomic_number(a.element);
      code = code * 16 + (a.charge + 8);
      code = code * 16 + g.degree(v);
      code = code * 16 + g.total_h(v);
      code = code * 32 + g.bond_order_sum(v);
      codes_[v] = code;
    }
    adj_.resize(n_);
    for (int v = 0; v < n_; ++v) {
      for (const auto& nb : g.neighbors(v)) adj_[v].push_back({nb.atom, g.bond(nb.bond).order});
    }
  }

  Ranks run() {
    Ranks initial = ranks_from_keys(codes_);
    std::vector<int> path;
    search(std::move(initial), path);
    return best_ranks_;
  }

 private:
  template <class Key>
  Ranks ranks_from_keys(const std::vector<Key>& keys) const {
    std::vector<int> order(n_);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return keys[a] < keys[b]; });
    Ranks r(n_);
    for (int i = 0; i < n_; ++i) {
      const int v = order[i];
      r[v] = (i > 0 && !(keys[order[i - 1]] < keys[v])) ? r[order[i - 1]] : i;
    }
    return r;
  }

  static int cell_count(const Ranks& r) {
    std::vector<int> s(r);
    std::sort(s.begin(), s.end());
    return static_cast<int>(std::unique(s.begin(), s.end()) - s.begin());
  }

  // Split cells by the multiset of (neighbour rank, bond order) until stable.
  Ranks refine(Ranks r) const {
    int cells = cell_count(r);
    while (cells < n_) {
      std::vector<std::pair<int, std::vector<std::pair<int, int>>>> sig(n_);
      for (int v = 0; v < n_; ++v) {
        sig[v].first = r[v];
        for (const auto& [u, order] : adj_[v]) sig[v].second.push_back({r[u], order});
        std::sort(sig[v].second.begin(), sig[v].second.end());
      }
      Ranks next = ranks_from_keys(sig);
      const int next_cells = cell_count(next);
      r = std::move(next);
      if (next_cells == cells) break;
      cells = next_cells;
    }
    return r;
  }

  std::vector<std::int64_t> certificate(const Ranks& r) const {
    std::vector<std::int64_t> cert(n_);
    for (int v = 0; v < n_; ++v) cert[r[v]] = codes_[v];
    std::vector<std::int64_t> edges;
    edges.reserve(g_.num_bonds());
    for (const Bond& b : g_.bonds()) {
      const std::int64_t lo = std::min(r[b.begin], r[b.end]);
      const std::int64_t hi = std::max(r[b.begin], r[b.end]);
      edges.push_back((lo * n_ + hi) * 4 + b.order);
    }
    std::sort(edges.begin(), edges.end());
    cert.insert(cert.end(), edges.begin(), edges.end());
    return cert;
  }

  void leaf(const Ranks& r) {
    auto cert = certificate(r);
    if (best_ranks_.empty() || cert < best_cert_) {
      best_cert_ = std::move(cert);
      best_ranks_ = r;
      return;
    }
    if (cert == best_cert_) {
      std::vector<int> by_label(n_);
      for (int v = 0; v < n_; ++v) by_label[best_ranks_[v]] = v;
      std::vector<int> gamma(n_);
      for (int v = 0; v < n_; ++v) gamma[v] = by_label[r[v]];
      automorphisms_.push_back(std::move(gamma));
    }
  }

  // Orbit representative of `v` under stored automorphisms that fix `path` pointwise.
  std::vector<int> orbits_fixing(const std::vector<int>& path) const {
    std::vector<int> parent(n_);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& gamma : automorphisms_) {
      bool fixes = std::all_of(path.begin(), path.end(), [&](int p) { return gamma[p] == p; });
      if (!fixes) continue;
      for (int v = 0; v < n_; ++v) {
        const int a = find(v), b = find(gamma[v]);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
    for (int v = 0; v < n_; ++v) parent[v] = find(v);
    return parent;
  }

  void search(Ranks r, std::vector<int>& path) {
    r = refine(std::move(r));
    if (cell_count(r) == n_) {
      leaf(r);
      return;
    }
    // Target: smallest non-singleton cell, lowest rank on ties.
    std::vector<int> size(n_, 0);
    for (int v = 0; v < n_; ++v) ++size[r[v]];
    int cell = -1;
    for (int c = 0; c < n_; ++c) {
      if (size[c] > 1 && (cell < 0 || size[c] < size[cell])) cell = c;
    }
    std::vector<int> members;
    for (int v = 0; v < n_; ++v) {
      if (r[v] == cell) members.push_back(v);
    }

    std::vector<int> explored;
    for (int v : members) {
      if (!explored.empty()) {
        const auto orbit = orbits_fixing(path);
        const bool equivalent =
            std::any_of(explored.begin(), explored.end(), [&](int u) { return orbit[u] == orbit[v]; });
        if (equivalent) continue;
      }
      explored.push_back(v);
      Ranks child = r;
      for (int u : members) {
        if (u != v) child[u] = cell + 1;
      }
      path.push_back(v);
      search(std::move(child), path);
      path.pop_back();
    }
  }

  const MolecularGraph& g_;
  int n_;
  std::vector<std::int64_t> codes_;
  std::vector<std::vector<std::pair<int, int>>> adj_;
  std::vector<std::int64_t> best_cert_;
  Ranks best_ranks_;
  std::vector<std::vector<int>> automorphisms_;
};

}  // namespace

std::vector<int> canonical_ranks(const MolecularGraph& graph) {
  if (graph.empty()) return {};
  return CanonicalSearch(graph).run();
}

CanonicalSmiles canonicalize(const MolecularGraph& graph) {
  if (graph.empty()) return {};
  const auto ranks = canonical_ranks(graph);
  return {write_smiles(graph, ranks)};
}

}  // namespace molseq::chem
