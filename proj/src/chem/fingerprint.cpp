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

#include "molseq/chem/fingerprint.hpp"

#include <algorithm>
#include <bit>
#include <string>
#include <utility>

#include "molseq/error.hpp"

namespace molseq::chem {

namespace {

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t combine(std::uint64_t seed, std::uint64_t value) {
  return mix(seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

}  // namespace

Fingerprint::Fingerprint(int width, int radius)
    : width_(width), radius_(radius), words_(static_cast<std::size_t>((width + 63) / 64), 0) {}

void Fingerprint::set(int bit) {
  words_.at(bit / 64) |= std::uint64_t{1} << (bit % 64);
}

bool Fingerprint::test(int bit) const {
  return (words_.at(bit / 64) >> (bit % 64)) & 1U;
}

int Fingerprint::popcount() const noexcept {
  int n = 0;
  for (auto w : words_) n += std::popcount(w);
  return n;
}

std::vector<std::uint64_t> environment_ids(const MolecularGraph& graph, int radius) {
  const int n = graph.num_atoms();
  std::vector<std::uint64_t> current(n);
  for (int v = 0; v < n; ++v) {
    const Atom& a = graph.atom(v);
    std::uint64_t h = combine(0, static_cast<std::uint64_t>(atomic_number(a.element)));
    h = combine(h, static_cast<std::uint64_t>(a.charge + 16));
    h = combine(h, static_cast<std::uint64_t>(graph.degree(v)));
    h = combine(h, static_cast<std::uint64_t>(graph.total_h(v)));
    current[v] = h;
  }
  std::vector<std::uint64_t> all(current);
  for (int r = 1; r <= radius; ++r) {
    std::vector<std::uint64_t> next(n);
    for (int v = 0; v < n; ++v) {
      std::vector<std::pair<int, std::uint64_t>> env;
      for (const auto& nb : graph.neighbors(v)) env.push_back({graph.bond(nb.bond).order, current[nb.atom]});
      std::sort(env.begin(), env.end());
      std::uint64_t h = combine(static_cast<std::uint64_t>(r), current[v]);
      for (const auto& [order, id] : env) h = combine(combine(h, static_cast<std::uint64_t>(order)), id);
      next[v] = h;
    }
    current = std::move(next);
    all.insert(all.end(), current.begin(), current.end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

Fingerprint fingerprint(const MolecularGraph& graph, int radius, int width) {
  if (radius < 0) throw domain_error("fingerprint radius must be >= 0");
  if (width < 64 || !std::has_single_bit(static_cast<unsigned>(width))) {
    throw domain_error("fingerprint width must be a power of two >= 64, got " + std::to_string(width));
  }
  Fingerprint fp(width, radius);
  const int shift = 64 - std::countr_zero(static_cast<unsigned>(width));
  for (std::uint64_t id : environment_ids(graph, radius)) fp.set(static_cast<int>(id >> shift));
  return fp;
}

double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  if (a.width() != b.width()) {
    throw domain_error("fingerprint width mismatch: " + std::to_string(a.width()) + " vs " + std::to_string(b.width()));
  }
  int both = 0;
  int either = 0;
  for (std::size_t i = 0; i < a.words().size(); ++i) {
    both += std::popcount(a.words()[i] & b.words()[i]);
    either += std::popcount(a.words()[i] | b.words()[i]);
  }
  if (either == 0) return 1.0;
  return static_cast<double>(both) / static_cast<double>(either);
}

}  // namespace molseq::chem
