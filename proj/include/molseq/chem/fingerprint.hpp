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
#include <vector>

#include "molseq/chem/molgraph.hpp"

namespace molseq::chem {

inline constexpr int kDefaultFingerprintRadius = 2;
inline constexpr int kDefaultFingerprintWidth = 1024;

//! Fixed-width bit vector of folded circular-environment hashes.
class Fingerprint {
 public:
  Fingerprint() = default;
  Fingerprint(int width, int radius);

  int width() const noexcept { return width_; }
  int radius() const noexcept { return radius_; }
  void set(int bit);
  bool test(int bit) const;
  int popcount() const noexcept;
  const std::vector<std::uint64_t>& words() const noexcept { return words_; }

  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;

 private:
  int width_ = 0;
  int radius_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Circular (ECFP-style) fingerprint. Environment identifiers for radius
/// 0..radius are 64-bit hashes of (element, charge, degree, H count) refined by
/// sorted (bond order, neighbour identifier) lists; each sets the bit given
/// by its top log2(width) bits.
/// Requires radius >= 0 and width a power of two >= 64.
Fingerprint fingerprint(const MolecularGraph& graph, int radius = kDefaultFingerprintRadius,
                        int width = kDefaultFingerprintWidth);

//! Distinct environment identifiers before folding (exposed for tests and diagnostics).
std::vector<std::uint64_t> environment_ids(const MolecularGraph& graph, int radius);

//! |a & b| / |a | b|; 1.0 when both are empty. Throws on width mismatch.
double tanimoto(const Fingerprint& a, const Fingerprint& b);

}  // namespace molseq::chem
