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

#include <compare>
#include <string>
#include <vector>

#include "molseq/chem/molgraph.hpp"

namespace molseq::chem {

//! Unique SMILES text per isomorphism class (element, charge, H count, bond order).
struct CanonicalSmiles {
  std::string text;

  bool empty() const noexcept { return text.empty(); }
  friend auto operator<=>(const CanonicalSmiles&, const CanonicalSmiles&) = default;
};

/// Canonical atom labelling: rank[v] is atom v's position in canonical order.
///
/// Iterative neighbourhood refinement on atom invariants, then exhaustive
/// individualization of the first smallest non-singleton cell; the labelling
/// with the lexicographically smallest graph certificate wins. Automorphisms
/// found along the way prune equivalent branches.
std::vector<int> canonical_ranks(const MolecularGraph& graph);

//! Empty graph -> empty text.
CanonicalSmiles canonicalize(const MolecularGraph& graph);

}  // namespace molseq::chem
