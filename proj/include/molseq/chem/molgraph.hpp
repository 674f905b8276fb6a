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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "molseq/chem/element.hpp"

namespace molseq::chem {

struct Atom {
  Element element = Element::C;
  int charge = 0;
  int explicit_h = 0;
  //! Bracket atoms carry no implicit hydrogens (SMILES semantics).
  bool bracket = false;

  friend bool operator==(const Atom&, const Atom&) = default;
};

struct Bond {
  int begin = 0;
  int end = 0;
  int order = 1;  // 1, 2 or 3
};

struct Neighbor {
  int atom;
  int bond;  // index into bonds()
};

//! Hydrogen-suppressed molecular graph. Implicit hydrogens are derived, never stored.
class MolecularGraph {
 public:
  int add_atom(const Atom& atom);
  //! Adds a bond; throws domain_error on self-loops, bad indices, duplicates or bad order.
  int add_bond(int a, int b, int order);
  void set_bond_order(int bond, int order);

  int num_atoms() const noexcept { return static_cast<int>(atoms_.size()); }
  int num_bonds() const noexcept { return static_cast<int>(bonds_.size()); }
  bool empty() const noexcept { return atoms_.empty(); }

  const Atom& atom(int i) const { return atoms_.at(i); }
  Atom& atom(int i) { return atoms_.at(i); }
  const Bond& bond(int i) const { return bonds_.at(i); }
  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::span<const Bond> bonds() const noexcept { return bonds_; }
  std::span<const Neighbor> neighbors(int atom) const { return adjacency_.at(atom); }

  std::optional<int> bond_between(int a, int b) const;
  int degree(int atom) const { return static_cast<int>(adjacency_.at(atom).size()); }
  int bond_order_sum(int atom) const;
  int implicit_h(int atom) const;
  int total_h(int atom) const { return implicit_h(atom) + atoms_.at(atom).explicit_h; }

  bool is_connected() const;
  //! Every atom within its element/charge capacity.
  bool valence_ok() const;
  //! Throws domain_error naming the first violated invariant.
  void validate() const;

  //! Copy with atom i moved to position perm[i].
  MolecularGraph permuted(std::span<const int> perm) const;

 private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

//! Number of heavy (non-hydrogen) atoms.
int heavy_atom_count(const MolecularGraph& g);

}  // namespace molseq::chem
