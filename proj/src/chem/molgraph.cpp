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

#include "molseq/chem/molgraph.hpp"

#include <algorithm>
#include <string>

#include "molseq/error.hpp"

namespace molseq::chem {

int MolecularGraph::add_atom(const Atom& atom) {
  atoms_.push_back(atom);
  adjacency_.emplace_back();
  return num_atoms() - 1;
}

int MolecularGraph::add_bond(int a, int b, int order) {
  if (a < 0 || b < 0 || a >= num_atoms() || b >= num_atoms()) {
    throw domain_error("bond endpoint out of range");
  }
  if (a == b) throw domain_error("bond from atom " + std::to_string(a) + " to itself");
  if (order < 1 || order > 3) throw domain_error("unsupported bond order " + std::to_string(order));
  if (bond_between(a, b)) {
    throw domain_error("duplicate bond between atoms " + std::to_string(a) + " and " + std::to_string(b));
  }
  const int id = num_bonds();
  bonds_.push_back({a, b, order});
  adjacency_[a].push_back({b, id});
  adjacency_[b].push_back({a, id});
  return id;
}

void MolecularGraph::set_bond_order(int bond, int order) {
  if (order < 1 || order > 3) throw domain_error("unsupported bond order " + std::to_string(order));
  bonds_.at(bond).order = order;
}

std::optional<int> MolecularGraph::bond_between(int a, int b) const {
  for (const auto& n : adjacency_.at(a)) {
    if (n.atom == b) return n.bond;
  }
  return std::nullopt;
}

int MolecularGraph::bond_order_sum(int atom) const {
  int sum = 0;
  for (const auto& n : adjacency_.at(atom)) sum += bonds_[n.bond].order;
  return sum;
}

int MolecularGraph::implicit_h(int atom) const {
  const Atom& a = atoms_.at(atom);
  if (a.bracket || a.charge != 0) return 0;
  return std::max(0, implicit_hydrogens(a.element, bond_order_sum(atom) + a.explicit_h));
}

bool MolecularGraph::is_connected() const {
  if (atoms_.empty()) return true;
  std::vector<char> seen(atoms_.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (const auto& n : adjacency_[v]) {
      if (!seen[n.atom]) {
        seen[n.atom] = 1;
        ++count;
        stack.push_back(n.atom);
      }
    }
  }
  return count == num_atoms();
}

bool MolecularGraph::valence_ok() const {
  for (int i = 0; i < num_atoms(); ++i) {
    const auto cap = max_valence(atoms_[i].element, atoms_[i].charge);
    if (!cap || atoms_[i].explicit_h < 0) return false;
    if (bond_order_sum(i) + atoms_[i].explicit_h > *cap) return false;
  }
  return true;
}

void MolecularGraph::validate() const {
  for (int i = 0; i < num_atoms(); ++i) {
    const Atom& a = atoms_[i];
    const auto cap = max_valence(a.element, a.charge);
    if (!cap) {
      throw domain_error("unsupported charge " + std::to_string(a.charge) + " on " +
                         std::string(symbol(a.element)) + " (atom " + std::to_string(i) + ")");
    }
    if (a.explicit_h < 0) throw domain_error("negative hydrogen count on atom " + std::to_string(i));
    const int used = bond_order_sum(i) + a.explicit_h;
    if (used > *cap) {
      throw domain_error("valence violation on atom " + std::to_string(i) + " (" +
                         std::string(symbol(a.element)) + "): " + std::to_string(used) + " > " +
                         std::to_string(*cap));
    }
  }
  if (!is_connected()) throw domain_error("molecule has disconnected fragments");
}

MolecularGraph MolecularGraph::permuted(std::span<const int> perm) const {
  if (static_cast<int>(perm.size()) != num_atoms()) throw domain_error("permutation size mismatch");
  std::vector<int> inverse(perm.size(), -1);
  for (int i = 0; i < num_atoms(); ++i) inverse.at(perm[i]) = i;
  MolecularGraph out;
  for (int j = 0; j < num_atoms(); ++j) out.add_atom(atoms_[inverse[j]]);
  for (const Bond& b : bonds_) out.add_bond(perm[b.begin], perm[b.end], b.order);
  return out;
}

int heavy_atom_count(const MolecularGraph& g) {
  int n = 0;
  for (const Atom& a : g.atoms()) n += a.element != Element::H;
  return n;
}

}  // namespace molseq::chem
