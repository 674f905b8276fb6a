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

#include "molseq/chem/smiles.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include "molseq/error.hpp"

namespace molseq::chem {

namespace {

constexpr int kAromaticBond = 0;

struct RingOpening {
  int atom;
  std::optional<int> order;  // explicit bond symbol at the opening
  std::size_t position;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<Element> aromatic_element(char c) {
  switch (c) {
    case 'b': return Element::B;
    case 'c': return Element::C;
    case 'n': return Element::N;
    case 'o': return Element::O;
    case 'p': return Element::P;
    case 's': return Element::S;
    default: return std::nullopt;
  }
}

class SmilesParser {
 public:
  explicit SmilesParser(std::string_view text) : text_(text) {}

  MolecularGraph parse() {
    if (text_.empty()) throw ParseError("empty SMILES", 0);
    while (pos_ < text_.size()) step();
    if (pending_bond_) throw ParseError("dangling bond symbol", bond_pos_);
    if (!branches_.empty()) throw ParseError("unclosed branch", branch_pos_.back());
    if (!rings_.empty()) {
      throw ParseError("unclosed ring bond " + std::to_string(rings_.begin()->first), rings_.begin()->second.position);
    }
    kekulize();
    graph_.validate();
    return std::move(graph_);
  }

 private:
  void step() {
    const char c = text_[pos_];
    switch (c) {
      case '(':
        if (prev_ < 0) throw ParseError("branch before first atom", pos_);
        if (pending_bond_) throw ParseError("bond symbol before branch", pos_);
        branches_.push_back(prev_);
        branch_pos_.push_back(pos_);
        ++pos_;
        return;
      case ')':
        if (branches_.empty()) throw ParseError("unbalanced ')'", pos_);
        if (pending_bond_) throw ParseError("dangling bond symbol", bond_pos_);
        prev_ = branches_.back();
        branches_.pop_back();
        branch_pos_.pop_back();
        ++pos_;
        return;
      case '-': set_bond(1); return;
      case '=': set_bond(2); return;
      case '#': set_bond(3); return;
      case ':': set_bond(kAromaticBond); return;
      case '/':
      case '\\': throw ParseError("stereo bonds are not supported", pos_);
      case '$': throw ParseError("quadruple bonds are not supported", pos_);
      case '.': throw ParseError("disconnected fragments ('.') are not supported", pos_);
      case '%':
      case '0': case '1': case '2': case '3': case '4':
      case '5': case '6': case '7': case '8': case '9':
        ring_closure();
        return;
      case '[':
        bracket_atom();
        return;
      default:
        organic_atom();
        return;
    }
  }

  void set_bond(int order) {
    if (pending_bond_) throw ParseError("consecutive bond symbols", pos_);
    if (prev_ < 0) throw ParseError("bond before first atom", pos_);
    pending_bond_ = order;
    bond_pos_ = pos_;
    ++pos_;
  }

  void ring_closure() {
    const std::size_t start = pos_;
    if (prev_ < 0) throw ParseError("ring bond before first atom", pos_);
    int number = 0;
    if (text_[pos_] == '%') {
      if (pos_ + 2 >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) ||
          !std::isdigit(static_cast<unsigned char>(text_[pos_ + 2]))) {
        throw ParseError("'%' must be followed by two digits", pos_);
      }
      number = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
      pos_ += 3;
    } else {
      number = text_[pos_] - '0';
      ++pos_;
    }
    auto it = rings_.find(number);
    if (it == rings_.end()) {
      rings_[number] = RingOpening{prev_, pending_bond_, start};
      pending_bond_.reset();
      return;
    }
    const RingOpening open = it->second;
    rings_.erase(it);
    if (open.atom == prev_) throw ParseError("ring bond from an atom to itself", start);
    std::optional<int> order = pending_bond_;
    if (open.order && order && *open.order != *order) {
      throw ParseError("conflicting ring bond symbols", start);
    }
    if (!order) order = open.order;
    pending_bond_.reset();
    connect(open.atom, prev_, order, start);
  }

  void organic_atom() {
    const char c = text_[pos_];
    Atom atom;
    bool aromatic = false;
    std::size_t len = 1;
    if (c == 'C' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'l') {
      atom.element = Element::Cl;
      len = 2;
    } else if (c == 'B' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'r') {
      atom.element = Element::Br;
      len = 2;
    } else if (auto ar = aromatic_element(c)) {
      atom.element = *ar;
      aromatic = true;
    } else {
      const auto e = element_from_symbol(std::string_view(&text_[pos_], 1));
      if (!e || *e == Element::H) {
        if (std::isalpha(static_cast<unsigned char>(c))) {
          throw ParseError(std::string("unsupported element '") + c + "'", pos_);
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
      }
      atom.element = *e;
    }
    const std::size_t start = pos_;
    pos_ += len;
    add_atom(atom, aromatic, start);
  }

  void bracket_atom() {
    const std::size_t start = pos_;
    ++pos_;  // '['
    auto peek = [&]() -> char { return pos_ < text_.size() ? text_[pos_] : '\0'; };
    if (std::isdigit(static_cast<unsigned char>(peek()))) throw ParseError("isotopes are not supported", pos_);

    Atom atom;
    atom.bracket = true;
    bool aromatic = false;
    const char c = peek();
    if (std::isupper(static_cast<unsigned char>(c))) {
      std::size_t len = 1;
      if (std::islower(static_cast<unsigned char>(pos_ + 1 < text_.size() ? text_[pos_ + 1] : '\0'))) len = 2;
      const std::string_view sym = text_.substr(pos_, len);
      const auto e = element_from_symbol(sym);
      if (!e) throw ParseError("unsupported element '" + std::string(sym) + "'", pos_);
      atom.element = *e;
      pos_ += len;
    } else if (auto ar = aromatic_element(c)) {
      atom.element = *ar;
      aromatic = true;
      ++pos_;
    } else {
      throw ParseError("expected element symbol in bracket atom", pos_);
    }

    if (peek() == '@') throw ParseError("chirality is not supported", pos_);
    if (peek() == 'H') {
      ++pos_;
      int count = 1;
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        count = 0;
        while (std::isdigit(static_cast<unsigned char>(peek()))) count = count * 10 + (text_[pos_++] - '0');
      }
      atom.explicit_h = count;
    }
    if (peek() == '+' || peek() == '-') {
      const char sign = text_[pos_++];
      int magnitude = 1;
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        magnitude = 0;
        while (std::isdigit(static_cast<unsigned char>(peek()))) magnitude = magnitude * 10 + (text_[pos_++] - '0');
      } else {
        while (peek() == sign) {
          ++magnitude;
          ++pos_;
        }
      }
      atom.charge = sign == '+' ? magnitude : -magnitude;
    }
    if (peek() == ':') throw ParseError("atom classes are not supported", pos_);
    if (peek() != ']') throw ParseError("unterminated bracket atom", pos_);
    ++pos_;
    add_atom(atom, aromatic, start);
  }

  void add_atom(const Atom& atom, bool aromatic, std::size_t position) {
    const int id = graph_.add_atom(atom);
    aromatic_.push_back(aromatic);
    if (prev_ >= 0) {
      connect(prev_, id, pending_bond_, pending_bond_ ? bond_pos_ : position);
    } else if (pending_bond_) {
      throw ParseError("bond before first atom", bond_pos_);
    }
    pending_bond_.reset();
    prev_ = id;
  }

  void connect(int a, int b, std::optional<int> order, std::size_t position) {
    int resolved = order.value_or(aromatic_[a] && aromatic_[b] ? kAromaticBond : 1);
    if (resolved == kAromaticBond && !(aromatic_[a] && aromatic_[b])) {
      throw ParseError("aromatic bond between non-aromatic atoms", position);
    }
    if (graph_.bond_between(a, b)) throw ParseError("duplicate bond", position);
    // Aromatic bonds are stored as single until kekulization assigns orders.
    const int bond = graph_.add_bond(a, b, resolved == kAromaticBond ? 1 : resolved);
    if (resolved == kAromaticBond) aromatic_bonds_.push_back(bond);
  }

  void kekulize() {
    if (aromatic_bonds_.empty() && std::none_of(aromatic_.begin(), aromatic_.end(), [](bool b) { return b; })) {
      return;
    }
    const int n = graph_.num_atoms();
    std::vector<char> is_aromatic_bond(graph_.num_bonds(), 0);
    for (int b : aromatic_bonds_) is_aromatic_bond[b] = 1;

    // An aromatic atom needs one double bond iff it has free valence once its
    // aromatic bonds are counted as single.
    std::vector<char> needs(n, 0);
    for (int i = 0; i < n; ++i) {
      if (!aromatic_[i]) continue;
      const Atom& a = graph_.atom(i);
      int target = default_valence(a.element);
      if (a.bracket && a.charge != 0) {
        const auto cap = max_valence(a.element, a.charge);
        if (!cap) throw ParseError("unsupported aromatic charge state", 0);
        target = *cap;
      }
      const int used = graph_.bond_order_sum(i) + a.explicit_h;
      needs[i] = target - used >= 1;
    }

    std::vector<int> mate(n, -1);
    long budget = 2'000'000;
    if (!match(needs, is_aromatic_bond, mate, budget)) {
      throw ParseError("aromatic system cannot be kekulized", 0);
    }
    for (int i = 0; i < n; ++i) {
      if (mate[i] > i) graph_.set_bond_order(*graph_.bond_between(i, mate[i]), 2);
    }
  }

  // Perfect matching of needy atoms over aromatic bonds; most-constrained-first backtracking.
  bool match(const std::vector<char>& needs, const std::vector<char>& arom_bond, std::vector<int>& mate,
             long& budget) const {
    if (--budget < 0) throw ParseError("kekulization search exhausted", 0);
    const int n = graph_.num_atoms();
    int best = -1;
    int best_options = 1 << 30;
    for (int i = 0; i < n; ++i) {
      if (!needs[i] || mate[i] >= 0) continue;
      int options = 0;
      for (const auto& nb : graph_.neighbors(i)) {
        options += arom_bond[nb.bond] && needs[nb.atom] && mate[nb.atom] < 0;
      }
      if (options < best_options) {
        best = i;
        best_options = options;
      }
    }
    if (best < 0) return true;
    if (best_options == 0) return false;
    for (const auto& nb : graph_.neighbors(best)) {
      if (!(arom_bond[nb.bond] && needs[nb.atom] && mate[nb.atom] < 0)) continue;
      mate[best] = nb.atom;
      mate[nb.atom] = best;
      if (match(needs, arom_bond, mate, budget)) return true;
      mate[best] = -1;
      mate[nb.atom] = -1;
    }
    return false;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  MolecularGraph graph_;
  std::vector<bool> aromatic_;
  std::vector<int> aromatic_bonds_;
  int prev_ = -1;
  std::optional<int> pending_bond_;
  std::size_t bond_pos_ = 0;
  std::vector<int> branches_;
  std::vector<std::size_t> branch_pos_;
  std::map<int, RingOpening> rings_;
};

std::string atom_text(const MolecularGraph& g, int v) {
  const Atom& a = g.atom(v);
  const int h = g.total_h(v);
  const bool bare = a.charge == 0 && in_organic_subset(a.element) &&
                    h == std::max(0, implicit_hydrogens(a.element, g.bond_order_sum(v)));
  std::string out(symbol(a.element));
  if (bare) return out;
  out = "[" + out;
  if (h > 0) {
    out += 'H';
    if (h > 1) out += std::to_string(h);
  }
  if (a.charge != 0) {
    out += a.charge > 0 ? '+' : '-';
    if (std::abs(a.charge) > 1) out += std::to_string(std::abs(a.charge));
  }
  out += ']';
  return out;
}

std::string_view bond_text(int order) {
  switch (order) {
    case 2: return "=";
    case 3: return "#";
    default: return "";
  }
}

class SmilesWriter {
 public:
  SmilesWriter(const MolecularGraph& g, std::span<const int> rank) : g_(g), rank_(rank) {
    const int n = g.num_atoms();
    sorted_neighbors_.resize(n);
    for (int v = 0; v < n; ++v) {
      auto nbrs = g.neighbors(v);
      sorted_neighbors_[v].assign(nbrs.begin(), nbrs.end());
      std::sort(sorted_neighbors_[v].begin(), sorted_neighbors_[v].end(),
                [&](const Neighbor& x, const Neighbor& y) { return rank_[x.atom] < rank_[y.atom]; });
    }
  }

  std::string write() {
    const int n = g_.num_atoms();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return rank_[a] < rank_[b]; });

    visited_.assign(n, 0);
    children_.assign(n, {});
    ring_bonds_.assign(n, {});
    bond_used_.assign(g_.num_bonds(), 0);
    std::string out;
    for (int root : order) {
      if (visited_[root]) continue;
      build_tree(root);
      if (!out.empty()) out += '.';
      emit(root, out);
    }
    return out;
  }

 private:
  struct RingEnd {
    int bond;
    int partner;
  };

  void build_tree(int root) {
    // Iterative DFS; neighbours visited in rank order. Non-tree bonds become ring closures.
    struct Frame {
      int atom;
      std::size_t next;
    };
    std::vector<Frame> stack{{root, 0}};
    visited_[root] = 1;
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto& nbrs = sorted_neighbors_[f.atom];
      if (f.next == nbrs.size()) {
        stack.pop_back();
        continue;
      }
      const Neighbor nb = nbrs[f.next++];
      if (bond_used_[nb.bond]) continue;
      bond_used_[nb.bond] = 1;
      if (visited_[nb.atom]) {
        ring_bonds_[nb.atom].push_back({nb.bond, f.atom});  // opened at the earlier atom
        ring_bonds_[f.atom].push_back({nb.bond, nb.atom});
        continue;
      }
      visited_[nb.atom] = 1;
      children_[f.atom].push_back({nb.atom, nb.bond});
      stack.push_back({nb.atom, 0});
    }
  }

  int take_digit() {
    for (int d = 1;; ++d) {
      if (!digit_in_use_.count(d)) {
        digit_in_use_.insert({d, 0});
        return d;
      }
    }
  }

  static std::string digit_text(int d) { return d < 10 ? std::to_string(d) : "%" + std::to_string(d); }

  void emit(int root, std::string& out) {
    struct Item {
      int atom;
      int bond;  // bond from parent, -1 for root
      bool open_paren;
    };
    // Explicit stack of pending output actions: atoms to write and ')' markers (atom = -1).
    std::vector<Item> work{{root, -1, false}};
    while (!work.empty()) {
      const Item it = work.back();
      work.pop_back();
      if (it.atom < 0) {
        out += ')';
        continue;
      }
      if (it.open_paren) out += '(';
      if (it.bond >= 0) out += bond_text(g_.bond(it.bond).order);
      out += atom_text(g_, it.atom);

      // Closings first so their digits are reusable by openings at the same atom.
      for (const RingEnd& r : ring_bonds_[it.atom]) {
        auto open = open_digits_.find(r.bond);
        if (open == open_digits_.end()) continue;
        out += digit_text(open->second);
        digit_in_use_.erase(open->second);
        open_digits_.erase(open);
      }
      for (const RingEnd& r : ring_bonds_[it.atom]) {
        if (open_digits_.count(r.bond) || ring_started_.count(r.bond)) continue;
        const int d = take_digit();
        open_digits_[r.bond] = d;
        ring_started_.insert({r.bond, 0});
        out += bond_text(g_.bond(r.bond).order);
        out += digit_text(d);
      }

      const auto& kids = children_[it.atom];
      if (kids.empty()) continue;
      // Last child continues the chain; earlier children are parenthesised branches.
      work.push_back({kids.back().atom, kids.back().bond, false});
      for (std::size_t k = kids.size() - 1; k-- > 0;) {
        work.push_back({-1, -1, false});
        work.push_back({kids[k].atom, kids[k].bond, true});
      }
    }
  }

  struct Child {
    int atom;
    int bond;
  };

  const MolecularGraph& g_;
  std::span<const int> rank_;
  std::vector<std::vector<Neighbor>> sorted_neighbors_;
  std::vector<char> visited_;
  std::vector<std::vector<Child>> children_;
  std::vector<std::vector<RingEnd>> ring_bonds_;
  std::vector<char> bond_used_;
  std::map<int, int> open_digits_;  // bond -> digit
  std::map<int, int> digit_in_use_;
  std::map<int, int> ring_started_;
};

}  // namespace

MolecularGraph parse_smiles(std::string_view text) {
  return SmilesParser(trim(text)).parse();
}

std::string write_smiles(const MolecularGraph& graph) {
  std::vector<int> rank(graph.num_atoms());
  std::iota(rank.begin(), rank.end(), 0);
  return write_smiles(graph, rank);
}

std::string write_smiles(const MolecularGraph& graph, std::span<const int> rank) {
  if (static_cast<int>(rank.size()) != graph.num_atoms()) throw domain_error("rank size mismatch");
  return SmilesWriter(graph, rank).write();
}

}  // namespace molseq::chem
