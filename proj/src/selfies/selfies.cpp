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

#include "molseq/selfies/selfies.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <unordered_map>

#include "molseq/error.hpp"

namespace molseq::selfies {

namespace {

struct TokenInfo {
  std::string text;
  TokenKind kind;
  int order;
  chem::Element element;
  int size_class;
  int index_value;
};

constexpr std::array<std::string_view, 3> kBondPrefix = {"", "=", "#"};

// Fixed index alphabet: symbol -> base-16 digit.
constexpr std::array<std::string_view, 16> kIndexAlphabet = {
    "[C]",       "[Ring1]", "[Ring2]", "[Branch1]", "[=Branch1]", "[#Branch1]", "[Branch2]", "[=Branch2]",
    "[#Branch2]", "[O]",     "[N]",     "[=N]",      "[=C]",       "[#C]",       "[S]",       "[P]",
};

struct Alphabet {
  std::vector<TokenInfo> info;
  std::unordered_map<std::string, std::uint8_t> by_text;

  Alphabet() {
    for (int b = 0; b < 3; ++b) {
      for (chem::Element e : chem::kAllElements) {
        add({"[" + std::string(kBondPrefix[b]) + std::string(chem::symbol(e)) + "]", TokenKind::Atom, b + 1, e, 0, 0});
      }
    }
    for (TokenKind kind : {TokenKind::Branch, TokenKind::Ring}) {
      for (int k = 1; k <= 3; ++k) {
        for (int b = 0; b < 3; ++b) {
          const char* word = kind == TokenKind::Branch ? "Branch" : "Ring";
          add({"[" + std::string(kBondPrefix[b]) + word + std::to_string(k) + "]", kind, b + 1, chem::Element::C, k, 0});
        }
      }
    }
    for (int d = 0; d < 16; ++d) info[by_text.at(std::string(kIndexAlphabet[d]))].index_value = d;
  }

  void add(TokenInfo t) {
    by_text.emplace(t.text, static_cast<std::uint8_t>(info.size()));
    info.push_back(std::move(t));
  }
};

const Alphabet& alphabet_table() {
  static const Alphabet table;
  return table;
}

}  // namespace

// ---------------------------------------------------------------------------
// Token

std::optional<Token> Token::from_text(std::string_view text) noexcept {
  const auto& table = alphabet_table();
  auto it = table.by_text.find(std::string(text));
  if (it == table.by_text.end()) return std::nullopt;
  return Token(it->second);
}

std::span<const Token> Token::alphabet() noexcept {
  static const std::vector<Token> all = [] {
    std::vector<Token> v;
    for (std::size_t i = 0; i < alphabet_table().info.size(); ++i) v.push_back(Token(static_cast<std::uint8_t>(i)));
    return v;
  }();
  return all;
}

std::string_view Token::text() const noexcept {
  return alphabet_table().info[id_].text;
}
TokenKind Token::kind() const noexcept {
  return alphabet_table().info[id_].kind;
}
int Token::bond_order() const noexcept {
  return alphabet_table().info[id_].order;
}
chem::Element Token::element() const noexcept {
  return alphabet_table().info[id_].element;
}
int Token::size_class() const noexcept {
  return alphabet_table().info[id_].size_class;
}
int Token::index_value() const noexcept {
  return alphabet_table().info[id_].index_value;
}

// ---------------------------------------------------------------------------
// Tokenization

Tokens split_selfies(std::string_view text) {
  Tokens out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] != '[') throw ParseError("expected '['", pos);
    const std::size_t close = text.find(']', pos + 1);
    if (close == std::string_view::npos) throw ParseError("unbalanced '['", pos);
    const std::size_t nested = text.find('[', pos + 1);
    if (nested < close) throw ParseError("unbalanced '['", pos);
    const std::string_view symbol = text.substr(pos, close - pos + 1);
    const auto token = Token::from_text(symbol);
    if (!token) throw ParseError("symbol " + std::string(symbol) + " outside the alphabet", pos);
    out.push_back(*token);
    pos = close + 1;
  }
  return out;
}

std::string join_selfies(std::span<const Token> tokens) {
  std::string out;
  for (Token t : tokens) out += t.text();
  return out;
}

// ---------------------------------------------------------------------------
// Decoding

namespace {

struct PendingRing {
  int left;
  int right;
  int order;
};

class Deriver {
 public:
  explicit Deriver(std::span<const Token> tokens) : tokens_(tokens) {}

  chem::MolecularGraph run() {
    std::vector<Frame> stack{{-1, 0, tokens_.size()}};

    while (!stack.empty()) {
      Frame& f = stack.back();
      if (pos_ >= f.end || pos_ >= tokens_.size()) {
        stack.pop_back();
        continue;
      }
      const Token t = tokens_[pos_++];
      switch (t.kind()) {
        case TokenKind::Branch: {
          if (f.state <= 1) break;
          const int init = std::min(f.state - 1, t.bond_order());
          f.state -= init;
          const std::size_t length = read_index(t.size_class()) + 1;
          const int root = f.prev;
          // `f` may dangle after push_back.
          stack.push_back({root, init, pos_ + length});
          continue;
        }
        case TokenKind::Ring: {
          if (f.state == 0) break;
          const int order = std::min(t.bond_order(), f.state);
          f.state -= order;
          const int reach = read_index(t.size_class()) + 1;
          rings_.push_back({std::max(0, f.prev - reach), f.prev, order});
          if (f.state == 0) {
            terminate(stack);
            continue;
          }
          break;
        }
        case TokenKind::Atom: {
          const int cap = *chem::max_valence(t.element(), 0);
          const int order = f.state == 0 ? 0 : std::min({t.bond_order(), f.state, cap});
          chem::Atom atom;
          atom.element = t.element();
          const int id = graph_.add_atom(atom);
          if (order > 0) graph_.add_bond(f.prev, id, order);
          f.prev = id;
          f.state = cap - order;
          if (f.state == 0) {
            terminate(stack);
            continue;
          }
          break;
        }
      }
    }
    form_rings();
    return std::move(graph_);
  }

 private:
  // Each frame derives a chain. A branch frame may read symbols up to `end`;
  // the top-level frame is unbounded.
  struct Frame {
    int prev;   // last atom of the chain, -1 before the root
    int state;  // remaining bonding capacity of `prev`; 0 before the root
    std::size_t end;
  };

  // A chain whose last atom is saturated stops; the rest of its window is skipped.
  void terminate(std::vector<Frame>& stack) {
    pos_ = std::max(pos_, std::min(stack.back().end, tokens_.size()));
    stack.pop_back();
  }

  int read_index(int digits) {
    int value = 0;
    for (int i = 0; i < digits; ++i) {
      const int d = pos_ < tokens_.size() ? tokens_[pos_].index_value() : 0;
      if (pos_ < tokens_.size()) ++pos_;
      value = value * 16 + d;
    }
    return value;
  }

  void form_rings() {
    for (const PendingRing& r : rings_) {
      if (r.left == r.right) continue;
      const int lfree = *chem::max_valence(graph_.atom(r.left).element, 0) - graph_.bond_order_sum(r.left);
      const int rfree = *chem::max_valence(graph_.atom(r.right).element, 0) - graph_.bond_order_sum(r.right);
      if (lfree <= 0 || rfree <= 0) continue;
      const int order = std::min({r.order, lfree, rfree});
      if (auto existing = graph_.bond_between(r.left, r.right)) {
        graph_.set_bond_order(*existing, std::min(3, graph_.bond(*existing).order + order));
      } else {
        graph_.add_bond(r.left, r.right, order);
      }
    }
  }

  std::span<const Token> tokens_;
  std::size_t pos_ = 0;
  chem::MolecularGraph graph_;
  std::vector<PendingRing> rings_;
};

}  // namespace

chem::MolecularGraph decode(std::span<const Token> tokens) {
  return Deriver(tokens).run();
}

// ---------------------------------------------------------------------------
// Encoding

namespace {

Token atom_token(chem::Element e, int order) {
  const std::string text = "[" + std::string(kBondPrefix[order - 1]) + std::string(chem::symbol(e)) + "]";
  return *Token::from_text(text);
}

Token structural_token(TokenKind kind, int order, int size_class) {
  const char* word = kind == TokenKind::Branch ? "Branch" : "Ring";
  const std::string text = "[" + std::string(kBondPrefix[order - 1]) + word + std::to_string(size_class) + "]";
  return *Token::from_text(text);
}

// Appends `value` as K base-16 index symbols, most significant first.
void append_index(Tokens& out, TokenKind kind, int order, int value) {
  int k = value < 16 ? 1 : value < 256 ? 2 : value < 4096 ? 3 : 0;
  if (k == 0) throw domain_error("branch or ring operand too large for SELFIES: " + std::to_string(value));
  out.push_back(structural_token(kind, order, k));
  for (int i = k - 1; i >= 0; --i) {
    const int digit = (value >> (4 * i)) & 15;
    out.push_back(*Token::from_text(kIndexAlphabet[digit]));
  }
}

class Encoder {
 public:
  explicit Encoder(const chem::MolecularGraph& g) : g_(g), n_(g.num_atoms()) {}

  Tokens run() {
    for (int v = 0; v < n_; ++v) {
      const chem::Atom& a = g_.atom(v);
      if (a.charge != 0) throw domain_error("charged atom " + std::to_string(v) + " has no SELFIES token");
      if (a.bracket && a.explicit_h != chem::implicit_hydrogens(a.element, g_.bond_order_sum(v))) {
        throw domain_error("hydrogen count on atom " + std::to_string(v) + " is not representable in SELFIES");
      }
    }
    if (n_ == 0) return {};
    if (!g_.is_connected()) throw domain_error("cannot encode disconnected molecule");
    build_tree();
    return emit(0, 0);
  }

 private:
  struct Child {
    int atom;
    int order;
  };

  void build_tree() {
    preorder_.assign(n_, -1);
    children_.assign(n_, {});
    rings_at_.assign(n_, {});
    std::vector<char> bond_used(g_.num_bonds(), 0);
    int counter = 0;
    // Recursive DFS in neighbour order gives the derivation (preorder) index.
    std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
    preorder_[0] = counter++;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      const auto nbrs = g_.neighbors(v);
      if (next == nbrs.size()) {
        stack.pop_back();
        continue;
      }
      const chem::Neighbor nb = nbrs[next++];
      if (bond_used[nb.bond]) continue;
      bond_used[nb.bond] = 1;
      const int order = g_.bond(nb.bond).order;
      if (preorder_[nb.atom] >= 0) {
        // Back edge: closed at the later atom, which is the current one.
        rings_at_[v].push_back({nb.atom, order});
        continue;
      }
      preorder_[nb.atom] = counter++;
      children_[v].push_back({nb.atom, order});
      stack.push_back({nb.atom, 0});
    }
  }

  Tokens emit(int v, int parent_order) {
    Tokens out;
    out.push_back(atom_token(g_.atom(v).element, parent_order == 0 ? 1 : parent_order));
    for (const Child& ring : rings_at_[v]) {
      append_index(out, TokenKind::Ring, ring.order, preorder_[v] - preorder_[ring.atom] - 1);
    }
    const auto& kids = children_[v];
    for (std::size_t i = 0; i + 1 < kids.size(); ++i) {
      Tokens body = emit(kids[i].atom, kids[i].order);
      append_index(out, TokenKind::Branch, kids[i].order, static_cast<int>(body.size()) - 1);
      out.insert(out.end(), body.begin(), body.end());
    }
    if (!kids.empty()) {
      Tokens tail = emit(kids.back().atom, kids.back().order);
      out.insert(out.end(), tail.begin(), tail.end());
    }
    return out;
  }

  const chem::MolecularGraph& g_;
  int n_;
  std::vector<int> preorder_;
  std::vector<std::vector<Child>> children_;
  std::vector<std::vector<Child>> rings_at_;
};

}  // namespace

Tokens encode(const chem::MolecularGraph& graph) {
  return Encoder(graph).run();
}

Tokens random_token_string(std::mt19937_64& rng, std::size_t length) {
  const auto all = Token::alphabet();
  std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
  Tokens out;
  out.reserve(length);
  for (std::size_t i = 0; i < length; ++i) out.push_back(all[pick(rng)]);
  return out;
}

}  // namespace molseq::selfies
