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
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "molseq/chem/element.hpp"
#include "molseq/chem/molgraph.hpp"

namespace molseq::selfies {

enum class TokenKind : std::uint8_t { Atom, Branch, Ring };

//! One symbol of the closed SELFIES alphabet: [πE], [πBranchK], [πRingK]
//! with π in {"", "=", "#"}, E in the supported element set, K in {1,2,3}.
class Token {
 public:
  static std::optional<Token> from_text(std::string_view text) noexcept;
  static std::span<const Token> alphabet() noexcept;

  std::string_view text() const noexcept;
  TokenKind kind() const noexcept;
  //! Requested bond order (1..3) carried by the prefix.
  int bond_order() const noexcept;
  //! Atom tokens only.
  chem::Element element() const noexcept;
  //! K for branch/ring tokens: number of index symbols that follow.
  int size_class() const noexcept;
  //! Base-16 digit value when read as an index symbol (0 for non-index symbols).
  int index_value() const noexcept;

  std::uint8_t id() const noexcept { return id_; }
  friend bool operator==(Token, Token) = default;

 private:
  explicit constexpr Token(std::uint8_t id) : id_(id) {}
  std::uint8_t id_;
};

using Tokens = std::vector<Token>;

/// Segments a SELFIES string at bracket boundaries. Lossless: join_selfies
/// of the result reproduces the input. Throws ParseError on unbalanced
/// brackets or symbols outside the alphabet.
Tokens split_selfies(std::string_view text);
std::string join_selfies(std::span<const Token> tokens);

/// Derives a molecule from any token sequence. Total: never throws and the
/// result always satisfies the valence invariants (possibly empty).
///
/// Semantics follow selfies 2.x: bond orders are clipped to the remaining
/// capacity, branch/ring operands are read as base-16 digits, a branch from
/// an atom with < 2 free valence (or a ring with none) is ignored, and ring
/// bonds are formed after the pass, raising the order of an existing bond.
chem::MolecularGraph decode(std::span<const Token> tokens);

/// Encodes a molecule so that decode(encode(g)) is isomorphic to g. Atom 0
/// is the root; neighbours are visited in atom-index order. Throws
/// domain_error for charged atoms or non-implicit hydrogen counts.
Tokens encode(const chem::MolecularGraph& graph);

//! Uniform sample from the alphabet.
Tokens random_token_string(std::mt19937_64& rng, std::size_t length);

}  // namespace molseq::selfies
