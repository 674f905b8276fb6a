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

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "molseq/selfies/selfies.hpp"

namespace molseq::tokenizer {

inline constexpr int kPad = 0;
inline constexpr int kBos = 1;
inline constexpr int kEos = 2;
inline constexpr int kMask = 3;
inline constexpr int kUnk = 4;
inline constexpr int kNumSpecials = 5;
inline constexpr std::array<std::string_view, kNumSpecials> kSpecialTexts = {"<pad>", "<bos>", "<eos>", "<mask>",
                                                                             "<unk>"};

//! Layout: <bos>, t1..tn, <eos>.
using TokenIds = std::vector<int>;

class Vocabulary {
 public:
  //! Specials only.
  Vocabulary();

  int size() const noexcept { return static_cast<int>(texts_.size()); }
  //! nullopt when the token is not in the vocabulary.
  std::optional<int> id(selfies::Token token) const noexcept;
  //! Throws domain_error when out of range.
  std::string_view text(int id) const;
  //! Non-special ids only.
  selfies::Token token(int id) const;
  static bool is_special(int id) noexcept { return id >= 0 && id < kNumSpecials; }

  //! One token per line; the first five lines are the specials, line index == id.
  std::string serialize() const;
  static Vocabulary parse(std::string_view text);
  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.texts_ == b.texts_; }

 private:
  friend class VocabularyBuilder;
  void append(selfies::Token token);

  std::vector<std::string> texts_;
  std::vector<std::int16_t> by_token_;  // alphabet id -> vocab id, -1 if absent
};

//! Streaming construction: ids follow first appearance after the specials.
class VocabularyBuilder {
 public:
  void add(std::span<const selfies::Token> tokens);
  //! Throws domain_error if nothing was added.
  Vocabulary finish() &&;

 private:
  Vocabulary vocab_;
  bool any_ = false;
};

Vocabulary build_vocab(std::span<const selfies::Tokens> corpus);

TokenIds encode_ids(std::span<const selfies::Token> tokens, const Vocabulary& vocab);

/// Strips specials and stops at the first <eos>. Throws domain_error for ids
/// outside the vocabulary.
selfies::Tokens decode_ids(std::span<const int> ids, const Vocabulary& vocab);

struct CorruptedPair {
  TokenIds x_corrupt;
  TokenIds y;
  std::vector<int> mask_positions;
};

/// Independently replaces each non-special position with <mask> with
/// probability mask_rate. Throws domain_error unless 0 <= mask_rate <= 1.
CorruptedPair corrupt(std::span<const int> ids, double mask_rate, std::mt19937_64& rng);

}  // namespace molseq::tokenizer
