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

#include "molseq/tokenizer/vocab.hpp"

#include <fstream>
#include <sstream>

#include "molseq/error.hpp"
#include "molseq/random.hpp"

namespace molseq::tokenizer {

Vocabulary::Vocabulary() : by_token_(selfies::Token::alphabet().size(), -1) {
  for (auto s : kSpecialTexts) texts_.emplace_back(s);
}

void Vocabulary::append(selfies::Token token) {
  if (by_token_[token.id()] >= 0) return;
  by_token_[token.id()] = static_cast<std::int16_t>(texts_.size());
  texts_.emplace_back(token.text());
}

std::optional<int> Vocabulary::id(selfies::Token token) const noexcept {
  const int v = by_token_[token.id()];
  if (v < 0) return std::nullopt;
  return v;
}

std::string_view Vocabulary::text(int id) const {
  if (id < 0 || id >= size()) throw domain_error("token id " + std::to_string(id) + " outside vocabulary of size " + std::to_string(size()));
  return texts_[id];
}

selfies::Token Vocabulary::token(int id) const {
  if (is_special(id)) throw domain_error("token id " + std::to_string(id) + " is a special token");
  return *selfies::Token::from_text(text(id));
}

std::string Vocabulary::serialize() const {
  std::string out;
  for (const auto& t : texts_) {
    out += t;
    out += '\n';
  }
  return out;
}

Vocabulary Vocabulary::parse(std::string_view text) {
  Vocabulary v;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno < kNumSpecials) {
      if (line != kSpecialTexts[lineno]) {
        throw domain_error("vocabulary line " + std::to_string(lineno + 1) + ": expected " + std::string(kSpecialTexts[lineno]));
      }
    } else if (!line.empty()) {
      auto tok = selfies::Token::from_text(line);
      if (!tok) throw domain_error("vocabulary line " + std::to_string(lineno + 1) + ": unknown symbol " + line);
      if (v.id(*tok)) throw domain_error("vocabulary line " + std::to_string(lineno + 1) + ": duplicate " + line);
      v.append(*tok);
    }
    ++lineno;
  }
  if (lineno < kNumSpecials) throw domain_error("vocabulary is missing special tokens");
  return v;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path);
  out << serialize();
  if (!out) throw io_error("write failed: " + path);
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void VocabularyBuilder::add(std::span<const selfies::Token> tokens) {
  any_ = true;
  for (auto t : tokens) vocab_.append(t);
}

Vocabulary VocabularyBuilder::finish() && {
  if (!any_) throw domain_error("cannot build a vocabulary from an empty corpus");
  return std::move(vocab_);
}

Vocabulary build_vocab(std::span<const selfies::Tokens> corpus) {
  VocabularyBuilder b;
  for (const auto& t : corpus) b.add(t);
  return std::move(b).finish();
}

TokenIds encode_ids(std::span<const selfies::Token> tokens, const Vocabulary& vocab) {
  TokenIds ids;
  ids.reserve(tokens.size() + 2);
  ids.push_back(kBos);
  for (auto t : tokens) ids.push_back(vocab.id(t).value_or(kUnk));
  ids.push_back(kEos);
  return ids;
}

selfies::Tokens decode_ids(std::span<const int> ids, const Vocabulary& vocab) {
  selfies::Tokens out;
  for (int id : ids) {
    if (id < 0 || id >= vocab.size()) {
      throw domain_error("token id " + std::to_string(id) + " outside vocabulary of size " + std::to_string(vocab.size()));
    }
    if (id == kEos) break;
    if (!Vocabulary::is_special(id)) out.push_back(vocab.token(id));
  }
  return out;
}

CorruptedPair corrupt(std::span<const int> ids, double mask_rate, std::mt19937_64& rng) {
  if (!(mask_rate >= 0.0 && mask_rate <= 1.0)) throw domain_error("mask_rate must lie in [0, 1]");
  CorruptedPair p;
  p.y.assign(ids.begin(), ids.end());
  p.x_corrupt = p.y;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (Vocabulary::is_special(ids[i])) continue;
    if (uniform01(rng) < mask_rate) {
      p.x_corrupt[i] = kMask;
      p.mask_positions.push_back(static_cast<int>(i));
    }
  }
  return p;
}

}  // namespace molseq::tokenizer
