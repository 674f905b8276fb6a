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

#include <gtest/gtest.h>

#include <cmath>

#include "molseq/error.hpp"

namespace molseq::tokenizer {
namespace {

using selfies::split_selfies;

TEST(BuildVocab, Counting) {
  EXPECT_EQ(build_vocab(std::vector<selfies::Tokens>{split_selfies("[C][C]")}).size(), 6);
  auto v = build_vocab(std::vector<selfies::Tokens>{split_selfies("[C][=O]"), split_selfies("[C]")});
  EXPECT_EQ(v.size(), 7);
  EXPECT_EQ(v.text(5), "[C]");
  EXPECT_EQ(v.text(6), "[=O]");
  EXPECT_EQ(v.text(kMask), "<mask>");
  EXPECT_THROW(build_vocab({}), Error);
}

TEST(BuildVocab, StreamedTwiceIsIdentical) {
  std::vector corpus{split_selfies("[N][C][=O]"), split_selfies("[C][Branch1][C][F][O]")};
  VocabularyBuilder a, b;
  for (const auto& t : corpus) a.add(t);
  for (const auto& t : corpus) b.add(t);
  EXPECT_EQ(std::move(a).finish(), std::move(b).finish());
}

TEST(EncodeIds, Layout) {
  auto v = build_vocab(std::vector<selfies::Tokens>{split_selfies("[C][=O]")});
  EXPECT_EQ(encode_ids({}, v), (TokenIds{kBos, kEos}));
  EXPECT_EQ(encode_ids(split_selfies("[C]"), v), (TokenIds{1, 5, 2}));
  EXPECT_EQ(encode_ids(split_selfies("[C][F]"), v), (TokenIds{1, 5, kUnk, 2}));
}

TEST(DecodeIds, InvertsEncode) {
  auto v = build_vocab(std::vector<selfies::Tokens>{split_selfies("[C][=O][Ring1][Branch1]")});
  for (const char* s : {"", "[C]", "[C][C][Branch1][C][=O][Ring1]"}) {
    auto t = split_selfies(s);
    EXPECT_EQ(decode_ids(encode_ids(t, v), v), t) << s;
  }
  EXPECT_EQ(selfies::join_selfies(decode_ids(TokenIds{1, 5, 3, 6, 2, 5}, v)), "[C][=O]");
  EXPECT_THROW(decode_ids(TokenIds{1, 99, 2}, v), Error);
  EXPECT_THROW(decode_ids(TokenIds{1, -1, 2}, v), Error);
}

TEST(VocabFile, RoundTrip) {
  auto v = build_vocab(std::vector<selfies::Tokens>{split_selfies("[C][=O][#N][Ring2]")});
  auto text = v.serialize();
  EXPECT_EQ(text.substr(0, 34), "<pad>\n<bos>\n<eos>\n<mask>\n<unk>\n[C]");
  EXPECT_EQ(Vocabulary::parse(text), v);
  EXPECT_THROW(Vocabulary::parse("<pad>\n<bos>\n"), Error);
  EXPECT_THROW(Vocabulary::parse("<pad>\n<bos>\n<eos>\n<mask>\n<unk>\n[C]\n[C]\n"), Error);
  EXPECT_THROW(Vocabulary::parse("<pad>\n<bos>\n<eos>\n<mask>\n<unk>\n[Xy]\n"), Error);
  EXPECT_THROW(Vocabulary::load("/nonexistent/vocab.txt"), Error);
}

TEST(Corrupt, Extremes) {
  TokenIds ids{kBos, 5, 6, 5, 7, kEos};
  std::mt19937_64 rng(1);
  auto none = corrupt(ids, 0.0, rng);
  EXPECT_EQ(none.x_corrupt, ids);
  EXPECT_EQ(none.y, ids);
  EXPECT_TRUE(none.mask_positions.empty());
  auto all = corrupt(ids, 1.0, rng);
  EXPECT_EQ(all.x_corrupt, (TokenIds{kBos, kMask, kMask, kMask, kMask, kEos}));
  EXPECT_EQ(all.mask_positions, (std::vector<int>{1, 2, 3, 4}));
  EXPECT_THROW(corrupt(ids, 1.5, rng), Error);
  EXPECT_THROW(corrupt(ids, -0.1, rng), Error);
}

TEST(Corrupt, MaskedFractionConcentrates) {
  TokenIds ids(100002, 5);
  ids.front() = kBos;
  ids.back() = kEos;
  std::mt19937_64 rng(123);
  auto p = corrupt(ids, 0.15, rng);
  const double frac = static_cast<double>(p.mask_positions.size()) / 100000.0;
  // Binomial sd is about 0.0011, so 0.01 is roughly nine standard deviations.
  EXPECT_NEAR(frac, 0.15, 0.01);
  for (int i : p.mask_positions) EXPECT_EQ(p.x_corrupt[i], kMask);
  int differing = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) differing += p.x_corrupt[i] != p.y[i];
  EXPECT_EQ(differing, static_cast<int>(p.mask_positions.size()));
  EXPECT_EQ(p.x_corrupt.front(), kBos);
  EXPECT_EQ(p.x_corrupt.back(), kEos);
}

TEST(Corrupt, Deterministic) {
  TokenIds ids{kBos, 5, 6, 7, 8, 9, 10, kEos};
  std::mt19937_64 a(9), b(9);
  EXPECT_EQ(corrupt(ids, 0.5, a).x_corrupt, corrupt(ids, 0.5, b).x_corrupt);
}

}  // namespace
}  // namespace molseq::tokenizer
