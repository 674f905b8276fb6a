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

#include <gtest/gtest.h>

#include "molseq/chem/canonical.hpp"
#include "molseq/chem/smiles.hpp"
#include "molseq/error.hpp"
#include "test_support.hpp"

namespace molseq::selfies {
namespace {

Tokens toks(std::string_view s) { return split_selfies(s); }

std::string canon(const chem::MolecularGraph& g) { return chem::canonicalize(g).text; }

TEST(SplitSelfies, Segmentation) {
  auto t = toks("[C][=O]");
  ASSERT_EQ(t.size(), 2U);
  EXPECT_EQ(t[0].text(), "[C]");
  EXPECT_EQ(t[1].text(), "[=O]");
  EXPECT_TRUE(toks("").empty());
  auto b = toks("[C][Branch1][C][F]");
  ASSERT_EQ(b.size(), 4U);
  EXPECT_EQ(b[0].kind(), TokenKind::Atom);
  EXPECT_EQ(b[1].kind(), TokenKind::Branch);
  EXPECT_EQ(b[1].size_class(), 1);
  EXPECT_EQ(b[2].kind(), TokenKind::Atom);
  EXPECT_EQ(b[3].element(), chem::Element::F);
}

TEST(SplitSelfies, Errors) {
  EXPECT_THROW(split_selfies("[C"), ParseError);
  EXPECT_THROW(split_selfies("C]"), ParseError);
  EXPECT_THROW(split_selfies("[C]x[O]"), ParseError);
  try {
    split_selfies("[C][Xx]");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 3U);
  }
}

TEST(SplitSelfies, LosslessOverAlphabet) {
  std::string all;
  for (Token t : Token::alphabet()) all += t.text();
  EXPECT_EQ(join_selfies(split_selfies(all)), all);
  EXPECT_EQ(Token::alphabet().size(), 51U);
}

TEST(Token, IndexAlphabet) {
  const char* order[] = {"[C]",      "[Ring1]",   "[Ring2]", "[Branch1]", "[=Branch1]", "[#Branch1]",
                         "[Branch2]", "[=Branch2]", "[#Branch2]", "[O]",   "[N]",        "[=N]",
                         "[=C]",     "[#C]",      "[S]",     "[P]"};
  for (int i = 0; i < 16; ++i) EXPECT_EQ(Token::from_text(order[i])->index_value(), i) << order[i];
  EXPECT_EQ(Token::from_text("[F]")->index_value(), 0);
  EXPECT_EQ(Token::from_text("[#Ring3]")->index_value(), 0);
}

TEST(Decode, SpecExamples) {
  auto methane = decode(toks("[C]"));
  ASSERT_EQ(methane.num_atoms(), 1);
  EXPECT_EQ(methane.total_h(0), 4);
  EXPECT_EQ(canon(decode(toks("[C][=O]"))), canon(chem::parse_smiles("C=O")));
  auto fc = decode(toks("[F][=C]"));
  ASSERT_EQ(fc.num_bonds(), 1);
  EXPECT_EQ(fc.bond(0).order, 1);
  EXPECT_EQ(canon(decode(toks("[C][C][C][C][C][C][Ring1][=Branch1]"))), canon(chem::parse_smiles("C1CCCCC1")));
  EXPECT_TRUE(decode(Tokens{}).empty());
  EXPECT_TRUE(decode(toks("[Ring1][Branch1]")).empty());
}

TEST(Decode, BranchesAndRings) {
  EXPECT_EQ(canon(decode(toks("[C][Branch1][C][F][O]"))), canon(chem::parse_smiles("C(F)O")));
  // Branch from an atom with a single free valence is ignored.
  EXPECT_EQ(canon(decode(toks("[C][#C][Branch1][C][F][C]"))), canon(chem::parse_smiles("C#CCF")));
  // Ring bond onto an existing bond raises its order.
  EXPECT_EQ(canon(decode(toks("[C][C][Ring1][C]"))), canon(chem::parse_smiles("C=C")));
}

TEST(Decode, RandomStringsAreTotal) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 2000; ++i) {
    auto g = decode(random_token_string(rng, 1 + rng() % 60));
    EXPECT_NO_THROW(g.validate());
    EXPECT_TRUE(g.empty() || g.is_connected());
  }
}

TEST(Decode, MatchesReferenceOnRandomStrings) {
  auto rows = testing::read_tsv(std::string(MOLSEQ_TEST_DATA) + "/selfies_reference_random.tsv");
  ASSERT_EQ(rows.size(), 1000U);
  for (const auto& row : rows) {
    ASSERT_EQ(row.size(), 2U);
    auto want = row[1].empty() ? std::string() : canon(chem::parse_smiles(row[1]));
    EXPECT_EQ(canon(decode(toks(row[0]))), want) << row[0];
  }
}

TEST(Decode, MatchesReferenceOnEncodedCorpus) {
  auto rows = testing::read_tsv(std::string(MOLSEQ_TEST_DATA) + "/selfies_reference_corpus.tsv");
  ASSERT_EQ(rows.size(), 1000U);
  for (const auto& row : rows) {
    ASSERT_EQ(row.size(), 3U);
    auto want = canon(chem::parse_smiles(row[2]));
    EXPECT_EQ(canon(decode(toks(row[1]))), want) << row[1];
    // The reference toolkit may pick a different Kekule structure than ours.
    auto source = chem::parse_smiles(row[0]);
    auto ref = chem::parse_smiles(row[2]);
    EXPECT_EQ(source.num_atoms(), ref.num_atoms()) << row[0];
    EXPECT_EQ(source.num_bonds(), ref.num_bonds()) << row[0];
  }
}

TEST(Encode, ReferenceDecodesOurEncodingIdentically) {
  auto rows = testing::read_tsv(std::string(MOLSEQ_TEST_DATA) + "/selfies_reference_molseq.tsv");
  auto corpus = testing::read_lines(std::string(MOLSEQ_CORPUS_DIR) + "/moses_test_1k.smi");
  ASSERT_EQ(rows.size(), 1000U);
  ASSERT_EQ(corpus.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ASSERT_EQ(rows[i].size(), 2U);
    EXPECT_EQ(join_selfies(encode(chem::parse_smiles(corpus[i]))), rows[i][0]) << corpus[i];
    EXPECT_EQ(canon(decode(toks(rows[i][0]))), canon(chem::parse_smiles(rows[i][1]))) << rows[i][0];
  }
}

TEST(Encode, SpecExamples) {
  EXPECT_EQ(join_selfies(encode(chem::parse_smiles("C"))), "[C]");
  EXPECT_EQ(join_selfies(encode(chem::parse_smiles("C=O"))), "[C][=O]");
  EXPECT_TRUE(encode(chem::MolecularGraph{}).empty());
  EXPECT_THROW(encode(chem::parse_smiles("C[NH3+]")), Error);
}

TEST(Encode, CorpusRoundTrip) {
  for (const char* file : {"/moses_test_1k.smi", "/moses_train_6k.smi"}) {
    for (const auto& s : testing::read_lines(std::string(MOLSEQ_CORPUS_DIR) + file)) {
      auto g = chem::parse_smiles(s);
      EXPECT_EQ(canon(decode(encode(g))), canon(g)) << s;
    }
  }
}

TEST(Encode, LongRangeIndices) {
  // A 40-ring needs a two-digit ring operand.
  std::string s = "C1";
  for (int i = 0; i < 39; ++i) s += "C";
  s += "1";
  auto g = chem::parse_smiles(s);
  EXPECT_EQ(canon(decode(encode(g))), canon(g));
  std::string branchy = "C(";
  for (int i = 0; i < 300; ++i) branchy += "C";
  branchy += ")O";
  auto h = chem::parse_smiles(branchy);
  EXPECT_EQ(canon(decode(encode(h))), canon(h));
}

TEST(RandomTokenString, Deterministic) {
  std::mt19937_64 a(42), b(42);
  EXPECT_TRUE(random_token_string(a, 0).empty());
  EXPECT_EQ(random_token_string(a, 30), random_token_string(b, 30));
}

}  // namespace
}  // namespace molseq::selfies
