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

#include <gtest/gtest.h>

#include <cmath>

#include "molseq/error.hpp"
#include "molseq/nn/model.hpp"
#include "molseq/nn/trainer.hpp"
#include "../../src/nn/kernels.hpp"

namespace molseq::nn {
namespace {

using tokenizer::kBos;
using tokenizer::kEos;
using tokenizer::TokenIds;

ModelConfig toy_config() {
  ModelConfig c;
  c.vocab_size = 12;
  c.d_model = 8;
  c.n_heads = 2;
  c.encoder_layers = 1;
  c.decoder_layers = 1;
  c.d_ff = 16;
  c.max_len = 10;
  c.dropout = 0.0;
  return c;
}

std::vector<Example> toy_batch() {
  std::vector<Example> batch;
  batch.push_back({{kBos, 5, tokenizer::kMask, 7, kEos}, {kBos, 5, 6, 7, kEos}, {2}});
  batch.push_back({{kBos, tokenizer::kMask, 11, 9, 8, 6, kEos}, {kBos, 10, 11, 9, 8, 6, kEos}, {1}});
  batch.push_back({{kBos, 5, kEos}, {kBos, 5, kEos}, {}});
  return batch;
}

TEST(ModelConfig, Validation) {
  ModelConfig c = toy_config();
  c.d_model = 8;
  c.n_heads = 3;
  EXPECT_THROW(c.validate(), Error);
  c = toy_config();
  c.max_len = 2;
  EXPECT_THROW(c.validate(), Error);
  c = toy_config();
  c.vocab_size = 5;
  EXPECT_THROW(c.validate(), Error);
  EXPECT_EQ(ModelConfig::from_map(toy_config().to_map()), toy_config());
}

TEST(InitModel, DeterministicPerSeed) {
  Model<float> a(toy_config(), 7), b(toy_config(), 7), c(toy_config(), 8);
  bool all_same = true, any_diff = false;
  for (int i = 0; i < a.params().size(); ++i) {
    all_same &= a.params()[i] == b.params()[i];
    any_diff |= a.params()[i] != c.params()[i];
  }
  EXPECT_TRUE(all_same);
  EXPECT_TRUE(any_diff);
}

TEST(InitModel, ParameterCountFormula) {
  ModelConfig c;
  c.vocab_size = 50;
  c.d_model = 32;
  c.n_heads = 4;
  c.encoder_layers = 2;
  c.decoder_layers = 2;
  c.d_ff = 64;
  c.max_len = 128;
  // Embeddings: 50*32 + 2*128*32 + 50 (logit bias)           =  9842
  // Encoder layer: 2 norms (4*32) + attention 4*(32*32+32)
  //                + feed-forward (32*64+64 + 64*32+32)       =  8544
  // Decoder layer: 3 norms (6*32) + 2 attentions 8*(32*32+32)
  //                + feed-forward                             = 12832
  // Final norms: 4*32                                         =   128
  // 9842 + 2*8544 + 2*12832 + 128                             = 52722
  Model<float> m(c, 1);
  EXPECT_EQ(m.params().scalar_count(), 52722);
}

TEST(Loss, ZeroedOutputProjectionGivesLogV) {
  for (int vocab : {12, 37}) {
    ModelConfig c = toy_config();
    c.vocab_size = vocab;
    Model<double> m(c, 3);
    m.params()[m.layout().tok_emb].setZero();
    m.params()[m.layout().out_bias].setZero();
    auto stats = m.loss(toy_batch(), nullptr, nullptr);
    EXPECT_NEAR(stats.mean_loss(), std::log(static_cast<double>(vocab)), 1e-12);
    EXPECT_EQ(stats.tokens, 4 + 6 + 2);
  }
}

TEST(Loss, GradientsMatchFiniteDifferences) {
  Model<double> m(toy_config(), 11);
  // Non-trivial norms and biases so every path carries signal.
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 0.3);
  for (int i = 0; i < m.params().size(); ++i) {
    for (Eigen::Index k = 0; k < m.params()[i].size(); ++k) m.params()[i].data()[k] += n(rng);
  }
  const auto batch = toy_batch();
  auto grads = m.params().zeros_like();
  m.loss(batch, &grads, nullptr);
  const double h = 1e-5;
  double worst = 0;
  for (int i = 0; i < m.params().size(); ++i) {
    for (Eigen::Index k = 0; k < m.params()[i].size(); ++k) {
      double& w = m.params()[i].data()[k];
      const double saved = w;
      w = saved + h;
      const double up = m.loss(batch, nullptr, nullptr).mean_loss();
      w = saved - h;
      const double down = m.loss(batch, nullptr, nullptr).mean_loss();
      w = saved;
      const double numeric = (up - down) / (2 * h);
      const double analytic = grads[i].data()[k];
      const double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-6});
      worst = std::max(worst, rel);
      EXPECT_LT(rel, 1e-4) << m.params().name(i) << "[" << k << "] analytic " << analytic << " numeric " << numeric;
    }
  }
  RecordProperty("worst_relative_error", std::to_string(worst));
}

TEST(Loss, DropoutIsSeeded) {
  ModelConfig c = toy_config();
  c.dropout = 0.3;
  Model<double> m(c, 2);
  std::mt19937_64 a(1), b(1);
  EXPECT_EQ(m.loss(toy_batch(), nullptr, &a).loss_sum, m.loss(toy_batch(), nullptr, &b).loss_sum);
  std::mt19937_64 d(2);
  EXPECT_NE(m.loss(toy_batch(), nullptr, &a).loss_sum, m.loss(toy_batch(), nullptr, &d).loss_sum);
}

TEST(Loss, RejectsBadInput) {
  Model<double> m(toy_config(), 1);
  std::vector<Example> too_long{{TokenIds(11, 5), TokenIds(11, 5), {}}};
  EXPECT_THROW(m.loss(too_long, nullptr, nullptr), Error);
  std::vector<Example> bad_id{{{kBos, 99, kEos}, {kBos, 99, kEos}, {}}};
  EXPECT_THROW(m.loss(bad_id, nullptr, nullptr), Error);
}

TEST(Encode, ShapeAndPadInvariance) {
  Model<double> m(toy_config(), 4);
  for (int len = 1; len <= 10; ++len) {
    auto s = m.encode(TokenIds(len, 6));
    EXPECT_EQ(s.rows(), len);
    EXPECT_EQ(s.cols(), 8);
    EXPECT_TRUE(s.allFinite());
  }
  TokenIds a{kBos, 5, 6, kEos, 0, 0};
  TokenIds b{kBos, 5, 6, kEos, 9, 7};
  std::vector<char> pad{0, 0, 0, 0, 1, 1};
  auto sa = m.encode(a, pad);
  auto sb = m.encode(b, pad);
  EXPECT_EQ(sa.topRows(4), sb.topRows(4));
  EXPECT_THROW(m.encode(TokenIds(11, 5)), Error);
}

// Independent scalar implementation of a one-token, one-layer, one-head encoder.
TEST(Encode, SingleTokenMatchesHandComputation) {
  ModelConfig c = toy_config();
  c.n_heads = 1;
  c.d_model = 2;
  c.d_ff = 3;
  Model<double> m(c, 9);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 0.5);
  for (int i = 0; i < m.params().size(); ++i) {
    for (Eigen::Index k = 0; k < m.params()[i].size(); ++k) m.params()[i].data()[k] = n(rng);
  }
  const auto& P = m.params();
  auto W = [&](const char* name) { return P[P.find(name)]; };
  using V = std::vector<double>;
  auto ln = [&](V x, const char* pre) {
    const double mean = (x[0] + x[1]) / 2;
    const double var = ((x[0] - mean) * (x[0] - mean) + (x[1] - mean) * (x[1] - mean)) / 2;
    const auto g = W((std::string(pre) + ".gain").c_str());
    const auto b = W((std::string(pre) + ".bias").c_str());
    for (int j = 0; j < 2; ++j) x[j] = (x[j] - mean) / std::sqrt(var + 1e-5) * g(0, j) + b(0, j);
    return x;
  };
  auto affine = [&](const V& x, const char* w, const char* b) {
    const auto mw = W(w);
    const auto mb = W(b);
    V y(mw.cols());
    for (Eigen::Index o = 0; o < mw.cols(); ++o) {
      y[o] = mb(0, o);
      for (Eigen::Index i = 0; i < mw.rows(); ++i) y[o] += x[i] * mw(i, o);
    }
    return y;
  };
  const int token = 7;
  V x{W("tok_emb")(token, 0) + W("enc_pos")(0, 0), W("tok_emb")(token, 1) + W("enc_pos")(0, 1)};
  // One key: the softmax weight is exactly 1, so attention returns the value row.
  V v = affine(ln(x, "enc.0.ln1"), "enc.0.attn.wv", "enc.0.attn.bv");
  V a = affine(v, "enc.0.attn.wo", "enc.0.attn.bo");
  for (int j = 0; j < 2; ++j) x[j] += a[j];
  V f = affine(ln(x, "enc.0.ln2"), "enc.0.ff.w1", "enc.0.ff.b1");
  for (double& e : f) e = 0.5 * e * (1 + std::erf(e / std::sqrt(2.0)));
  V f2 = affine(f, "enc.0.ff.w2", "enc.0.ff.b2");
  for (int j = 0; j < 2; ++j) x[j] += f2[j];
  V want = ln(x, "enc.norm");
  auto got = m.encode(TokenIds{token});
  EXPECT_NEAR(got(0, 0), want[0], 1e-12);
  EXPECT_NEAR(got(0, 1), want[1], 1e-12);
}

TEST(DecodeStep, CausalityAndLength) {
  Model<double> m(toy_config(), 5);
  auto enc = m.encode(TokenIds{kBos, 5, 6, kEos});
  TokenIds prefix{kBos, 7, 8, 9, 10, 11};
  auto full = m.decode_all(enc, prefix);
  EXPECT_EQ(full.cols(), 12);
  for (std::size_t t = 1; t <= prefix.size(); ++t) {
    auto logits = m.decode_step(enc, std::span(prefix).first(t));
    EXPECT_EQ(logits.size(), 12);
    EXPECT_LT((logits - full.row(t - 1)).cwiseAbs().maxCoeff(), 1e-12) << t;
  }
  EXPECT_THROW(m.decode_step(enc, TokenIds{}), Error);
  EXPECT_THROW(m.decode_step(enc, TokenIds{5}), Error);
}

TEST(DecodeStep, SessionMatchesFullRecomputation) {
  Model<double> m(toy_config(), 6);
  auto enc = m.encode(TokenIds{kBos, 8, kEos});
  TokenIds prefix{kBos, 7, 8, 9, 10, 5, 6};
  auto full = m.decode_all(enc, prefix);
  DecoderSession<double> session(m, enc);
  for (std::size_t t = 0; t < prefix.size(); ++t) {
    auto row = session.push(prefix[t]);
    EXPECT_LT((row - full.row(t)).cwiseAbs().maxCoeff(), 1e-12) << t;
  }
}

TEST(Sample, GreedyMatchesTeacherForcedArgmax) {
  Model<double> m(toy_config(), 12);
  for (int masks : {0, 3}) {
    auto ids = greedy(m, 10, masks);
    ASSERT_GE(ids.size(), 2U);
    EXPECT_EQ(ids.front(), kBos);
    EXPECT_EQ(ids.back(), kEos);
    TokenIds source(static_cast<std::size_t>(masks) + 2, tokenizer::kMask);
    source.front() = kBos;
    source.back() = kEos;
    auto logits = m.decode_all(m.encode(source), std::span(ids).first(ids.size() - 1));
    for (std::size_t t = 0; t + 1 < ids.size(); ++t) {
      Eigen::RowVectorXd row = logits.row(t);
      for (int s : {tokenizer::kPad, kBos, tokenizer::kMask, tokenizer::kUnk}) row[s] = -1e300;
      Eigen::Index best = 0;
      row.maxCoeff(&best);
      if (t + 2 == ids.size() && ids[t + 1] == kEos && best != kEos) continue;  // forced stop at max_len
      EXPECT_EQ(best, ids[t + 1]) << masks << " " << t;
    }
  }
}

TEST(Sample, SourceMasksAreClampedToMaxLen) {
  Model<double> m(toy_config(), 12);
  const int room = m.config().max_len - 2;
  EXPECT_EQ(greedy(m, 10, room + 50), greedy(m, 10, room));
  EXPECT_THROW(greedy(m, 10, -1), Error);
}

TEST(LengthPrior, CountsRoundTripAndDraws) {
  std::vector<TokenIds> seqs{{kBos, 5, kEos}, {kBos, 5, 6, 7, kEos}, {kBos, 5, 6, 7, kEos}, {kBos, kEos}};
  auto p = LengthPrior::from_sequences(seqs);
  EXPECT_EQ(p.counts, (std::vector<std::uint64_t>{1, 1, 0, 2}));
  EXPECT_EQ(p.to_string(), "0:1 1:1 3:2");
  EXPECT_EQ(LengthPrior::parse(p.to_string()).counts, p.counts);
  EXPECT_THROW(LengthPrior::parse("3"), Error);
  EXPECT_THROW(LengthPrior::parse("a:1"), Error);
  EXPECT_THROW(LengthPrior::parse("1:-2"), Error);

  std::mt19937_64 rng(5);
  std::vector<int> seen(4, 0);
  const int n = 40000;
  for (int i = 0; i < n; ++i) ++seen.at(static_cast<std::size_t>(p.draw(rng)));
  EXPECT_EQ(seen[2], 0);
  const double expected[] = {0.25, 0.25, 0.0, 0.5};
  for (int len : {0, 1, 3}) EXPECT_NEAR(seen[len] / double(n), expected[len], 0.015) << len;

  LengthPrior none;
  EXPECT_TRUE(none.empty());
  EXPECT_EQ(none.draw(rng), 0);
  EXPECT_TRUE(LengthPrior::parse("").empty());
}

TEST(Sample, ColdTemperatureEqualsGreedyAndSeedsReproduce) {
  Model<double> m(toy_config(), 13);
  std::mt19937_64 rng(1);
  EXPECT_EQ(sample(m, rng, 10, 1e-9), greedy(m, 10));
  std::mt19937_64 a(77), b(77);
  EXPECT_EQ(sample(m, a, 10, 1.0), sample(m, b, 10, 1.0));
  EXPECT_THROW(sample(m, a, 10, 0.0), Error);
  for (int k = 0; k < 20; ++k) {
    auto ids = sample(m, a, 10, 1.0);
    EXPECT_LE(ids.size(), 10U);
    for (std::size_t i = 1; i < ids.size(); ++i) {
      EXPECT_TRUE(ids[i] == kEos || !tokenizer::Vocabulary::is_special(ids[i]));
    }
  }
}

TEST(Kernels, SoftmaxRowsSumToOne) {
  Mat<double> s(3, 5);
  s << 1, 2, 3, 4, 5, -100, 0, 100, 3, 3, 1e3, 1e3, -1e3, 0, 0;
  kernels::softmax_rows(s);
  for (int r = 0; r < 3; ++r) {
    EXPECT_NEAR(s.row(r).sum(), 1.0, 1e-12);
    EXPECT_GE(s.row(r).minCoeff(), 0.0);
  }
}

TEST(Embed, MeanOfContentStates) {
  Model<double> m(toy_config(), 14);
  TokenIds one{kBos, 7, kEos};
  auto states = m.encode(one);
  EXPECT_EQ(m.embed(one), states.row(1));
  TokenIds many{kBos, 7, 8, 9, kEos};
  auto s2 = m.encode(many);
  Eigen::RowVectorXd mean = (s2.row(1) + s2.row(2) + s2.row(3)) / 3.0;
  EXPECT_LT((m.embed(many) - mean).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(m.embed(many), m.embed(many));
  EXPECT_THROW(m.embed(TokenIds{kBos, kEos}), Error);
}

std::vector<TokenIds> toy_corpus() {
  std::vector<TokenIds> c;
  std::mt19937_64 rng(21);
  for (int i = 0; i < 40; ++i) {
    TokenIds ids{kBos};
    const int len = 2 + static_cast<int>(rng() % 6);
    for (int k = 0; k < len; ++k) ids.push_back(5 + static_cast<int>(rng() % 7));
    ids.push_back(kEos);
    c.push_back(ids);
  }
  return c;
}

TEST(Train, OverfitsSingleExample) {
  ModelConfig c = toy_config();
  c.d_model = 16;
  c.d_ff = 32;
  TrainConfig t;
  t.steps = 200;
  t.batch_size = 1;
  t.lr = 1e-2;
  t.mask_rate = 0.15;
  Trainer<double> trainer(Model<double>(c, 1), t, {TokenIds{kBos, 5, 6, 7, 8, 9, kEos}});
  const double first = trainer.step().loss;
  double last = first;
  while (!trainer.done()) last = trainer.step().loss;
  EXPECT_LT(last, 0.05 * first);
  EXPECT_LT(last, 0.1);
}

TEST(Train, ResumeReproducesUninterruptedRun) {
  ModelConfig c = toy_config();
  c.dropout = 0.1;
  TrainConfig t;
  t.steps = 12;
  t.batch_size = 7;
  t.lr = 3e-3;
  t.seed = 99;
  tokenizer::Vocabulary vocab;
  Trainer<float> full(Model<float>(c, 3), t, toy_corpus());
  while (!full.done()) full.step();

  Trainer<float> first(Model<float>(c, 3), t, toy_corpus());
  for (int i = 0; i < 5; ++i) first.step();
  auto bytes = serialize_checkpoint(first.checkpoint(vocab));
  Trainer<float> resumed(Model<float>(c, 1234), t, toy_corpus());
  resumed.restore(parse_checkpoint(bytes));
  EXPECT_EQ(resumed.steps_done(), 5);
  while (!resumed.done()) resumed.step();

  ASSERT_EQ(resumed.log().steps().size(), 7U);
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_EQ(resumed.log().steps()[i].step, full.log().steps()[i + 5].step);
    EXPECT_EQ(resumed.log().steps()[i].loss, full.log().steps()[i + 5].loss);
    EXPECT_EQ(resumed.log().steps()[i].masked_acc, full.log().steps()[i + 5].masked_acc);
  }
  EXPECT_EQ(serialize_checkpoint(resumed.checkpoint(vocab)), serialize_checkpoint(full.checkpoint(vocab)));
}

TEST(Train, CopyTaskIsEasierWithoutMasking) {
  ModelConfig c = toy_config();
  c.d_model = 16;
  c.d_ff = 32;
  auto run = [&](double mask_rate) {
    TrainConfig t;
    t.steps = 150;
    t.batch_size = 8;
    t.lr = 3e-3;
    t.mask_rate = mask_rate;
    t.seed = 4;
    Trainer<double> tr(Model<double>(c, 2), t, toy_corpus());
    while (!tr.done()) tr.step();
    return evaluate(tr.model(), toy_corpus(), mask_rate, 1).mean_loss();
  };
  EXPECT_LT(run(0.0), run(0.15));
}

TEST(Train, LearningRateSchedule) {
  TrainConfig t;
  t.steps = 100;
  t.lr = 1e-3;
  Trainer<float> tr(Model<float>(toy_config(), 1), t, toy_corpus());
  EXPECT_DOUBLE_EQ(tr.learning_rate(0), 2e-4);
  EXPECT_DOUBLE_EQ(tr.learning_rate(4), 1e-3);
  EXPECT_DOUBLE_EQ(tr.learning_rate(50), 1e-3);
}

TEST(Train, LogCsv) {
  TrainLog log;
  log.add({1, 0, 2.5, 0.25, 0.01});
  log.add({2, 0, 2.0, 0.5, 0.02});
  EXPECT_EQ(log.csv(), "step,loss,masked_acc,seconds\n1,2.5,0.25,0.010\n2,2,0.5,0.020\n");
  EXPECT_EQ(log.epoch_csv(), "epoch,steps,mean_loss,mean_masked_acc\n0,2,2.25,0.375\n");
  EXPECT_THROW(log.add({2, 0, 1, 1, 1}), Error);
}

TEST(Checkpoint, RoundTripAndCorruption) {
  Checkpoint ck;
  ck.meta["a"] = "1";
  Mat<float> t(2, 3);
  t << 1, 2, 3, 4, 5, -6.5f;
  ck.tensors.emplace_back("w", t);
  auto bytes = serialize_checkpoint(ck);
  EXPECT_EQ(bytes.substr(0, 8), "MOLSEQCK");
  auto back = parse_checkpoint(bytes);
  EXPECT_EQ(back.meta, ck.meta);
  EXPECT_EQ(*back.find("w"), t);
  EXPECT_THROW(parse_checkpoint(bytes.substr(0, bytes.size() - 1)), Error);
  EXPECT_THROW(parse_checkpoint("NOTACKPT"), Error);
  EXPECT_THROW(load_checkpoint("/nonexistent/x.ckpt"), Error);
}

TEST(Checkpoint, ModelAndVocabRestore) {
  auto vocab = tokenizer::build_vocab(std::vector<selfies::Tokens>{selfies::split_selfies("[C][=O][N][Ring1][F][Cl][#C]")});
  ModelConfig c = toy_config();
  TrainConfig t;
  t.steps = 2;
  Trainer<float> tr(Model<float>(c, 1), t, toy_corpus());
  tr.step();
  auto ck = parse_checkpoint(serialize_checkpoint(tr.checkpoint(vocab)));
  auto m = model_from_checkpoint<float>(ck);
  for (int i = 0; i < m.params().size(); ++i) EXPECT_EQ(m.params()[i], tr.model().params()[i]);
  EXPECT_EQ(vocab_from_checkpoint(ck), vocab);
  EXPECT_EQ(length_prior_from_checkpoint(ck).counts, LengthPrior::from_sequences(toy_corpus()).counts);
  ck.meta.erase("source_lengths");
  EXPECT_TRUE(length_prior_from_checkpoint(ck).empty());
}

}  // namespace
}  // namespace molseq::nn
