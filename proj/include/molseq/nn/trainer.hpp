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

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "molseq/nn/checkpoint.hpp"
#include "molseq/nn/model.hpp"
#include "molseq/tokenizer/vocab.hpp"
#include "molseq/util/format.hpp"

namespace molseq::nn {

struct TrainConfig {
  int steps = 2000;
  int batch_size = 32;
  double lr = 3e-4;
  //! Fraction of `steps` spent in linear warmup; the rate is constant afterwards.
  double warmup_frac = 0.05;
  double mask_rate = 0.15;
  //! Global gradient-norm clip; 0 disables.
  double clip_norm = 1.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  //! Write a checkpoint every N steps (0: only at the end).
  int checkpoint_every = 0;
  std::uint64_t seed = 0;

  void validate() const;
  //! "train.<field>" keys.
  util::KeyValues to_map() const;
  static TrainConfig from_map(const util::KeyValues& kv);
};

struct StepStats {
  int step = 0;  // 1-based index of the completed step
  int epoch = 0;
  double loss = 0;
  double masked_acc = 0;
  double seconds = 0;
};

//! CSV with header step,loss,masked_acc,seconds plus per-epoch aggregates.
class TrainLog {
 public:
  void add(const StepStats& s);
  const std::vector<StepStats>& steps() const noexcept { return steps_; }
  std::string csv() const;
  //! epoch,steps,mean_loss,mean_masked_acc
  std::string epoch_csv() const;

 private:
  std::vector<StepStats> steps_;
};

//! Sequences longer than max_len are dropped (never truncated).
struct Corpus {
  std::vector<tokenizer::TokenIds> sequences;
  std::size_t skipped = 0;
};
Corpus make_corpus(std::vector<tokenizer::TokenIds> all, int max_len);

//! Corrupts ids with the tokenizer's masking rule.
Example make_example(std::span<const int> ids, double mask_rate, std::mt19937_64& rng);

/// Loss and masked-token accuracy without dropout. Masks are a pure
/// function of (seed, index), so repeated calls see identical inputs.
template <class T>
LossStats evaluate(const Model<T>& model, std::span<const tokenizer::TokenIds> data, double mask_rate,
                   std::uint64_t seed, int batch_size = 64);

/// Mini-batch Adam training on the denoising objective. Every random draw
/// (epoch order, masks, dropout) derives from (seed, epoch/step), so a run
/// resumed from a checkpoint continues exactly as the uninterrupted one.
template <class T>
class Trainer {
 public:
  Trainer(Model<T> model, TrainConfig config, std::vector<tokenizer::TokenIds> corpus);

  //! Runs one optimizer step. Throws domain_error on a non-finite loss.
  StepStats step();
  bool done() const noexcept { return step_ >= config_.steps; }
  int steps_done() const noexcept { return step_; }
  double learning_rate(int step) const;

  const Model<T>& model() const noexcept { return model_; }
  const TrainConfig& config() const noexcept { return config_; }
  const TrainLog& log() const noexcept { return log_; }

  //! Parameters, optimizer moments, step counter, configs, vocabulary and
  //! the corpus length histogram.
  Checkpoint checkpoint(const tokenizer::Vocabulary& vocab) const;
  //! Restores parameters, moments and step from `ckpt`; configs must match.
  void restore(const Checkpoint& ckpt);

 private:
  std::vector<Example> next_batch();
  const std::vector<int>& epoch_order(int epoch);

  Model<T> model_;
  TrainConfig config_;
  std::vector<tokenizer::TokenIds> corpus_;
  ParameterSet<T> grads_, adam_m_, adam_v_;
  int step_ = 0;
  int cached_epoch_ = -1;
  std::vector<int> order_;
  TrainLog log_;
  std::chrono::steady_clock::time_point started_;
};

//! Model weights and vocabulary from a checkpoint.
template <class T>
Model<T> model_from_checkpoint(const Checkpoint& ckpt);
tokenizer::Vocabulary vocab_from_checkpoint(const Checkpoint& ckpt);
//! Training length histogram; empty for checkpoints that lack one.
LengthPrior length_prior_from_checkpoint(const Checkpoint& ckpt);

extern template class Trainer<float>;
extern template class Trainer<double>;

}  // namespace molseq::nn
