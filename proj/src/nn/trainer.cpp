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

#include "molseq/nn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "molseq/error.hpp"
#include "molseq/random.hpp"

namespace molseq::nn {

namespace {

enum Stream : std::uint64_t { kShuffle = 1, kMask = 2, kDropout = 3, kEvalMask = 4 };

}  // namespace

// ---------------------------------------------------------------------------
// TrainConfig

void TrainConfig::validate() const {
  if (steps <= 0) throw config_error("train.steps must be positive");
  if (batch_size <= 0) throw config_error("train.batch_size must be positive");
  if (!(lr > 0)) throw config_error("train.lr must be positive");
  if (!(warmup_frac >= 0 && warmup_frac <= 1)) throw config_error("train.warmup_frac must lie in [0, 1]");
  if (!(mask_rate >= 0 && mask_rate <= 1)) throw config_error("train.mask_rate must lie in [0, 1]");
  if (!(clip_norm >= 0)) throw config_error("train.clip_norm must be >= 0");
  if (!(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1)) throw config_error("train.beta1/beta2 must lie in [0, 1)");
  if (!(adam_eps > 0)) throw config_error("train.adam_eps must be positive");
  if (checkpoint_every < 0) throw config_error("train.checkpoint_every must be >= 0");
}

util::KeyValues TrainConfig::to_map() const {
  return {
      {"train.steps", std::to_string(steps)},
      {"train.batch_size", std::to_string(batch_size)},
      {"train.lr", util::format_double(lr)},
      {"train.warmup_frac", util::format_double(warmup_frac)},
      {"train.mask_rate", util::format_double(mask_rate)},
      {"train.clip_norm", util::format_double(clip_norm)},
      {"train.beta1", util::format_double(beta1)},
      {"train.beta2", util::format_double(beta2)},
      {"train.adam_eps", util::format_double(adam_eps)},
      {"train.checkpoint_every", std::to_string(checkpoint_every)},
      {"train.seed", std::to_string(seed)},
  };
}

TrainConfig TrainConfig::from_map(const util::KeyValues& kv) {
  TrainConfig c;
  for (const auto& [key, value] : kv) {
    if (key.rfind("train.", 0) != 0) continue;
    const std::string f = key.substr(6);
    if (f == "steps") c.steps = static_cast<int>(util::parse_int(key, value));
    else if (f == "batch_size") c.batch_size = static_cast<int>(util::parse_int(key, value));
    else if (f == "lr") c.lr = util::parse_double(key, value);
    else if (f == "warmup_frac") c.warmup_frac = util::parse_double(key, value);
    else if (f == "mask_rate") c.mask_rate = util::parse_double(key, value);
    else if (f == "clip_norm") c.clip_norm = util::parse_double(key, value);
    else if (f == "beta1") c.beta1 = util::parse_double(key, value);
    else if (f == "beta2") c.beta2 = util::parse_double(key, value);
    else if (f == "adam_eps") c.adam_eps = util::parse_double(key, value);
    else if (f == "checkpoint_every") c.checkpoint_every = static_cast<int>(util::parse_int(key, value));
    else if (f == "seed") c.seed = static_cast<std::uint64_t>(util::parse_int(key, value));
    else if (f != "step") throw config_error("unknown key " + key);
  }
  return c;
}

// ---------------------------------------------------------------------------
// TrainLog

void TrainLog::add(const StepStats& s) {
  if (!steps_.empty() && s.step <= steps_.back().step) throw domain_error("train log steps must increase");
  steps_.push_back(s);
}

std::string TrainLog::csv() const {
  std::string out = "step,loss,masked_acc,seconds\n";
  for (const auto& s : steps_) {
    out += std::to_string(s.step) + "," + util::format_double(s.loss) + "," + util::format_double(s.masked_acc) + "," +
           util::format_fixed(s.seconds, 3) + "\n";
  }
  return out;
}

std::string TrainLog::epoch_csv() const {
  std::string out = "epoch,steps,mean_loss,mean_masked_acc\n";
  std::size_t i = 0;
  while (i < steps_.size()) {
    const int epoch = steps_[i].epoch;
    double loss = 0, acc = 0;
    int n = 0;
    for (; i < steps_.size() && steps_[i].epoch == epoch; ++i, ++n) {
      loss += steps_[i].loss;
      acc += steps_[i].masked_acc;
    }
    out += std::to_string(epoch) + "," + std::to_string(n) + "," + util::format_double(loss / n) + "," +
           util::format_double(acc / n) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Data

Corpus make_corpus(std::vector<tokenizer::TokenIds> all, int max_len) {
  Corpus c;
  for (auto& ids : all) {
    if (static_cast<int>(ids.size()) > max_len) {
      ++c.skipped;
      continue;
    }
    c.sequences.push_back(std::move(ids));
  }
  return c;
}

Example make_example(std::span<const int> ids, double mask_rate, std::mt19937_64& rng) {
  auto pair = tokenizer::corrupt(ids, mask_rate, rng);
  return Example{std::move(pair.x_corrupt), std::move(pair.y), std::move(pair.mask_positions)};
}

template <class T>
LossStats evaluate(const Model<T>& model, std::span<const tokenizer::TokenIds> data, double mask_rate,
                   std::uint64_t seed, int batch_size) {
  LossStats total;
  std::vector<Example> batch;
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::mt19937_64 rng(derive_seed(seed, {kEvalMask, i}));
    batch.push_back(make_example(data[i], mask_rate, rng));
    if (static_cast<int>(batch.size()) == batch_size || i + 1 == data.size()) {
      total += model.loss(batch, nullptr, nullptr);
      batch.clear();
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Trainer

template <class T>
Trainer<T>::Trainer(Model<T> model, TrainConfig config, std::vector<tokenizer::TokenIds> corpus)
    : model_(std::move(model)), config_(config), corpus_(std::move(corpus)) {
  config_.validate();
  if (corpus_.empty()) throw domain_error("training corpus is empty");
  for (const auto& ids : corpus_) {
    if (static_cast<int>(ids.size()) > model_.config().max_len || ids.size() < 2) {
      throw domain_error("training sequence of length " + std::to_string(ids.size()) + " does not fit the model");
    }
  }
  grads_ = model_.params().zeros_like();
  adam_m_ = model_.params().zeros_like();
  adam_v_ = model_.params().zeros_like();
  started_ = std::chrono::steady_clock::now();
}

template <class T>
double Trainer<T>::learning_rate(int step) const {
  const int warmup = std::max(1, static_cast<int>(std::lround(config_.warmup_frac * config_.steps)));
  return config_.lr * std::min(1.0, static_cast<double>(step + 1) / warmup);
}

template <class T>
const std::vector<int>& Trainer<T>::epoch_order(int epoch) {
  if (epoch != cached_epoch_) {
    order_.resize(corpus_.size());
    std::iota(order_.begin(), order_.end(), 0);
    std::mt19937_64 rng(derive_seed(config_.seed, {kShuffle, static_cast<std::uint64_t>(epoch)}));
    std::shuffle(order_.begin(), order_.end(), rng);
    cached_epoch_ = epoch;
  }
  return order_;
}

template <class T>
std::vector<Example> Trainer<T>::next_batch() {
  std::vector<Example> batch;
  const std::uint64_t n = corpus_.size();
  for (int j = 0; j < config_.batch_size; ++j) {
    const std::uint64_t global = static_cast<std::uint64_t>(step_) * config_.batch_size + j;
    const auto& order = epoch_order(static_cast<int>(global / n));
    std::mt19937_64 rng(derive_seed(config_.seed, {kMask, static_cast<std::uint64_t>(step_), static_cast<std::uint64_t>(j)}));
    batch.push_back(make_example(corpus_[order[global % n]], config_.mask_rate, rng));
  }
  return batch;
}

template <class T>
StepStats Trainer<T>::step() {
  const int epoch = static_cast<int>(static_cast<std::uint64_t>(step_) * config_.batch_size / corpus_.size());
  auto batch = next_batch();
  for (int i = 0; i < grads_.size(); ++i) grads_[i].setZero();
  std::mt19937_64 dropout_rng(derive_seed(config_.seed, {kDropout, static_cast<std::uint64_t>(step_)}));
  const bool use_dropout = model_.config().dropout > 0;
  const LossStats stats = model_.loss(batch, &grads_, use_dropout ? &dropout_rng : nullptr);
  const double loss = stats.mean_loss();
  if (!std::isfinite(loss)) {
    throw domain_error("non-finite loss " + std::to_string(loss) + " at step " + std::to_string(step_ + 1) +
                       " (lr " + std::to_string(learning_rate(step_)) + ")");
  }

  double norm2 = 0;
  for (int i = 0; i < grads_.size(); ++i) norm2 += static_cast<double>(grads_[i].squaredNorm());
  const double norm = std::sqrt(norm2);
  if (!std::isfinite(norm)) throw domain_error("non-finite gradient norm at step " + std::to_string(step_ + 1));
  const T clip = (config_.clip_norm > 0 && norm > config_.clip_norm) ? static_cast<T>(config_.clip_norm / norm) : T(1);

  const int t = step_ + 1;
  const T lr = static_cast<T>(learning_rate(step_));
  const T b1 = static_cast<T>(config_.beta1), b2 = static_cast<T>(config_.beta2);
  const T c1 = static_cast<T>(1.0 - std::pow(config_.beta1, t));
  const T c2 = static_cast<T>(1.0 - std::pow(config_.beta2, t));
  const T eps = static_cast<T>(config_.adam_eps);
  for (int i = 0; i < grads_.size(); ++i) {
    auto g = (grads_[i].array() * clip).eval();
    adam_m_[i].array() = b1 * adam_m_[i].array() + (T(1) - b1) * g;
    adam_v_[i].array() = b2 * adam_v_[i].array() + (T(1) - b2) * g.square();
    model_.params()[i].array() -= lr * (adam_m_[i].array() / c1) / ((adam_v_[i].array() / c2).sqrt() + eps);
  }
  ++step_;

  StepStats s;
  s.step = step_;
  s.epoch = epoch;
  s.loss = loss;
  s.masked_acc = stats.masked_accuracy();
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
  log_.add(s);
  return s;
}

template <class T>
Checkpoint Trainer<T>::checkpoint(const tokenizer::Vocabulary& vocab) const {
  Checkpoint ck;
  ck.meta = model_.config().to_map();
  for (auto& [k, v] : config_.to_map()) ck.meta[k] = v;
  ck.meta["train.step"] = std::to_string(step_);
  std::string tokens;
  for (int i = tokenizer::kNumSpecials; i < vocab.size(); ++i) {
    if (!tokens.empty()) tokens += ' ';
    tokens += vocab.text(i);
  }
  ck.meta["vocab"] = tokens;
  ck.meta["source_lengths"] = LengthPrior::from_sequences(corpus_).to_string();
  const auto& p = model_.params();
  for (int i = 0; i < p.size(); ++i) ck.tensors.emplace_back("param/" + p.name(i), p[i].template cast<float>());
  for (int i = 0; i < p.size(); ++i) ck.tensors.emplace_back("adam_m/" + p.name(i), adam_m_[i].template cast<float>());
  for (int i = 0; i < p.size(); ++i) ck.tensors.emplace_back("adam_v/" + p.name(i), adam_v_[i].template cast<float>());
  return ck;
}

namespace {

template <class T>
void load_tensors(const Checkpoint& ck, const std::string& prefix, ParameterSet<T>& into) {
  for (int i = 0; i < into.size(); ++i) {
    const auto* t = ck.find(prefix + into.name(i));
    if (!t) throw domain_error("checkpoint lacks tensor " + prefix + into.name(i));
    if (t->rows() != into[i].rows() || t->cols() != into[i].cols()) {
      throw domain_error("checkpoint tensor " + prefix + into.name(i) + " has the wrong shape");
    }
    into[i] = t->template cast<T>();
  }
}

}  // namespace

template <class T>
void Trainer<T>::restore(const Checkpoint& ck) {
  if (ModelConfig::from_map(ck.meta) != model_.config()) throw config_error("checkpoint model config differs from the trainer's");
  load_tensors(ck, "param/", model_.params());
  load_tensors(ck, "adam_m/", adam_m_);
  load_tensors(ck, "adam_v/", adam_v_);
  step_ = static_cast<int>(util::parse_int("train.step", ck.require("train.step")));
  cached_epoch_ = -1;
}

template <class T>
Model<T> model_from_checkpoint(const Checkpoint& ck) {
  Model<T> model(ModelConfig::from_map(ck.meta), 0);
  load_tensors(ck, "param/", model.params());
  return model;
}

tokenizer::Vocabulary vocab_from_checkpoint(const Checkpoint& ck) {
  std::string text;
  for (auto s : tokenizer::kSpecialTexts) text += std::string(s) + "\n";
  for (char ch : ck.require("vocab")) text += ch == ' ' ? '\n' : ch;
  return tokenizer::Vocabulary::parse(text);
}

LengthPrior length_prior_from_checkpoint(const Checkpoint& ck) {
  const auto it = ck.meta.find("source_lengths");
  return it == ck.meta.end() ? LengthPrior{} : LengthPrior::parse(it->second);
}

template class Trainer<float>;
template class Trainer<double>;
template LossStats evaluate<float>(const Model<float>&, std::span<const tokenizer::TokenIds>, double, std::uint64_t, int);
template LossStats evaluate<double>(const Model<double>&, std::span<const tokenizer::TokenIds>, double, std::uint64_t, int);
template Model<float> model_from_checkpoint<float>(const Checkpoint&);
template Model<double> model_from_checkpoint<double>(const Checkpoint&);

}  // namespace molseq::nn
