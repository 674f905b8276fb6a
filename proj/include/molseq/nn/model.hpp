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
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "molseq/nn/tape.hpp"
#include "molseq/nn/tensor.hpp"
#include "molseq/tokenizer/vocab.hpp"

namespace molseq::nn {

struct ModelConfig {
  int vocab_size = 0;
  int d_model = 128;
  int n_heads = 4;
  int encoder_layers = 2;
  int decoder_layers = 2;
  int d_ff = 512;
  int max_len = 128;
  double dropout = 0.1;

  //! Throws config_error on the first violated constraint.
  void validate() const;
  //! "model.<field>" keys.
  std::map<std::string, std::string> to_map() const;
  static ModelConfig from_map(const std::map<std::string, std::string>& kv);

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

//! Ordered, named parameter tensors. Shapes are a pure function of the config.
template <class T>
class ParameterSet {
 public:
  int add(std::string name, int rows, int cols);
  int size() const noexcept { return static_cast<int>(tensors_.size()); }
  Mat<T>& operator[](int i) { return tensors_.at(i); }
  const Mat<T>& operator[](int i) const { return tensors_.at(i); }
  const std::string& name(int i) const { return names_.at(i); }
  //! -1 when absent.
  int find(std::string_view name) const;
  std::int64_t scalar_count() const;
  //! Same names and shapes, zero values.
  ParameterSet zeros_like() const;

 private:
  std::vector<std::string> names_;
  std::vector<Mat<T>> tensors_;
};

//! Tensor indices for one model; see init_model for the naming scheme.
struct Layout {
  struct Norm {
    int gain, bias;
  };
  struct Attention {
    int wq, bq, wk, bk, wv, bv, wo, bo;
  };
  struct FeedForward {
    int w1, b1, w2, b2;
  };
  struct EncoderLayer {
    Norm ln1;
    Attention attn;
    Norm ln2;
    FeedForward ff;
  };
  struct DecoderLayer {
    Norm ln1;
    Attention self_attn;
    Norm ln2;
    Attention cross_attn;
    Norm ln3;
    FeedForward ff;
  };
  int tok_emb, enc_pos, dec_pos, out_bias;
  std::vector<EncoderLayer> encoder;
  Norm encoder_norm;
  std::vector<DecoderLayer> decoder;
  Norm decoder_norm;
};

//! One denoising example: encoder reads x, decoder reads y[0..n-2] and predicts y[1..n-1].
struct Example {
  tokenizer::TokenIds x;
  tokenizer::TokenIds y;
  std::vector<int> mask_positions;
};

struct LossStats {
  double loss_sum = 0;  // summed token NLL
  int tokens = 0;
  int masked = 0;
  int masked_correct = 0;

  double mean_loss() const { return tokens ? loss_sum / tokens : 0.0; }
  double masked_accuracy() const { return masked ? static_cast<double>(masked_correct) / masked : 0.0; }
  LossStats& operator+=(const LossStats& o);
};

/// Pre-LN encoder-decoder transformer with learned positions, GELU
/// feed-forward blocks and output logits tied to the token embedding.
template <class T>
class Model {
 public:
  Model(ModelConfig config, std::uint64_t seed);

  const ModelConfig& config() const noexcept { return config_; }
  const Layout& layout() const noexcept { return layout_; }
  ParameterSet<T>& params() noexcept { return params_; }
  const ParameterSet<T>& params() const noexcept { return params_; }

  /// Token-weighted mean NLL over all target positions of the batch. When
  /// `grads` is given, gradients of that mean are accumulated into it.
  /// Dropout is active only when `dropout_rng` is given.
  LossStats loss(std::span<const Example> batch, ParameterSet<T>* grads, std::mt19937_64* dropout_rng) const;

  /// Final encoder states (L x d_model). pad_mask[i] != 0 marks padding,
  /// which no position attends to. Empty pad_mask means no padding.
  Mat<T> encode(std::span<const int> ids, std::span<const char> pad_mask = {}) const;

  //! Next-token logits after `prefix` (non-empty, starting with <bos>), full recomputation.
  RowVec<T> decode_step(const Mat<T>& enc_states, std::span<const int> prefix) const;

  //! Teacher-forced logits for every prefix position (prefix.size() x vocab).
  Mat<T> decode_all(const Mat<T>& enc_states, std::span<const int> prefix) const;

  //! Mean final encoder state over content (non-special) positions.
  RowVec<T> embed(std::span<const int> ids) const;

 private:
  template <class V>
  struct Vars;

  ModelConfig config_;
  Layout layout_;
  ParameterSet<T> params_;
};

/// Incremental decoder with cached self-attention keys/values.
template <class T>
class DecoderSession {
 public:
  DecoderSession(const Model<T>& model, const Mat<T>& enc_states);
  //! Feeds the next prefix token; returns logits for the token after it.
  RowVec<T> push(int token);
  int length() const noexcept { return length_; }

 private:
  const Model<T>& model_;
  std::vector<Mat<T>> cross_k_, cross_v_, self_k_, self_v_;
  int length_ = 0;
};

/// Histogram of training sequence lengths, counted in tokens between <bos>
/// and <eos>. Serialised as space separated "length:count" pairs.
struct LengthPrior {
  std::vector<std::uint64_t> counts;  // counts[length]

  static LengthPrior from_sequences(std::span<const tokenizer::TokenIds> sequences);
  //! Throws domain_error on malformed text.
  static LengthPrior parse(std::string_view text);
  std::string to_string() const;
  bool empty() const noexcept;
  //! A length drawn in proportion to its count; 0 when empty.
  int draw(std::mt19937_64& rng) const;
};

/// Unconditional generation: encoder reads <bos>, `source_masks` <mask>
/// tokens and <eos> (truncated to fit max_len); decoder starts at <bos> and
/// stops at <eos> or max_len ids. Pad, bos, mask and unk are never emitted.
/// Temperature scales logits before softmax sampling.
template <class T>
tokenizer::TokenIds sample(const Model<T>& model, std::mt19937_64& rng, int max_len, double temperature,
                           int source_masks = 0);
template <class T>
tokenizer::TokenIds greedy(const Model<T>& model, int max_len, int source_masks = 0);

extern template class ParameterSet<float>;
extern template class ParameterSet<double>;
extern template class Model<float>;
extern template class Model<double>;
extern template class DecoderSession<float>;
extern template class DecoderSession<double>;

}  // namespace molseq::nn
