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

#include "molseq/nn/model.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "kernels.hpp"
#include "molseq/error.hpp"
#include "molseq/random.hpp"
#include "molseq/util/format.hpp"

namespace molseq::nn {

using tokenizer::kBos;
using tokenizer::kEos;
using tokenizer::kMask;

// ---------------------------------------------------------------------------
// ModelConfig

void ModelConfig::validate() const {
  auto positive = [](int v, const char* name) {
    if (v <= 0) throw config_error(std::string("model.") + name + " must be positive, got " + std::to_string(v));
  };
  positive(vocab_size, "vocab_size");
  positive(d_model, "d_model");
  positive(n_heads, "n_heads");
  positive(encoder_layers, "encoder_layers");
  positive(decoder_layers, "decoder_layers");
  positive(d_ff, "d_ff");
  if (vocab_size <= tokenizer::kNumSpecials) throw config_error("model.vocab_size must exceed the 5 special tokens");
  if (d_model % n_heads != 0) {
    throw config_error("model.d_model (" + std::to_string(d_model) + ") must be divisible by model.n_heads (" +
                       std::to_string(n_heads) + ")");
  }
  if (max_len < 3) throw config_error("model.max_len must be >= 3");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw config_error("model.dropout must lie in [0, 1)");
}

std::map<std::string, std::string> ModelConfig::to_map() const {
  return {
      {"model.vocab_size", std::to_string(vocab_size)},
      {"model.d_model", std::to_string(d_model)},
      {"model.n_heads", std::to_string(n_heads)},
      {"model.encoder_layers", std::to_string(encoder_layers)},
      {"model.decoder_layers", std::to_string(decoder_layers)},
      {"model.d_ff", std::to_string(d_ff)},
      {"model.max_len", std::to_string(max_len)},
      {"model.dropout", util::format_double(dropout)},
  };
}

ModelConfig ModelConfig::from_map(const std::map<std::string, std::string>& kv) {
  ModelConfig c;
  for (const auto& [key, value] : kv) {
    if (key.rfind("model.", 0) != 0) continue;
    const std::string field = key.substr(6);
    if (field == "dropout") {
      c.dropout = util::parse_double(key, value);
      continue;
    }
    int* target = field == "vocab_size"       ? &c.vocab_size
                  : field == "d_model"        ? &c.d_model
                  : field == "n_heads"        ? &c.n_heads
                  : field == "encoder_layers" ? &c.encoder_layers
                  : field == "decoder_layers" ? &c.decoder_layers
                  : field == "d_ff"           ? &c.d_ff
                  : field == "max_len"        ? &c.max_len
                                              : nullptr;
    if (!target) throw config_error("unknown key " + key);
    *target = static_cast<int>(util::parse_int(key, value));
  }
  return c;
}

LengthPrior LengthPrior::from_sequences(std::span<const tokenizer::TokenIds> sequences) {
  LengthPrior p;
  for (const auto& ids : sequences) {
    const std::size_t len = ids.size() >= 2 ? ids.size() - 2 : 0;
    if (p.counts.size() <= len) p.counts.resize(len + 1, 0);
    ++p.counts[len];
  }
  return p;
}

LengthPrior LengthPrior::parse(std::string_view text) {
  LengthPrior p;
  std::istringstream in{std::string(text)};
  std::string item;
  const auto whole = [](const char* b, const char* e, auto& v) {
    const auto r = std::from_chars(b, e, v);
    return b != e && r.ec == std::errc{} && r.ptr == e;
  };
  while (in >> item) {
    const auto colon = item.find(':');
    std::size_t len = 0;
    std::uint64_t count = 0;
    const char* b = item.data();
    if (colon == std::string::npos || !whole(b, b + colon, len) || !whole(b + colon + 1, b + item.size(), count)) {
      throw domain_error("malformed length histogram entry '" + item + "'");
    }
    if (p.counts.size() <= len) p.counts.resize(len + 1, 0);
    p.counts[len] += count;
  }
  return p;
}

std::string LengthPrior::to_string() const {
  std::string out;
  for (std::size_t len = 0; len < counts.size(); ++len) {
    if (counts[len] == 0) continue;
    if (!out.empty()) out += ' ';
    out += std::to_string(len) + ':' + std::to_string(counts[len]);
  }
  return out;
}

bool LengthPrior::empty() const noexcept {
  for (auto c : counts) {
    if (c) return false;
  }
  return true;
}

int LengthPrior::draw(std::mt19937_64& rng) const {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) return 0;
  auto u = static_cast<std::uint64_t>(uniform01(rng) * static_cast<double>(total));
  for (std::size_t len = 0; len < counts.size(); ++len) {
    if (u < counts[len]) return static_cast<int>(len);
    u -= counts[len];
  }
  return static_cast<int>(counts.size()) - 1;
}

LossStats& LossStats::operator+=(const LossStats& o) {
  loss_sum += o.loss_sum;
  tokens += o.tokens;
  masked += o.masked;
  masked_correct += o.masked_correct;
  return *this;
}

// ---------------------------------------------------------------------------
// ParameterSet

template <class T>
int ParameterSet<T>::add(std::string name, int rows, int cols) {
  names_.push_back(std::move(name));
  tensors_.push_back(Mat<T>::Zero(rows, cols));
  return size() - 1;
}

template <class T>
int ParameterSet<T>::find(std::string_view name) const {
  for (int i = 0; i < size(); ++i) {
    if (names_[i] == name) return i;
  }
  return -1;
}

template <class T>
std::int64_t ParameterSet<T>::scalar_count() const {
  std::int64_t n = 0;
  for (const auto& t : tensors_) n += t.size();
  return n;
}

template <class T>
ParameterSet<T> ParameterSet<T>::zeros_like() const {
  ParameterSet out;
  for (int i = 0; i < size(); ++i) out.add(names_[i], static_cast<int>(tensors_[i].rows()), static_cast<int>(tensors_[i].cols()));
  return out;
}

namespace {

template <class T>
Layout build_layout(const ModelConfig& c, ParameterSet<T>& p) {
  const int d = c.d_model;
  auto norm = [&](const std::string& prefix) {
    return Layout::Norm{p.add(prefix + ".gain", 1, d), p.add(prefix + ".bias", 1, d)};
  };
  auto attention = [&](const std::string& prefix) {
    Layout::Attention a{};
    a.wq = p.add(prefix + ".wq", d, d);
    a.bq = p.add(prefix + ".bq", 1, d);
    a.wk = p.add(prefix + ".wk", d, d);
    a.bk = p.add(prefix + ".bk", 1, d);
    a.wv = p.add(prefix + ".wv", d, d);
    a.bv = p.add(prefix + ".bv", 1, d);
    a.wo = p.add(prefix + ".wo", d, d);
    a.bo = p.add(prefix + ".bo", 1, d);
    return a;
  };
  auto feed_forward = [&](const std::string& prefix) {
    return Layout::FeedForward{p.add(prefix + ".w1", d, c.d_ff), p.add(prefix + ".b1", 1, c.d_ff),
                               p.add(prefix + ".w2", c.d_ff, d), p.add(prefix + ".b2", 1, d)};
  };
  Layout L{};
  L.tok_emb = p.add("tok_emb", c.vocab_size, d);
  L.enc_pos = p.add("enc_pos", c.max_len, d);
  L.dec_pos = p.add("dec_pos", c.max_len, d);
  L.out_bias = p.add("out_bias", 1, c.vocab_size);
  for (int l = 0; l < c.encoder_layers; ++l) {
    const std::string pre = "enc." + std::to_string(l);
    Layout::EncoderLayer e{};
    e.ln1 = norm(pre + ".ln1");
    e.attn = attention(pre + ".attn");
    e.ln2 = norm(pre + ".ln2");
    e.ff = feed_forward(pre + ".ff");
    L.encoder.push_back(e);
  }
  L.encoder_norm = norm("enc.norm");
  for (int l = 0; l < c.decoder_layers; ++l) {
    const std::string pre = "dec." + std::to_string(l);
    Layout::DecoderLayer e{};
    e.ln1 = norm(pre + ".ln1");
    e.self_attn = attention(pre + ".self");
    e.ln2 = norm(pre + ".ln2");
    e.cross_attn = attention(pre + ".cross");
    e.ln3 = norm(pre + ".ln3");
    e.ff = feed_forward(pre + ".ff");
    L.decoder.push_back(e);
  }
  L.decoder_norm = norm("dec.norm");
  return L;
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Forward graph over packed rows.
template <class T>
struct Graph {
  using Var = typename Tape<T>::Var;

  Tape<T>& tape;
  const ModelConfig& c;
  const Layout& L;
  std::vector<Var> p;
  std::mt19937_64* rng;

  Graph(Tape<T>& t, const ModelConfig& config, const Layout& layout, const ParameterSet<T>& params,
        ParameterSet<T>* grads, std::mt19937_64* dropout_rng)
      : tape(t), c(config), L(layout), rng(dropout_rng) {
    p.reserve(params.size());
    for (int i = 0; i < params.size(); ++i) p.push_back(tape.param(params[i], grads ? &(*grads)[i] : nullptr));
  }

  Var drop(Var x) { return rng ? tape.dropout(x, static_cast<T>(c.dropout), *rng) : x; }
  Var linear(Var x, int w, int b) { return tape.add_bias(tape.matmul(x, p[w]), p[b]); }
  Var norm(Var x, Layout::Norm n) { return tape.layer_norm(x, p[n.gain], p[n.bias]); }
  Var feed_forward(Var x, const Layout::FeedForward& f) { return linear(tape.gelu(linear(x, f.w1, f.b1)), f.w2, f.b2); }

  Var attention(Var xq, Var xkv, const Layout::Attention& a, AttentionSpec spec) {
    Var q = linear(xq, a.wq, a.bq);
    Var k = linear(xkv, a.wk, a.bk);
    Var v = linear(xkv, a.wv, a.bv);
    return linear(tape.attention(q, k, v, std::move(spec)), a.wo, a.bo);
  }

  Var embed(std::vector<int> ids, std::vector<int> positions, int pos_table) {
    return drop(tape.add(tape.gather_rows(p[L.tok_emb], std::move(ids)), tape.gather_rows(p[pos_table], std::move(positions))));
  }

  Var encoder(std::vector<int> ids, std::vector<int> positions, const AttentionSpec& spec) {
    Var x = embed(std::move(ids), std::move(positions), L.enc_pos);
    for (const auto& layer : L.encoder) {
      Var h = norm(x, layer.ln1);
      x = tape.add(x, drop(attention(h, h, layer.attn, spec)));
      x = tape.add(x, drop(feed_forward(norm(x, layer.ln2), layer.ff)));
    }
    return norm(x, L.encoder_norm);
  }

  Var decoder(std::vector<int> ids, std::vector<int> positions, const AttentionSpec& self_spec, Var enc,
              const AttentionSpec& cross_spec) {
    Var x = embed(std::move(ids), std::move(positions), L.dec_pos);
    for (const auto& layer : L.decoder) {
      Var h = norm(x, layer.ln1);
      x = tape.add(x, drop(attention(h, h, layer.self_attn, self_spec)));
      x = tape.add(x, drop(attention(norm(x, layer.ln2), enc, layer.cross_attn, cross_spec)));
      x = tape.add(x, drop(feed_forward(norm(x, layer.ln3), layer.ff)));
    }
    Var h = norm(x, L.decoder_norm);
    return tape.add_bias(tape.matmul_nt(h, p[L.tok_emb]), p[L.out_bias]);
  }
};

void check_ids(std::span<const int> ids, const ModelConfig& c, const char* what) {
  if (ids.empty()) throw domain_error(std::string(what) + " is empty");
  if (static_cast<int>(ids.size()) > c.max_len) {
    throw domain_error(std::string(what) + " length " + std::to_string(ids.size()) + " exceeds max_len " + std::to_string(c.max_len));
  }
  for (int id : ids) {
    if (id < 0 || id >= c.vocab_size) throw domain_error(std::string(what) + " holds token id " + std::to_string(id) + " outside the vocabulary");
  }
}

std::vector<int> iota_vec(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i;
  return v;
}

template <class T>
int argmax_row(const Mat<T>& m, Eigen::Index row) {
  Eigen::Index best = 0;
  m.row(row).maxCoeff(&best);
  return static_cast<int>(best);
}

}  // namespace

// ---------------------------------------------------------------------------
// Model

template <class T>
Model<T>::Model(ModelConfig config, std::uint64_t seed) : config_(std::move(config)) {
  config_.validate();
  layout_ = build_layout(config_, params_);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 0.02);
  for (int i = 0; i < params_.size(); ++i) {
    const std::string& name = params_.name(i);
    Mat<T>& t = params_[i];
    if (ends_with(name, ".gain")) {
      t.setOnes();
    } else if (t.rows() == 1) {
      t.setZero();
    } else {
      for (Eigen::Index k = 0; k < t.size(); ++k) t.data()[k] = static_cast<T>(normal(rng));
    }
  }
}

template <class T>
LossStats Model<T>::loss(std::span<const Example> batch, ParameterSet<T>* grads, std::mt19937_64* dropout_rng) const {
  std::vector<int> enc_ids, enc_pos, dec_ids, dec_pos, targets;
  AttentionSpec enc_spec{config_.n_heads, false, {}, {}};
  AttentionSpec self_spec{config_.n_heads, true, {}, {}};
  AttentionSpec cross_spec{config_.n_heads, false, {}, {}};
  std::vector<int> dec_begin;
  for (const Example& ex : batch) {
    check_ids(ex.x, config_, "encoder input");
    check_ids(ex.y, config_, "target");
    if (ex.x.size() != ex.y.size() || ex.y.size() < 2) throw domain_error("example needs equal-length x and y of length >= 2");
    const int n = static_cast<int>(ex.y.size());
    const int eb = static_cast<int>(enc_ids.size());
    const int db = static_cast<int>(dec_ids.size());
    enc_ids.insert(enc_ids.end(), ex.x.begin(), ex.x.end());
    dec_ids.insert(dec_ids.end(), ex.y.begin(), ex.y.end() - 1);
    targets.insert(targets.end(), ex.y.begin() + 1, ex.y.end());
    for (int i = 0; i < n; ++i) enc_pos.push_back(i);
    for (int i = 0; i < n - 1; ++i) dec_pos.push_back(i);
    enc_spec.segments.push_back({eb, n, eb, n});
    self_spec.segments.push_back({db, n - 1, db, n - 1});
    cross_spec.segments.push_back({db, n - 1, eb, n});
    dec_begin.push_back(db);
  }
  LossStats stats;
  if (batch.empty()) return stats;
  stats.tokens = static_cast<int>(targets.size());

  Tape<T> tape;
  Graph<T> g(tape, config_, layout_, params_, grads, dropout_rng);
  auto enc = g.encoder(std::move(enc_ids), std::move(enc_pos), enc_spec);
  auto logits = g.decoder(std::move(dec_ids), std::move(dec_pos), self_spec, enc, cross_spec);
  const auto& lv = tape.value(logits);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    for (int pos : batch[b].mask_positions) {
      if (pos < 1 || pos >= static_cast<int>(batch[b].y.size())) continue;
      ++stats.masked;
      stats.masked_correct += argmax_row(lv, dec_begin[b] + pos - 1) == batch[b].y[pos];
    }
  }
  auto loss = tape.cross_entropy(logits, targets, T(1) / static_cast<T>(stats.tokens), &stats.loss_sum);
  if (grads) tape.backward(loss);
  return stats;
}

template <class T>
Mat<T> Model<T>::encode(std::span<const int> ids, std::span<const char> pad_mask) const {
  check_ids(ids, config_, "encoder input");
  const int n = static_cast<int>(ids.size());
  AttentionSpec spec{config_.n_heads, false, {{0, n, 0, n}}, {}};
  if (!pad_mask.empty()) {
    if (static_cast<int>(pad_mask.size()) != n) throw domain_error("pad mask length differs from input length");
    for (char m : pad_mask) spec.key_valid.push_back(m ? 0 : 1);
  }
  Tape<T> tape;
  Graph<T> g(tape, config_, layout_, params_, nullptr, nullptr);
  auto enc = g.encoder(std::vector<int>(ids.begin(), ids.end()), iota_vec(n), spec);
  return tape.value(enc);
}

template <class T>
Mat<T> Model<T>::decode_all(const Mat<T>& enc_states, std::span<const int> prefix) const {
  check_ids(prefix, config_, "decoder prefix");
  if (prefix.front() != kBos) throw domain_error("decoder prefix must start with <bos>");
  if (enc_states.cols() != config_.d_model || enc_states.rows() == 0) throw domain_error("encoder states have the wrong shape");
  const int n = static_cast<int>(prefix.size());
  const int m = static_cast<int>(enc_states.rows());
  Tape<T> tape;
  Graph<T> g(tape, config_, layout_, params_, nullptr, nullptr);
  auto enc = tape.constant(enc_states);
  auto logits = g.decoder(std::vector<int>(prefix.begin(), prefix.end()), iota_vec(n),
                          AttentionSpec{config_.n_heads, true, {{0, n, 0, n}}, {}}, enc,
                          AttentionSpec{config_.n_heads, false, {{0, n, 0, m}}, {}});
  return tape.value(logits);
}

template <class T>
RowVec<T> Model<T>::decode_step(const Mat<T>& enc_states, std::span<const int> prefix) const {
  Mat<T> all = decode_all(enc_states, prefix);
  return all.row(all.rows() - 1);
}

template <class T>
RowVec<T> Model<T>::embed(std::span<const int> ids) const {
  Mat<T> states = encode(ids);
  RowVec<T> sum = RowVec<T>::Zero(config_.d_model);
  int count = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (tokenizer::Vocabulary::is_special(ids[i])) continue;
    sum += states.row(static_cast<Eigen::Index>(i));
    ++count;
  }
  if (count == 0) throw domain_error("cannot embed a sequence without content tokens");
  return sum / static_cast<T>(count);
}

// ---------------------------------------------------------------------------
// DecoderSession

template <class T>
DecoderSession<T>::DecoderSession(const Model<T>& model, const Mat<T>& enc_states) : model_(model) {
  const auto& c = model.config();
  const auto& p = model.params();
  if (enc_states.cols() != c.d_model || enc_states.rows() == 0) throw domain_error("encoder states have the wrong shape");
  for (const auto& layer : model.layout().decoder) {
    const auto& a = layer.cross_attn;
    cross_k_.push_back((enc_states * p[a.wk]).rowwise() + p[a.bk].row(0));
    cross_v_.push_back((enc_states * p[a.wv]).rowwise() + p[a.bv].row(0));
    self_k_.push_back(Mat<T>::Zero(c.max_len, c.d_model));
    self_v_.push_back(Mat<T>::Zero(c.max_len, c.d_model));
  }
}

template <class T>
RowVec<T> DecoderSession<T>::push(int token) {
  const auto& c = model_.config();
  const auto& p = model_.params();
  const auto& L = model_.layout();
  if (length_ >= c.max_len) throw domain_error("decoder session exceeded max_len");
  if (token < 0 || token >= c.vocab_size) throw domain_error("token id " + std::to_string(token) + " outside the vocabulary");
  const int t = length_++;
  auto linear = [&](const Mat<T>& x, int w, int b) -> Mat<T> { return (x * p[w]).rowwise() + p[b].row(0); };
  auto norm = [&](const Mat<T>& x, Layout::Norm n) { return kernels::layer_norm<T>(x, p[n.gain], p[n.bias], nullptr); };

  Mat<T> x = p[L.tok_emb].row(token) + p[L.dec_pos].row(t);
  AttentionSpec self_spec{c.n_heads, false, {{0, 1, 0, t + 1}}, {}};
  for (std::size_t l = 0; l < L.decoder.size(); ++l) {
    const auto& layer = L.decoder[l];
    Mat<T> h = norm(x, layer.ln1);
    Mat<T> q = linear(h, layer.self_attn.wq, layer.self_attn.bq);
    self_k_[l].row(t) = linear(h, layer.self_attn.wk, layer.self_attn.bk);
    self_v_[l].row(t) = linear(h, layer.self_attn.wv, layer.self_attn.bv);
    Mat<T> o(1, c.d_model);
    kernels::attention_segment<T>(q, self_k_[l], self_v_[l], self_spec, self_spec.segments[0], o, nullptr);
    x += linear(o, layer.self_attn.wo, layer.self_attn.bo);

    const int m = static_cast<int>(cross_k_[l].rows());
    AttentionSpec cross_spec{c.n_heads, false, {{0, 1, 0, m}}, {}};
    q = linear(norm(x, layer.ln2), layer.cross_attn.wq, layer.cross_attn.bq);
    kernels::attention_segment<T>(q, cross_k_[l], cross_v_[l], cross_spec, cross_spec.segments[0], o, nullptr);
    x += linear(o, layer.cross_attn.wo, layer.cross_attn.bo);

    Mat<T> f = linear(norm(x, layer.ln3), layer.ff.w1, layer.ff.b1).unaryExpr([](T v) { return kernels::gelu(v); });
    x += linear(f, layer.ff.w2, layer.ff.b2);
  }
  Mat<T> h = norm(x, L.decoder_norm);
  RowVec<T> logits = h * p[L.tok_emb].transpose();
  logits += p[L.out_bias].row(0);
  return logits;
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

template <class T>
std::vector<double> allowed_logits(const RowVec<T>& logits) {
  std::vector<double> out(logits.size());
  for (Eigen::Index i = 0; i < logits.size(); ++i) out[i] = static_cast<double>(logits[i]);
  for (int s : {tokenizer::kPad, tokenizer::kBos, tokenizer::kMask, tokenizer::kUnk}) {
    out[s] = -std::numeric_limits<double>::infinity();
  }
  return out;
}

int argmax(const std::vector<double>& v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

template <class T, class Choose>
tokenizer::TokenIds generate(const Model<T>& model, int max_len, int source_masks, Choose choose) {
  max_len = std::min(max_len, model.config().max_len);
  if (max_len < 2) throw domain_error("max_len must be >= 2");
  if (source_masks < 0) throw domain_error("source_masks must be >= 0");
  tokenizer::TokenIds source(static_cast<std::size_t>(std::min(source_masks, model.config().max_len - 2)) + 2, kMask);
  source.front() = kBos;
  source.back() = kEos;
  DecoderSession<T> session(model, model.encode(source));
  tokenizer::TokenIds ids{kBos};
  while (static_cast<int>(ids.size()) < max_len - 1) {
    const int next = choose(allowed_logits<T>(session.push(ids.back())));
    ids.push_back(next);
    if (next == kEos) return ids;
  }
  ids.push_back(kEos);
  return ids;
}

}  // namespace

template <class T>
tokenizer::TokenIds sample(const Model<T>& model, std::mt19937_64& rng, int max_len, double temperature,
                           int source_masks) {
  if (!(temperature > 0.0)) throw domain_error("temperature must be positive");
  return generate(model, max_len, source_masks, [&](std::vector<double> z) {
    const double top = z[argmax(z)];
    double total = 0;
    for (double& v : z) {
      v = std::exp((v - top) / temperature);
      total += v;
    }
    double u = uniform01(rng) * total;
    int last = 0;
    for (int i = 0; i < static_cast<int>(z.size()); ++i) {
      if (z[i] <= 0) continue;
      last = i;
      if (u < z[i]) return i;
      u -= z[i];
    }
    return last;
  });
}

template <class T>
tokenizer::TokenIds greedy(const Model<T>& model, int max_len, int source_masks) {
  return generate(model, max_len, source_masks, [](const std::vector<double>& z) { return argmax(z); });
}

template class ParameterSet<float>;
template class ParameterSet<double>;
template class Model<float>;
template class Model<double>;
template class DecoderSession<float>;
template class DecoderSession<double>;
template tokenizer::TokenIds sample<float>(const Model<float>&, std::mt19937_64&, int, double, int);
template tokenizer::TokenIds sample<double>(const Model<double>&, std::mt19937_64&, int, double, int);
template tokenizer::TokenIds greedy<float>(const Model<float>&, int, int);
template tokenizer::TokenIds greedy<double>(const Model<double>&, int, int);

}  // namespace molseq::nn
