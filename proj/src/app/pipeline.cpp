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

#include "molseq/app/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <type_traits>
#include <vector>

#include "../eval/parallel.hpp"
#include "molseq/chem/canonical.hpp"
#include "molseq/chem/smiles.hpp"
#include "molseq/error.hpp"
#include "molseq/eval/generation.hpp"
#include "molseq/eval/property.hpp"
#include "molseq/nn/checkpoint.hpp"
#include "molseq/nn/model.hpp"
#include "molseq/nn/trainer.hpp"
#include "molseq/selfies/selfies.hpp"
#include "molseq/tokenizer/vocab.hpp"

namespace molseq::app {

namespace fs = std::filesystem;

namespace {

util::KeyValues default_values() {
  util::KeyValues kv = {
      {"seed", "0"},
      {"threads", "1"},
      {"out_dir", "."},
      {"f64", "false"},
      {"lenient", "false"},
      {"convert.input", ""},
      {"convert.output", ""},
      {"convert.direction", "smiles-to-selfies"},
      {"train.corpus", ""},
      {"train.eval_corpus", ""},
      {"train.eval_every", "0"},
      {"train.log_every", "50"},
      {"train.max_minutes", "0"},
      {"train.resume", ""},
      {"generate.checkpoint", ""},
      {"generate.n", "10000"},
      {"generate.temperature", "1"},
      {"generate.max_len", "128"},
      {"generate.output", ""},
      {"eval_gen.generated", ""},
      {"eval_gen.train_corpus", ""},
      {"eval_gen.k", "10000"},
      {"eval_gen.fp_radius", std::to_string(chem::kDefaultFingerprintRadius)},
      {"eval_gen.fp_width", std::to_string(chem::kDefaultFingerprintWidth)},
      {"embed.checkpoint", ""},
      {"embed.input", ""},
      {"embed.output", ""},
      {"eval_prop.checkpoint", ""},
      {"eval_prop.dataset", ""},
      {"eval_prop.manifest", ""},
      {"eval_prop.ratios", "0.8,0.1,0.1"},
      {"eval_prop.split_seeds", ""},
  };
  for (const auto& [k, v] : nn::ModelConfig{}.to_map()) {
    if (k != "model.vocab_size") kv[k] = v;
  }
  for (const auto& [k, v] : nn::TrainConfig{}.to_map()) {
    if (k != "train.seed") kv[k] = v;
  }
  return kv;
}

std::string require(const RunConfig& c, const std::string& key) {
  const auto& v = c.get(key);
  if (v.empty()) throw config_error("missing required setting " + key);
  return v;
}

std::string output_path(const RunConfig& c, const std::string& key, const std::string& file) {
  const auto& v = c.get(key);
  return v.empty() ? (fs::path(c.get("out_dir")) / file).string() : v;
}

int threads_of(const RunConfig& c) {
  const auto t = c.get_int("threads");
  if (t < 1) throw config_error("threads must be >= 1");
  return static_cast<int>(t);
}

void prepare_out_dir(const RunConfig& c, const std::string& command) {
  std::error_code ec;
  fs::create_directories(c.get("out_dir"), ec);
  if (ec) throw io_error("cannot create " + c.get("out_dir") + ": " + ec.message());
  util::write_file((fs::path(c.get("out_dir")) / (command + ".config")).string(), c.serialize());
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot write " + path);
  return out;
}

void close_out(std::ofstream& out, const std::string& path) {
  out.close();
  if (!out) throw io_error("write failed for " + path);
}

// Line with trailing CR removed.
bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

// First whitespace-separated field, the SMILES column of a .smi line.
std::string first_field(const std::string& line) {
  const auto b = line.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = line.find_first_of(" \t", b);
  return line.substr(b, e == std::string::npos ? std::string::npos : e - b);
}

std::vector<std::string> read_smiles_file(const std::string& path) {
  auto in = open_in(path);
  std::vector<std::string> out;
  std::string line;
  while (next_line(in, line)) {
    auto s = first_field(line);
    if (!s.empty()) out.push_back(std::move(s));
  }
  return out;
}

void finish_rejects(const RunConfig& c, const RunSummary& s, const std::string& what) {
  if (s.rejected > 0 && !c.get_bool("lenient")) {
    throw domain_error(what + " rejected: " + std::to_string(s.rejected) + " (see the rejects file; --lenient accepts them)");
  }
}

template <class F>
auto with_precision(const RunConfig& c, F&& f) {
  return c.get_bool("f64") ? f(std::type_identity<double>{}) : f(std::type_identity<float>{});
}

std::vector<std::uint64_t> parse_seeds(const RunConfig& c) {
  const auto& text = c.get("eval_prop.split_seeds");
  if (text.empty()) return {c.get_u64("seed")};
  std::vector<std::uint64_t> seeds;
  std::size_t i = 0;
  while (i <= text.size()) {
    auto j = text.find(',', i);
    if (j == std::string::npos) j = text.size();
    seeds.push_back(static_cast<std::uint64_t>(util::parse_int("eval_prop.split_seeds", text.substr(i, j - i))));
    i = j + 1;
  }
  return seeds;
}

std::array<double, 3> parse_ratios(const RunConfig& c) {
  const auto& text = c.get("eval_prop.ratios");
  std::array<double, 3> r{};
  std::size_t i = 0, n = 0;
  while (i <= text.size()) {
    auto j = text.find(',', i);
    if (j == std::string::npos) j = text.size();
    if (n == 3) throw config_error("eval_prop.ratios needs three values");
    r[n++] = util::parse_double("eval_prop.ratios", text.substr(i, j - i));
    i = j + 1;
  }
  if (n != 3) throw config_error("eval_prop.ratios needs three values");
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// RunConfig

RunConfig::RunConfig() : values_(default_values()) {}

void RunConfig::merge_text(std::string_view text) {
  for (const auto& [k, v] : util::parse_key_values(text)) set(k, v);
}

void RunConfig::merge_file(const std::string& path) {
  merge_text(util::read_file(path));
}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw config_error("unknown setting " + key);
  it->second = value;
}

const std::string& RunConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw config_error("unknown setting " + key);
  return it->second;
}

std::int64_t RunConfig::get_int(const std::string& key) const {
  return util::parse_int(key, get(key));
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  const auto v = get_int(key);
  if (v < 0) throw config_error(key + " must be >= 0");
  return static_cast<std::uint64_t>(v);
}

double RunConfig::get_double(const std::string& key) const {
  return util::parse_double(key, get(key));
}

bool RunConfig::get_bool(const std::string& key) const {
  return util::parse_bool(key, get(key));
}

std::string file_id(const std::string& path) {
  const std::string bytes = util::read_file(path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

// ---------------------------------------------------------------------------
// convert

RunSummary run_convert(const RunConfig& c, const Logger& log) {
  const auto direction = c.get("convert.direction");
  if (direction != "smiles-to-selfies" && direction != "selfies-to-smiles") {
    throw config_error("convert.direction must be smiles-to-selfies or selfies-to-smiles");
  }
  const auto in_path = require(c, "convert.input");
  const auto out_path = output_path(c, "convert.output", direction == "smiles-to-selfies" ? "converted.selfies" : "converted.smi");
  prepare_out_dir(c, "convert");
  auto in = open_in(in_path);
  auto out = open_out(out_path);
  auto rejects = open_out(out_path + ".rejects");
  RunSummary s;
  std::string line;
  for (std::size_t n = 1; next_line(in, line); ++n) {
    const std::string text = first_field(line);
    if (text.empty()) {
      out << '\n';
      continue;
    }
    try {
      if (direction == "smiles-to-selfies") {
        out << selfies::join_selfies(selfies::encode(chem::parse_smiles(text))) << '\n';
      } else {
        const auto g = selfies::decode(selfies::split_selfies(text));
        out << chem::canonicalize(g).text << '\n';
      }
      ++s.processed;
    } catch (const Error& e) {
      out << '\n';
      rejects << n << '\t' << text << '\t' << e.what() << '\n';
      ++s.rejected;
    }
  }
  close_out(out, out_path);
  close_out(rejects, out_path + ".rejects");
  log(LogLevel::Info, "converted " + std::to_string(s.processed) + " lines, rejected " + std::to_string(s.rejected));
  finish_rejects(c, s, "lines");
  return s;
}

// ---------------------------------------------------------------------------
// train

namespace {

std::string eval_csv_header() {
  return "step,loss,masked_acc\n";
}

template <class T>
RunSummary train_impl(const RunConfig& c, const Logger& log) {
  const auto corpus_path = require(c, "train.corpus");
  const auto out_dir = fs::path(c.get("out_dir"));
  prepare_out_dir(c, "train");
  RunSummary summary;

  std::vector<selfies::Tokens> encoded;
  {
    auto rejects = open_out((out_dir / "train_rejects.txt").string());
    std::size_t n = 0;
    for (const auto& s : read_smiles_file(corpus_path)) {
      ++n;
      try {
        encoded.push_back(selfies::encode(chem::parse_smiles(s)));
        ++summary.processed;
      } catch (const Error& e) {
        rejects << n << '\t' << s << '\t' << e.what() << '\n';
        ++summary.rejected;
      }
    }
    close_out(rejects, (out_dir / "train_rejects.txt").string());
  }
  finish_rejects(c, summary, "corpus molecules");
  if (encoded.empty()) throw domain_error("training corpus is empty");

  auto vocab = tokenizer::build_vocab(encoded);
  nn::ModelConfig mc = nn::ModelConfig::from_map(c.values());
  mc.vocab_size = vocab.size();
  mc.validate();
  util::KeyValues train_keys;
  for (const auto& [k, v] : nn::TrainConfig{}.to_map()) {
    if (k != "train.seed") train_keys[k] = c.get(k);
  }
  nn::TrainConfig tc = nn::TrainConfig::from_map(train_keys);
  tc.seed = c.get_u64("seed");
  tc.validate();

  std::vector<tokenizer::TokenIds> ids;
  ids.reserve(encoded.size());
  for (const auto& t : encoded) ids.push_back(tokenizer::encode_ids(t, vocab));
  auto corpus = nn::make_corpus(std::move(ids), mc.max_len);
  if (corpus.skipped > 0) log(LogLevel::Warning, std::to_string(corpus.skipped) + " sequences exceed model.max_len and were skipped");
  if (corpus.sequences.empty()) throw domain_error("no training sequence fits model.max_len");
  log(LogLevel::Info, "corpus " + std::to_string(corpus.sequences.size()) + " sequences, vocabulary " + std::to_string(vocab.size()));

  std::vector<tokenizer::TokenIds> eval_set;
  if (!c.get("train.eval_corpus").empty()) {
    for (const auto& s : read_smiles_file(c.get("train.eval_corpus"))) {
      try {
        auto t = tokenizer::encode_ids(selfies::encode(chem::parse_smiles(s)), vocab);
        if (static_cast<int>(t.size()) <= mc.max_len) eval_set.push_back(std::move(t));
      } catch (const Error&) {
      }
    }
    if (eval_set.empty()) throw domain_error("evaluation corpus has no usable molecule");
  }

  nn::Trainer<T> trainer(nn::Model<T>(mc, tc.seed), tc, std::move(corpus.sequences));
  if (!c.get("train.resume").empty()) {
    const auto ck = nn::load_checkpoint(c.get("train.resume"));
    if (!(nn::vocab_from_checkpoint(ck) == vocab)) throw config_error("resume checkpoint vocabulary differs from the corpus vocabulary");
    trainer.restore(ck);
    log(LogLevel::Info, "resumed at step " + std::to_string(trainer.steps_done()));
  }

  std::string eval_csv = eval_csv_header();
  const auto run_eval = [&] {
    if (eval_set.empty()) return;
    const auto e = nn::evaluate(trainer.model(), eval_set, tc.mask_rate, tc.seed);
    eval_csv += std::to_string(trainer.steps_done()) + "," + util::format_double(e.mean_loss()) + "," + util::format_double(e.masked_accuracy()) + "\n";
    log(LogLevel::Info, "eval step " + std::to_string(trainer.steps_done()) + " loss " + util::format_fixed(e.mean_loss(), 5) + " masked_acc " +
                            util::format_fixed(e.masked_accuracy(), 4));
  };

  const int log_every = static_cast<int>(c.get_int("train.log_every"));
  const int eval_every = static_cast<int>(c.get_int("train.eval_every"));
  const double max_minutes = c.get_double("train.max_minutes");
  const auto start = std::chrono::steady_clock::now();
  run_eval();
  while (!trainer.done()) {
    const auto s = trainer.step();
    if (log_every > 0 && (s.step % log_every == 0 || trainer.done())) {
      log(LogLevel::Info, "step " + std::to_string(s.step) + " loss " + util::format_fixed(s.loss, 5) + " masked_acc " +
                              util::format_fixed(s.masked_acc, 4) + " lr " + util::format_double(trainer.learning_rate(s.step)));
    }
    if (eval_every > 0 && s.step % eval_every == 0 && !trainer.done()) run_eval();
    if (tc.checkpoint_every > 0 && s.step % tc.checkpoint_every == 0 && !trainer.done()) {
      nn::save_checkpoint((out_dir / ("checkpoint_step" + std::to_string(s.step) + ".bin")).string(), trainer.checkpoint(vocab));
    }
    if (max_minutes > 0 && std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() >= max_minutes * 60) {
      log(LogLevel::Warning, "time limit reached after " + std::to_string(s.step) + " steps");
      break;
    }
  }
  run_eval();

  nn::save_checkpoint((out_dir / "checkpoint.bin").string(), trainer.checkpoint(vocab));
  vocab.save((out_dir / "vocab.txt").string());
  util::write_file((out_dir / "train_log.csv").string(), trainer.log().csv());
  util::write_file((out_dir / "epoch_log.csv").string(), trainer.log().epoch_csv());
  if (!eval_set.empty()) util::write_file((out_dir / "eval_log.csv").string(), eval_csv);
  log(LogLevel::Info, "wrote " + (out_dir / "checkpoint.bin").string());
  return summary;
}

}  // namespace

RunSummary run_train(const RunConfig& c, const Logger& log) {
  return with_precision(c, [&]<class T>(std::type_identity<T>) { return train_impl<T>(c, log); });
}

// ---------------------------------------------------------------------------
// generate

RunSummary run_generate(const RunConfig& c, const Logger& log) {
  const auto ck_path = require(c, "generate.checkpoint");
  const auto out_path = output_path(c, "generate.output", "generated.selfies");
  prepare_out_dir(c, "generate");
  const auto ck = nn::load_checkpoint(ck_path);
  const auto vocab = nn::vocab_from_checkpoint(ck);
  eval::GenerateOptions opt;
  opt.n = static_cast<int>(c.get_int("generate.n"));
  opt.seed = c.get_u64("seed");
  opt.temperature = c.get_double("generate.temperature");
  opt.max_len = static_cast<int>(c.get_int("generate.max_len"));
  opt.threads = threads_of(c);
  opt.lengths = nn::length_prior_from_checkpoint(ck);
  if (opt.lengths.empty()) log(LogLevel::Warning, "checkpoint has no length histogram; the encoder reads an empty source");
  const auto id = file_id(ck_path);
  const auto set = with_precision(c, [&]<class T>(std::type_identity<T>) {
    return eval::generate_set(nn::model_from_checkpoint<T>(ck), vocab, opt, id);
  });

  std::string selfies_text, smiles_text;
  RunSummary s;
  for (std::size_t i = 0; i < set.size(); ++i) {
    selfies_text += set.selfies[i] + "\n";
    smiles_text += set.canonical[i] + "\n";
    if (set.canonical[i].empty()) ++s.rejected;
    else ++s.processed;
  }
  const auto stem = fs::path(out_path).replace_extension().string();
  util::write_file(out_path, selfies_text);
  util::write_file(stem + ".smi", smiles_text);
  util::write_file(out_path + ".meta", util::format_key_values({{"checkpoint", id},
                                                                {"n", std::to_string(opt.n)},
                                                                {"seed", std::to_string(opt.seed)},
                                                                {"temperature", util::format_double(opt.temperature)},
                                                                {"max_len", std::to_string(opt.max_len)}}));
  log(LogLevel::Info, "generated " + std::to_string(set.size()) + " samples (" + std::to_string(s.rejected) + " empty) to " + out_path);
  return s;
}

// ---------------------------------------------------------------------------
// eval-gen

RunSummary run_eval_gen(const RunConfig& c, const Logger& log) {
  const auto gen_path = require(c, "eval_gen.generated");
  const auto train_path = require(c, "eval_gen.train_corpus");
  prepare_out_dir(c, "eval_gen");
  eval::GeneratedSet set;
  {
    auto in = open_in(gen_path);
    std::string line;
    while (next_line(in, line)) set.selfies.push_back(line);
  }
  set.canonical.resize(set.size());
  RunSummary s;
  eval::parallel_blocks(set.size(), threads_of(c), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      try {
        set.canonical[i] = eval::canonical_from_selfies(set.selfies[i]);
      } catch (const Error&) {
        set.canonical[i].clear();
      }
    }
  });
  for (const auto& canon : set.canonical) canon.empty() ? ++s.rejected : ++s.processed;
  if (fs::exists(gen_path + ".meta")) {
    const auto meta = util::parse_key_values(util::read_file(gen_path + ".meta"));
    if (auto it = meta.find("checkpoint"); it != meta.end()) set.checkpoint_id = it->second;
    if (auto it = meta.find("seed"); it != meta.end()) set.seed = static_cast<std::uint64_t>(util::parse_int("seed", it->second));
  }
  std::size_t skipped = 0;
  const auto training = eval::canonical_index(read_smiles_file(train_path), &skipped);
  if (skipped > 0) log(LogLevel::Warning, std::to_string(skipped) + " training molecules could not be parsed");
  eval::ReportOptions opt;
  opt.k = static_cast<std::size_t>(c.get_u64("eval_gen.k"));
  opt.fp_radius = static_cast<int>(c.get_int("eval_gen.fp_radius"));
  opt.fp_width = static_cast<int>(c.get_int("eval_gen.fp_width"));
  opt.threads = threads_of(c);
  const auto report = eval::evaluate_generation(set, training, opt);
  const auto json_path = (fs::path(c.get("out_dir")) / "eval_gen.json").string();
  util::write_file(json_path, eval::report_json(report));
  log(LogLevel::Output, eval::report_table(report));
  return s;
}

// ---------------------------------------------------------------------------
// embed

namespace {

template <class T>
RunSummary embed_impl(const RunConfig& c, const Logger& log) {
  const auto ck_path = require(c, "embed.checkpoint");
  const auto in_path = require(c, "embed.input");
  const auto out_path = output_path(c, "embed.output", "embeddings.csv");
  prepare_out_dir(c, "embed");
  const auto ck = nn::load_checkpoint(ck_path);
  const auto vocab = nn::vocab_from_checkpoint(ck);
  const auto model = nn::model_from_checkpoint<T>(ck);
  const int threads = threads_of(c);
  const int d = model.config().d_model;

  auto in = open_in(in_path);
  auto out = open_out(out_path);
  auto rejects = open_out(out_path + ".rejects");
  RunSummary s;
  constexpr std::size_t kChunk = 1024;
  std::vector<std::string> chunk;
  std::size_t line_no = 0;
  std::string line;
  const auto flush = [&] {
    std::vector<std::string> rows(chunk.size()), errors(chunk.size());
    eval::parallel_blocks(chunk.size(), threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        try {
          if (chunk[i].empty()) throw domain_error("empty line");
          const auto ids = tokenizer::encode_ids(selfies::encode(chem::parse_smiles(chunk[i])), vocab);
          if (static_cast<int>(ids.size()) > model.config().max_len) throw domain_error("sequence exceeds model.max_len");
          const auto v = model.embed(ids);
          std::string r;
          for (int j = 0; j < d; ++j) {
            if (j) r += ',';
            r += util::format_double(static_cast<double>(v[j]));
          }
          rows[i] = std::move(r);
        } catch (const Error& err) {
          errors[i] = err.what();
        }
      }
    });
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      const std::size_t n = line_no - chunk.size() + i + 1;
      if (errors[i].empty()) {
        out << rows[i] << '\n';
        ++s.processed;
      } else {
        std::string r;
        for (int j = 0; j < d; ++j) r += j ? ",nan" : "nan";
        out << r << '\n';
        rejects << n << '\t' << chunk[i] << '\t' << errors[i] << '\n';
        ++s.rejected;
      }
    }
    chunk.clear();
  };
  while (next_line(in, line)) {
    ++line_no;
    chunk.push_back(first_field(line));
    if (chunk.size() == kChunk) flush();
  }
  flush();
  close_out(out, out_path);
  close_out(rejects, out_path + ".rejects");
  log(LogLevel::Info, "embedded " + std::to_string(s.processed) + " molecules (d=" + std::to_string(d) + "), rejected " +
                          std::to_string(s.rejected));
  finish_rejects(c, s, "lines");
  return s;
}

template <class T>
RunSummary eval_prop_impl(const RunConfig& c, const Logger& log) {
  const auto ck_path = require(c, "eval_prop.checkpoint");
  const auto manifest = eval::TaskManifest::load(require(c, "eval_prop.manifest"));
  const auto dataset = eval::load_dataset(require(c, "eval_prop.dataset"), manifest);
  prepare_out_dir(c, "eval_prop");
  if (dataset.dropped > 0) log(LogLevel::Warning, std::to_string(dataset.dropped) + " dataset rows dropped (unparseable SMILES or no label)");
  const auto ck = nn::load_checkpoint(ck_path);
  const auto vocab = nn::vocab_from_checkpoint(ck);
  const auto model = nn::model_from_checkpoint<T>(ck);
  const auto features = eval::featurize(model, vocab, dataset.smiles, threads_of(c));
  if (features.dropped > 0) log(LogLevel::Warning, std::to_string(features.dropped) + " records could not be encoded and were dropped");

  const auto rows = static_cast<Eigen::Index>(features.records.size());
  Eigen::MatrixXd labels(rows, static_cast<Eigen::Index>(dataset.label_names.size()));
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& l = dataset.labels[features.records[static_cast<std::size_t>(r)]];
    for (std::size_t k = 0; k < l.size(); ++k) labels(r, static_cast<Eigen::Index>(k)) = l[k];
  }
  const auto ratios = parse_ratios(c);
  std::vector<eval::PropertyResult> results;
  for (auto seed : parse_seeds(c)) {
    auto r = eval::evaluate_property(features.x, labels, dataset.task, eval::split(features.records.size(), ratios, seed));
    r.task_name = dataset.name;
    log(LogLevel::Output, dataset.name + " split_seed " + std::to_string(seed) + " " + r.metric + " test " + util::format_fixed(r.test, 5) +
                              " valid " + util::format_fixed(r.valid, 5) + " lambda " + util::format_double(r.lambda) + "\n");
    results.push_back(std::move(r));
  }
  util::write_file((fs::path(c.get("out_dir")) / "eval_prop.json").string(), eval::property_json(results, file_id(ck_path)));
  return {features.records.size(), dataset.dropped + features.dropped};
}

}  // namespace

RunSummary run_embed(const RunConfig& c, const Logger& log) {
  return with_precision(c, [&]<class T>(std::type_identity<T>) { return embed_impl<T>(c, log); });
}

RunSummary run_eval_prop(const RunConfig& c, const Logger& log) {
  return with_precision(c, [&]<class T>(std::type_identity<T>) { return eval_prop_impl<T>(c, log); });
}

}  // namespace molseq::app
