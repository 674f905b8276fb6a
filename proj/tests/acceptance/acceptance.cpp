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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "molseq/chem/canonical.hpp"
#include "molseq/chem/fingerprint.hpp"
#include "molseq/chem/smiles.hpp"
#include "molseq/error.hpp"
#include "molseq/eval/generation.hpp"
#include "molseq/eval/property.hpp"
#include "molseq/nn/model.hpp"
#include "molseq/nn/trainer.hpp"
#include "molseq/selfies/selfies.hpp"
#include "molseq/tokenizer/vocab.hpp"
#include "molseq/util/format.hpp"

namespace {

namespace fs = std::filesystem;
using namespace molseq;
using Clock = std::chrono::steady_clock;

struct Settings {
  std::string corpus_dir = MOLSEQ_CORPUS_DIR;
  std::string test_data = MOLSEQ_TEST_DATA;
  std::string cli = MOLSEQ_CLI;
  std::string work_dir = "acceptance_work";
  double train_minutes = 30;
  int train_steps = nn::TrainConfig{}.steps;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(double v, int digits = 4) {
  return util::format_fixed(v, digits);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

std::vector<std::vector<std::string>> read_tsv(const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& line : read_lines(path)) {
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, '\t');) cols.push_back(c);
    if (!line.empty() && line.back() == '\t') cols.emplace_back();
    rows.push_back(std::move(cols));
  }
  return rows;
}

std::string canon_of(const chem::MolecularGraph& g) {
  return chem::canonicalize(g).text;
}

// Shared state: the model trained for criterion 6 is reused by 7 and 9.
struct Trained {
  tokenizer::Vocabulary vocab;
  std::vector<std::string> train_smiles;
  std::optional<nn::Model<float>> initial;
  std::optional<nn::Model<float>> model;
  nn::LengthPrior lengths;
};

// ---------------------------------------------------------------------------

Outcome selfies_totality() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> len(1, 60);
  int ok = 0;
  const int n = 10000;
  std::string first_bad;
  for (int i = 0; i < n; ++i) {
    const auto tokens = selfies::random_token_string(rng, len(rng));
    try {
      const auto g = selfies::decode(tokens);
      if (!g.empty()) g.validate();
      ++ok;
    } catch (const std::exception& e) {
      if (first_bad.empty()) first_bad = selfies::join_selfies(tokens) + " (" + e.what() + ")";
    }
  }
  const double secs = seconds_since(t0);
  return {ok == n && secs < 60, std::to_string(ok) + "/" + std::to_string(n) + " valence-valid decodes in " + fmt(secs, 2) + " s" +
                                    (first_bad.empty() ? "" : "; first failure " + first_bad)};
}

Outcome grammar_round_trip(const Settings& s) {
  int ok = 0, n = 0;
  std::string first_bad;
  for (const char* file : {"/moses_train_6k.smi", "/moses_test_1k.smi"}) {
    for (const auto& smi : read_lines(s.corpus_dir + file)) {
      ++n;
      try {
        const auto g = chem::parse_smiles(smi);
        if (canon_of(selfies::decode(selfies::encode(g))) == canon_of(g)) {
          ++ok;
          continue;
        }
      } catch (const Error&) {
      }
      if (first_bad.empty()) first_bad = smi;
    }
  }
  return {ok == n && n >= 1000, std::to_string(ok) + "/" + std::to_string(n) + " molecules round-trip" +
                                    (first_bad.empty() ? "" : "; first failure " + first_bad)};
}

Outcome reference_agreement(const Settings& s) {
  auto agree = [](const std::string& selfies_text, const std::string& reference) {
    try {
      const auto ours = canon_of(selfies::decode(selfies::split_selfies(selfies_text)));
      const auto theirs = reference.empty() ? std::string() : canon_of(chem::parse_smiles(reference));
      return ours == theirs;
    } catch (const Error&) {
      return false;
    }
  };
  std::string detail;
  bool pass = true;
  const struct {
    const char* file;
    std::size_t selfies_col, ref_col;
  } sets[] = {{"/selfies_reference_corpus.tsv", 1, 2}, {"/selfies_reference_random.tsv", 0, 1}, {"/selfies_reference_molseq.tsv", 0, 1}};
  for (const auto& set : sets) {
    const auto rows = read_tsv(s.test_data + set.file);
    std::size_t ok = 0;
    for (const auto& r : rows) {
      if (r.size() > std::max(set.selfies_col, set.ref_col) && agree(r[set.selfies_col], r[set.ref_col])) ++ok;
    }
    pass = pass && ok == rows.size() && rows.size() >= 1000;
    detail += std::string(detail.empty() ? "" : ", ") + fs::path(set.file).stem().string() + " " + std::to_string(ok) + "/" +
              std::to_string(rows.size());
  }
  return {pass, detail};
}

std::vector<nn::Example> real_batch(const Settings& s, const tokenizer::Vocabulary& vocab, int count, int max_len, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<nn::Example> batch;
  for (const auto& smi : read_lines(s.corpus_dir + "/moses_test_1k.smi")) {
    const auto ids = tokenizer::encode_ids(selfies::encode(chem::parse_smiles(smi)), vocab);
    if (static_cast<int>(ids.size()) > max_len) continue;
    batch.push_back(nn::make_example(ids, 0.3, rng));
    if (static_cast<int>(batch.size()) == count) break;
  }
  return batch;
}

tokenizer::Vocabulary corpus_vocab(const Settings& s) {
  std::vector<selfies::Tokens> all;
  for (const auto& smi : read_lines(s.corpus_dir + "/moses_train_6k.smi")) all.push_back(selfies::encode(chem::parse_smiles(smi)));
  return tokenizer::build_vocab(all);
}

Outcome gradient_check(const Settings& s, const tokenizer::Vocabulary& vocab) {
  nn::ModelConfig c;
  c.vocab_size = vocab.size();
  c.d_model = 16;
  c.n_heads = 2;
  c.encoder_layers = 1;
  c.decoder_layers = 1;
  c.d_ff = 32;
  c.max_len = 24;
  c.dropout = 0.0;
  nn::Model<double> m(c, 17);
  std::mt19937_64 rng(29);
  std::normal_distribution<double> nd(0.0, 0.3);
  for (int i = 0; i < m.params().size(); ++i) {
    for (Eigen::Index k = 0; k < m.params()[i].size(); ++k) m.params()[i].data()[k] += nd(rng);
  }
  const auto batch = real_batch(s, vocab, 3, c.max_len, 3);
  auto grads = m.params().zeros_like();
  m.loss(batch, &grads, nullptr);
  const double h = 1e-5;
  double worst = 0;
  std::size_t checked = 0, failed = 0;
  std::string worst_name;
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
      ++checked;
      if (!(rel < 1e-4)) ++failed;
      if (rel > worst) {
        worst = rel;
        worst_name = m.params().name(i) + "[" + std::to_string(k) + "]";
      }
    }
  }
  return {failed == 0 && static_cast<std::int64_t>(checked) == m.params().scalar_count(),
          std::to_string(checked) + " parameters (d_model 16, 1+1 layers, vocab " + std::to_string(vocab.size()) + "), " +
              std::to_string(failed) + " above 1e-4, worst relative error " + util::format_double(worst) + " at " + worst_name};
}

template <class T>
double zeroed_loss_gap(const Settings& s, const tokenizer::Vocabulary& vocab) {
  nn::ModelConfig c;
  c.vocab_size = vocab.size();
  nn::Model<T> m(c, 5);
  m.params()[m.layout().tok_emb].setZero();
  m.params()[m.layout().out_bias].setZero();
  const auto stats = m.loss(real_batch(s, vocab, 16, c.max_len, 4), nullptr, nullptr);
  return std::abs(stats.mean_loss() - std::log(static_cast<double>(vocab.size())));
}

Outcome loss_floor(const Settings& s, const tokenizer::Vocabulary& vocab) {
  const double g32 = zeroed_loss_gap<float>(s, vocab);
  const double g64 = zeroed_loss_gap<double>(s, vocab);
  return {g32 < 1e-6 && g64 < 1e-6, "|loss - ln " + std::to_string(vocab.size()) + "| = " + util::format_double(g32) +
                                        " (32-bit), " + util::format_double(g64) + " (64-bit), default config"};
}

Outcome training_efficacy(const Settings& s, Trained& t) {
  t.train_smiles = read_lines(s.corpus_dir + "/moses_train_6k.smi");
  std::vector<selfies::Tokens> encoded;
  for (const auto& smi : t.train_smiles) encoded.push_back(selfies::encode(chem::parse_smiles(smi)));
  t.vocab = tokenizer::build_vocab(encoded);
  nn::ModelConfig mc;
  mc.vocab_size = t.vocab.size();
  nn::TrainConfig tc;
  tc.steps = s.train_steps;
  std::vector<tokenizer::TokenIds> ids;
  for (const auto& e : encoded) ids.push_back(tokenizer::encode_ids(e, t.vocab));
  auto corpus = nn::make_corpus(std::move(ids), mc.max_len);

  std::vector<tokenizer::TokenIds> held_out;
  for (const auto& smi : read_lines(s.corpus_dir + "/moses_test_1k.smi")) {
    auto v = tokenizer::encode_ids(selfies::encode(chem::parse_smiles(smi)), t.vocab);
    if (static_cast<int>(v.size()) <= mc.max_len) held_out.push_back(std::move(v));
  }

  t.initial.emplace(mc, tc.seed);
  t.lengths = nn::LengthPrior::from_sequences(corpus.sequences);
  nn::Trainer<float> trainer(*t.initial, tc, std::move(corpus.sequences));
  const auto before = nn::evaluate(trainer.model(), held_out, tc.mask_rate, tc.seed);
  const auto t0 = Clock::now();
  while (!trainer.done() && seconds_since(t0) < s.train_minutes * 60) trainer.step();
  const double secs = seconds_since(t0);
  const auto after = nn::evaluate(trainer.model(), held_out, tc.mask_rate, tc.seed);
  t.model.emplace(trainer.model());

  const auto& log = trainer.log().steps();
  auto window_mean = [&](std::size_t b, std::size_t e) {
    double sum = 0;
    for (std::size_t i = b; i < e; ++i) sum += log[i].loss;
    return sum / static_cast<double>(e - b);
  };
  const std::size_t w = std::min<std::size_t>(50, log.size());
  const double ratio = after.mean_loss() / before.mean_loss();
  return {ratio < 0.5 && after.masked_accuracy() > 0.5 && secs <= s.train_minutes * 60 + 1,
          "held-out loss " + fmt(before.mean_loss()) + " -> " + fmt(after.mean_loss()) + " (ratio " + fmt(ratio) + "), masked accuracy " +
              fmt(before.masked_accuracy()) + " -> " + fmt(after.masked_accuracy()) + ", " + std::to_string(trainer.steps_done()) +
              " steps in " + fmt(secs / 60, 2) + " min; train loss first/last " + std::to_string(w) + " steps " +
              fmt(window_mean(0, w)) + "/" + fmt(window_mean(log.size() - w, log.size()))};
}

double brute_intdiv(const std::vector<chem::Fingerprint>& fps, int p) {
  double sum = 0;
  for (const auto& a : fps) {
    for (const auto& b : fps) {
      int both = 0, either = 0;
      for (int i = 0; i < a.width(); ++i) {
        both += a.test(i) && b.test(i);
        either += a.test(i) || b.test(i);
      }
      sum += std::pow(either == 0 ? 1.0 : static_cast<double>(both) / either, p);
    }
  }
  return 1.0 - std::pow(sum / (static_cast<double>(fps.size()) * fps.size()), 1.0 / p);
}

Outcome generation(const Trained& t) {
  if (!t.model) return {false, "no trained model"};
  eval::GenerateOptions opt;
  opt.n = 1000;
  opt.seed = 0;
  opt.lengths = t.lengths;
  const auto set = eval::generate_set(*t.model, t.vocab, opt, "acceptance");
  std::size_t empty = 0, nonempty_valid = 0;
  for (const auto& c : set.canonical) {
    if (c.empty()) {
      ++empty;
      continue;
    }
    try {
      chem::parse_smiles(c).validate();
      ++nonempty_valid;
    } catch (const Error&) {
    }
  }
  const std::size_t nonempty = set.size() - empty;
  const auto report = eval::evaluate_generation(set, eval::canonical_index(t.train_smiles), {.k = 1000});

  const auto distinct = eval::distinct_valid(set);
  std::vector<chem::Fingerprint> fps;
  for (std::size_t i = 0; i < std::min<std::size_t>(20, distinct.size()); ++i) fps.push_back(chem::fingerprint(chem::parse_smiles(distinct[i])));
  const double d1 = std::abs(eval::internal_diversity(fps, 1) - brute_intdiv(fps, 1));
  const double d2 = std::abs(eval::internal_diversity(fps, 2) - brute_intdiv(fps, 2));
  const bool in_range = report.intdiv1 >= 0 && report.intdiv1 <= 1 && report.intdiv2 >= 0 && report.intdiv2 <= 1;
  const bool pass = nonempty_valid == nonempty && empty * 100 < set.size() && in_range && fps.size() == 20 && d1 <= 1e-12 && d2 <= 1e-12;
  return {pass, "valid " + std::to_string(nonempty_valid) + "/" + std::to_string(nonempty) + " non-empty (validity " +
                    fmt(report.validity.value) + ", " + std::to_string(empty) + " empty), unique@1K " + fmt(report.unique.value) +
                    ", novelty " + fmt(report.novelty.value) + ", IntDiv1 " + fmt(report.intdiv1) + ", IntDiv2 " + fmt(report.intdiv2) +
                    ", oracle gap on 20 molecules " + util::format_double(std::max(d1, d2))};
}

Outcome metric_oracles() {
  std::mt19937_64 rng(77);
  int auc_exact = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 60);
    std::vector<double> sc(n);
    std::vector<int> y(n);
    for (int i = 0; i < n; ++i) {
      sc[i] = static_cast<double>(rng() % 10) / 4.0;
      y[i] = static_cast<int>(rng() % 2);
    }
    y[0] = 0;
    y[1] = 1;
    double wins = 0, pairs = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (y[i] == 1 && y[j] == 0) {
          pairs += 1;
          wins += sc[i] > sc[j] ? 1.0 : sc[i] == sc[j] ? 0.5 : 0.0;
        }
    auc_exact += eval::roc_auc(sc, y) == wins / pairs;
  }
  double rmse_gap = 0;
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(37), b(37);
    long double sq = 0;
    for (int i = 0; i < 37; ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
      sq += static_cast<long double>(a[i] - b[i]) * (a[i] - b[i]);
    }
    rmse_gap = std::max(rmse_gap, std::abs(eval::rmse(a, b) - static_cast<double>(std::sqrt(sq / 37))));
  }
  chem::Fingerprint x(1024, 2), y(1024, 2);
  x.set(3);
  x.set(700);
  y.set(5);
  const std::vector<chem::Fingerprint> single{x}, disjoint{x, y};
  const double s1 = eval::internal_diversity(single, 1), s2 = eval::internal_diversity(single, 2);
  const double dj = eval::internal_diversity(disjoint, 1);
  const bool pass = auc_exact == 50 && rmse_gap <= 1e-12 && s1 == 0.0 && s2 == 0.0 && dj == 0.5;
  return {pass, "roc_auc exact on " + std::to_string(auc_exact) + "/50 sets, rmse max gap " + util::format_double(rmse_gap) +
                    ", IntDiv singleton " + util::format_double(s1) + "/" + util::format_double(s2) + ", disjoint pair p=1 " +
                    util::format_double(dj)};
}

struct ProbeComparison {
  bool trained_wins = true;
  std::string detail;
};

ProbeComparison compare_probes(const Trained& t, const std::vector<std::string>& smiles) {
  const auto trained = eval::featurize(*t.model, t.vocab, smiles);
  const auto random = eval::featurize(*t.initial, t.vocab, smiles);
  if (trained.records != random.records) return {false, " feature rows differ between models"};
  Eigen::MatrixXd y(static_cast<Eigen::Index>(trained.records.size()), 1);
  for (std::size_t r = 0; r < trained.records.size(); ++r) {
    y(static_cast<Eigen::Index>(r), 0) = chem::heavy_atom_count(chem::parse_smiles(smiles[trained.records[r]]));
  }
  ProbeComparison c;
  c.detail = " n=" + std::to_string(trained.records.size());
  for (std::uint64_t seed : {0, 1, 2}) {
    const auto folds = eval::split(trained.records.size(), {0.8, 0.1, 0.1}, seed);
    const auto a = eval::evaluate_property(trained.x, y, eval::TaskType::Regression, folds);
    const auto b = eval::evaluate_property(random.x, y, eval::TaskType::Regression, folds);
    c.trained_wins = c.trained_wins && a.test < b.test;
    c.detail += " seed " + std::to_string(seed) + " " + fmt(a.test) + "/" + fmt(b.test);
  }
  return c;
}

Outcome embedding_sanity(const Settings& s, const Trained& t) {
  if (!t.model) return {false, "no trained model"};
  // Labels are never seen in pretraining; the 6k set gives 600-molecule test folds.
  const auto main = compare_probes(t, t.train_smiles);
  const auto held_out = compare_probes(t, read_lines(s.corpus_dir + "/moses_test_1k.smi"));
  return {main.trained_wins, "heavy-atom count, test RMSE trained/random:" + main.detail +
                                 "; held-out 1k (not scored):" + held_out.detail};
}

int run_cli(const Settings& s, const std::string& args, const fs::path& log) {
  const std::string cmd = "'" + s.cli + "' -q " + args + " > '" + log.string() + "' 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::string text = util::read_file(e.path().string());
    if (e.path().filename() == "train_log.csv") {
      // The wall-clock column is excluded; every other byte must match.
      std::string stripped;
      std::stringstream ss(text);
      for (std::string line; std::getline(ss, line);) stripped += line.substr(0, line.rfind(',')) + "\n";
      text = stripped;
    }
    files[e.path().filename().string()] = text;
  }
  return files;
}

Outcome determinism(const Settings& s) {
  const fs::path work = fs::path(s.work_dir) / "determinism";
  const fs::path out = work / "run";
  const std::string corpus = s.corpus_dir + "/moses_train_6k.smi";
  const std::string common = "--seed 11 --threads 1 --out-dir '" + out.string() + "' ";
  std::vector<std::map<std::string, std::string>> runs;
  for (int pass = 0; pass < 2; ++pass) {
    fs::remove_all(out);
    fs::create_directories(work);
    const fs::path log = work / ("cli_" + std::to_string(pass) + ".log");
    const std::string steps[] = {
        common + "--set train.steps=100 train --corpus '" + corpus + "'",
        common + "generate -n 100 --checkpoint '" + (out / "checkpoint.bin").string() + "'",
        common + "eval-gen -k 100 --generated '" + (out / "generated.selfies").string() + "' --train-corpus '" + corpus + "'",
    };
    for (const auto& args : steps) {
      if (const int rc = run_cli(s, args, log); rc != 0) {
        return {false, "pipeline step exited " + std::to_string(rc) + ": " + args};
      }
    }
    runs.push_back(snapshot(out));
  }
  std::vector<std::string> differing;
  for (const auto& [name, text] : runs[0]) {
    auto it = runs[1].find(name);
    if (it == runs[1].end() || it->second != text) differing.push_back(name);
  }
  if (runs[0].size() != runs[1].size()) differing.push_back("(file set)");
  std::string names;
  for (const auto& [name, text] : runs[0]) names += (names.empty() ? "" : " ") + name;
  return {differing.empty() && runs[0].count("eval_gen.json") == 1,
          std::to_string(runs[0].size()) + " output files compared (" + names + ")" +
              (differing.empty() ? ", all byte-identical" : ", differing: " + differing.front())};
}

}  // namespace

int main(int argc, char** argv) {
  Settings s;
  CLI::App app{"molseq acceptance checks"};
  app.add_option("--corpus-dir", s.corpus_dir, "directory with the SMILES corpora");
  app.add_option("--test-data", s.test_data, "directory with the reference fixtures");
  app.add_option("--cli", s.cli, "path of the molseq command-line tool");
  app.add_option("--work-dir", s.work_dir, "scratch directory");
  app.add_option("--train-minutes", s.train_minutes, "wall-clock budget for the training check");
  app.add_option("--train-steps", s.train_steps, "optimizer steps for the training check");
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& check) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  };

  const auto vocab = corpus_vocab(s);
  Trained trained;
  report(1, "selfies totality", [&] { return selfies_totality(); });
  report(2, "grammar round-trip", [&] { return grammar_round_trip(s); });
  report(3, "reference-oracle agreement", [&] { return reference_agreement(s); });
  report(4, "gradient correctness", [&] { return gradient_check(s, vocab); });
  report(5, "loss floor", [&] { return loss_floor(s, vocab); });
  report(6, "training efficacy", [&] { return training_efficacy(s, trained); });
  report(7, "generation metrics", [&] { return generation(trained); });
  report(8, "metric oracles", [&] { return metric_oracles(); });
  report(9, "embedding sanity", [&] { return embedding_sanity(s, trained); });
  report(10, "pipeline determinism", [&] { return determinism(s); });
  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
