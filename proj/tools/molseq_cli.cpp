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

#include <cstdio>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "molseq.h"

namespace {

struct Options {
  std::string config_path;
  std::vector<std::string> sets;
  std::vector<std::pair<std::string, std::string>> flags;
  bool quiet = false;
};

int exit_code(molseq_status s) {
  switch (s) {
    case MOLSEQ_OK:
      return 0;
    case MOLSEQ_ERR_IO:
      return 2;
    case MOLSEQ_ERR_CONFIG:
      return 3;
    default:
      return 1;
  }
}

void on_log(molseq_log_level level, const char* message, void* user) {
  const bool quiet = *static_cast<bool*>(user);
  if (level == MOLSEQ_LOG_OUTPUT) {
    std::fputs(message, stdout);
    std::fflush(stdout);
  } else if (!quiet || level == MOLSEQ_LOG_WARNING) {
    std::fprintf(stderr, "%s%s\n", level == MOLSEQ_LOG_WARNING ? "warning: " : "", message);
  }
}

class Config {
 public:
  Config() {
    if (molseq_config_create(&handle_) != MOLSEQ_OK) handle_ = nullptr;
  }
  ~Config() { molseq_config_destroy(handle_); }
  Config(const Config&) = delete;
  Config& operator=(const Config&) = delete;

  molseq_config* get() const { return handle_; }

 private:
  molseq_config* handle_ = nullptr;
};

molseq_status resolve(const Options& opt, molseq_config* cfg) {
  if (!cfg) return MOLSEQ_ERR_INTERNAL;
  molseq_status s = MOLSEQ_OK;
  if (!opt.config_path.empty()) s = molseq_config_load(cfg, opt.config_path.c_str());
  for (const auto& kv : opt.sets) {
    if (s != MOLSEQ_OK) return s;
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects KEY=VALUE, got '%s'\n", kv.c_str());
      return MOLSEQ_ERR_CONFIG;
    }
    s = molseq_config_set(cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
  }
  for (const auto& [k, v] : opt.flags) {
    if (s != MOLSEQ_OK) return s;
    s = molseq_config_set(cfg, k.c_str(), v.c_str());
  }
  return s;
}

using RunFn = molseq_status (*)(const molseq_config*, molseq_log_fn, void*);

int execute(Options& opt, RunFn run) {
  Config cfg;
  molseq_status s = resolve(opt, cfg.get());
  if (s == MOLSEQ_OK) s = run(cfg.get(), &on_log, &opt.quiet);
  if (s != MOLSEQ_OK) {
    const char* msg = molseq_last_error();
    if (*msg) std::fprintf(stderr, "error: %s\n", msg);
  }
  return exit_code(s);
}

// Registers an option that, when given, overrides a configuration key.
template <class T>
CLI::Option* keyed(CLI::App* app, Options& opt, const std::string& name, const std::string& key, const std::string& help) {
  return app->add_option_function<T>(
      name,
      [&opt, key](const T& v) {
        if constexpr (std::is_same_v<T, std::string>) {
          opt.flags.emplace_back(key, v);
        } else {
          opt.flags.emplace_back(key, std::to_string(v));
        }
      },
      help);
}

CLI::Option* keyed_flag(CLI::App* app, Options& opt, const std::string& name, const std::string& key, const std::string& value,
                        const std::string& help) {
  return app->add_flag_callback(name, [&opt, key, value] { opt.flags.emplace_back(key, value); }, help);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Molecular string modelling toolkit: SELFIES conversion, denoising pretraining, generation and evaluation"};
  app.set_version_flag("--version", molseq_version());
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--config", opt.config_path, "key=value configuration file")->check(CLI::ExistingFile);
  app.add_option("--set", opt.sets, "override one configuration key (KEY=VALUE, repeatable)");
  keyed<std::string>(&app, opt, "--seed", "seed", "random seed");
  keyed<std::string>(&app, opt, "--out-dir", "out_dir", "output directory");
  keyed<std::string>(&app, opt, "--threads", "threads", "worker threads");
  keyed_flag(&app, opt, "--lenient", "lenient", "true", "accept rejected input lines with exit status 0");
  keyed_flag(&app, opt, "--f64", "f64", "true", "use 64-bit arithmetic in the model");
  app.add_flag("--quiet,-q", opt.quiet, "only print warnings and results");

  RunFn run = nullptr;

  auto* convert = app.add_subcommand("convert", "convert between SMILES and SELFIES, one molecule per line");
  keyed<std::string>(convert, opt, "input", "convert.input", "input file")->required();
  keyed<std::string>(convert, opt, "output", "convert.output", "output file");
  keyed_flag(convert, opt, "--to-smiles", "convert.direction", "selfies-to-smiles", "read SELFIES and write canonical SMILES");
  convert->callback([&] { run = &molseq_run_convert; });

  auto* train = app.add_subcommand("train", "build the vocabulary and pretrain the denoising model");
  keyed<std::string>(train, opt, "--corpus", "train.corpus", "SMILES training corpus");
  keyed<std::string>(train, opt, "--eval-corpus", "train.eval_corpus", "held-out SMILES for loss/accuracy tracking");
  keyed<std::string>(train, opt, "--steps", "train.steps", "optimizer steps");
  keyed<std::string>(train, opt, "--resume", "train.resume", "checkpoint to resume from");
  keyed<std::string>(train, opt, "--max-minutes", "train.max_minutes", "wall-clock limit (0: none)");
  train->callback([&] { run = &molseq_run_train; });

  auto* generate = app.add_subcommand("generate", "sample molecules from a trained checkpoint");
  keyed<std::string>(generate, opt, "--checkpoint", "generate.checkpoint", "checkpoint file");
  keyed<std::string>(generate, opt, "-n", "generate.n", "number of samples");
  keyed<std::string>(generate, opt, "--temperature", "generate.temperature", "sampling temperature");
  keyed<std::string>(generate, opt, "--max-len", "generate.max_len", "maximum sequence length");
  keyed<std::string>(generate, opt, "--out", "generate.output", "SELFIES output file");
  generate->callback([&] { run = &molseq_run_generate; });

  auto* eval_gen = app.add_subcommand("eval-gen", "validity, uniqueness, novelty and internal diversity of generated molecules");
  keyed<std::string>(eval_gen, opt, "--generated", "eval_gen.generated", "SELFIES file written by generate");
  keyed<std::string>(eval_gen, opt, "--train-corpus", "eval_gen.train_corpus", "SMILES corpus for novelty");
  keyed<std::string>(eval_gen, opt, "-k", "eval_gen.k", "window for unique@k");
  keyed<std::string>(eval_gen, opt, "--fp-radius", "eval_gen.fp_radius", "fingerprint radius");
  keyed<std::string>(eval_gen, opt, "--fp-width", "eval_gen.fp_width", "fingerprint width in bits");
  eval_gen->callback([&] { run = &molseq_run_eval_gen; });

  auto* embed = app.add_subcommand("embed", "write mean-pooled encoder embeddings as CSV");
  keyed<std::string>(embed, opt, "--checkpoint", "embed.checkpoint", "checkpoint file");
  keyed<std::string>(embed, opt, "--input", "embed.input", "SMILES file");
  keyed<std::string>(embed, opt, "--out", "embed.output", "CSV output file");
  embed->callback([&] { run = &molseq_run_embed; });

  auto* eval_prop = app.add_subcommand("eval-prop", "probe embeddings on a property dataset");
  keyed<std::string>(eval_prop, opt, "--checkpoint", "eval_prop.checkpoint", "checkpoint file");
  keyed<std::string>(eval_prop, opt, "--dataset", "eval_prop.dataset", "CSV dataset");
  keyed<std::string>(eval_prop, opt, "--manifest", "eval_prop.manifest", "task manifest");
  keyed<std::string>(eval_prop, opt, "--split-seeds", "eval_prop.split_seeds", "comma-separated split seeds");
  eval_prop->callback([&] { run = &molseq_run_eval_prop; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }
  return execute(opt, run);
}
