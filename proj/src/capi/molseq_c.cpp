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

#include "molseq.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <variant>

#include "molseq/app/pipeline.hpp"
#include "molseq/chem/canonical.hpp"
#include "molseq/chem/smiles.hpp"
#include "molseq/error.hpp"
#include "molseq/eval/generation.hpp"
#include "molseq/nn/checkpoint.hpp"
#include "molseq/nn/trainer.hpp"
#include "molseq/random.hpp"
#include "molseq/selfies/selfies.hpp"
#include "molseq/tokenizer/vocab.hpp"

struct molseq_config {
  molseq::app::RunConfig config;
};

struct molseq_model {
  std::variant<molseq::nn::Model<float>, molseq::nn::Model<double>> model;
  molseq::tokenizer::Vocabulary vocab;
  molseq::nn::LengthPrior lengths;
};

namespace {

thread_local std::string last_error;

molseq_status fail(molseq_status s, const char* what) {
  last_error = what;
  return s;
}

template <class F>
molseq_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return MOLSEQ_OK;
  } catch (const molseq::Error& e) {
    return fail(static_cast<molseq_status>(static_cast<int>(e.kind())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(MOLSEQ_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MOLSEQ_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(MOLSEQ_ERR_INTERNAL, "unknown exception");
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

molseq::app::Logger make_logger(molseq_log_fn fn, void* user) {
  return [fn, user](molseq::app::LogLevel level, std::string_view msg) {
    if (fn) fn(static_cast<molseq_log_level>(static_cast<int>(level)), std::string(msg).c_str(), user);
  };
}

using RunFn = molseq::app::RunSummary (*)(const molseq::app::RunConfig&, const molseq::app::Logger&);

molseq_status run(RunFn fn, const molseq_config* config, molseq_log_fn log, void* user) {
  if (!config) return fail(MOLSEQ_ERR_ARGUMENT, "null config");
  return guarded([&] { fn(config->config, make_logger(log, user)); });
}

}  // namespace

extern "C" {

const char* molseq_version(void) {
  return MOLSEQ_VERSION;
}

const char* molseq_last_error(void) {
  return last_error.c_str();
}

void molseq_free_string(char* s) {
  std::free(s);
}

molseq_status molseq_smiles_to_selfies(const char* smiles, char** selfies) {
  if (!smiles || !selfies) return fail(MOLSEQ_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *selfies = dup_string(molseq::selfies::join_selfies(molseq::selfies::encode(molseq::chem::parse_smiles(smiles))));
  });
}

molseq_status molseq_selfies_to_smiles(const char* selfies, char** smiles) {
  if (!selfies || !smiles) return fail(MOLSEQ_ERR_ARGUMENT, "null argument");
  return guarded([&] { *smiles = dup_string(molseq::eval::canonical_from_selfies(selfies)); });
}

molseq_status molseq_canonical_smiles(const char* smiles, char** canonical) {
  if (!smiles || !canonical) return fail(MOLSEQ_ERR_ARGUMENT, "null argument");
  return guarded([&] { *canonical = dup_string(molseq::chem::canonicalize(molseq::chem::parse_smiles(smiles)).text); });
}

molseq_status molseq_config_create(molseq_config** config) {
  if (!config) return fail(MOLSEQ_ERR_ARGUMENT, "null argument");
  return guarded([&] { *config = new molseq_config(); });
}

void molseq_config_destroy(molseq_config* config) {
  delete config;
}

molseq_status molseq_config_load(molseq_config* config, const char* path) {
  if (!config || !path) return fail(MOLSEQ_ERR_ARGUMENT, "null argument");
  return guarded([&] { config->config.merge_file(path); });
}

molseq_status molseq_config_set(molseq_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return fail(MOLSEQ_ERR_ARGUMENT, "null argument");
  return guarded([&] { config->config.set(key, value); });
}

molseq_status molseq_config_get(const molseq_config* config, const char* key, char** value) {
  if (!config || !key || !value) return fail(MOLSEQ_ERR_ARGUMENT, "null argument");
  return guarded([&] { *value = dup_string(config->config.get(key)); });
}

molseq_status molseq_config_dump(const molseq_config* config, char** text) {
  if (!config || !text) return fail(MOLSEQ_ERR_ARGUMENT, "null argument");
  return guarded([&] { *text = dup_string(config->config.serialize()); });
}

molseq_status molseq_run_convert(const molseq_config* config, molseq_log_fn log, void* user) {
  return run(&molseq::app::run_convert, config, log, user);
}

molseq_status molseq_run_train(const molseq_config* config, molseq_log_fn log, void* user) {
  return run(&molseq::app::run_train, config, log, user);
}

molseq_status molseq_run_generate(const molseq_config* config, molseq_log_fn log, void* user) {
  return run(&molseq::app::run_generate, config, log, user);
}

molseq_status molseq_run_eval_gen(const molseq_config* config, molseq_log_fn log, void* user) {
  return run(&molseq::app::run_eval_gen, config, log, user);
}

molseq_status molseq_run_embed(const molseq_config* config, molseq_log_fn log, void* user) {
  return run(&molseq::app::run_embed, config, log, user);
}

molseq_status molseq_run_eval_prop(const molseq_config* config, molseq_log_fn log, void* user) {
  return run(&molseq::app::run_eval_prop, config, log, user);
}

molseq_status molseq_model_load(const char* checkpoint_path, int use_f64, molseq_model** model) {
  if (!checkpoint_path || !model) return fail(MOLSEQ_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const auto ck = molseq::nn::load_checkpoint(checkpoint_path);
    auto vocab = molseq::nn::vocab_from_checkpoint(ck);
    auto lengths = molseq::nn::length_prior_from_checkpoint(ck);
    if (use_f64) {
      *model = new molseq_model{molseq::nn::model_from_checkpoint<double>(ck), std::move(vocab), std::move(lengths)};
    } else {
      *model = new molseq_model{molseq::nn::model_from_checkpoint<float>(ck), std::move(vocab), std::move(lengths)};
    }
  });
}

void molseq_model_free(molseq_model* model) {
  delete model;
}

size_t molseq_model_dim(const molseq_model* model) {
  if (!model) return 0;
  return std::visit([](const auto& m) { return static_cast<size_t>(m.config().d_model); }, model->model);
}

molseq_status molseq_model_embed(const molseq_model* model, const char* smiles, double* out, size_t out_len) {
  if (!model || !smiles || !out) return fail(MOLSEQ_ERR_ARGUMENT, "null argument");
  if (out_len < molseq_model_dim(model)) return fail(MOLSEQ_ERR_ARGUMENT, "output buffer shorter than the model dimension");
  return guarded([&] {
    const auto ids = molseq::tokenizer::encode_ids(molseq::selfies::encode(molseq::chem::parse_smiles(smiles)), model->vocab);
    std::visit(
        [&](const auto& m) {
          if (static_cast<int>(ids.size()) > m.config().max_len) throw molseq::domain_error("sequence exceeds model.max_len");
          const auto v = m.embed(ids);
          for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = static_cast<double>(v[i]);
        },
        model->model);
  });
}

molseq_status molseq_model_sample(const molseq_model* model, uint64_t seed, uint64_t index, double temperature, int max_len,
                                  char** selfies) {
  if (!model || !selfies) return fail(MOLSEQ_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    std::mt19937_64 rng(molseq::derive_seed(seed, {index}));
    const int masks = model->lengths.draw(rng);
    const auto ids =
        std::visit([&](const auto& m) { return molseq::nn::sample(m, rng, max_len, temperature, masks); }, model->model);
    *selfies = dup_string(molseq::selfies::join_selfies(molseq::tokenizer::decode_ids(ids, model->vocab)));
  });
}

}  // extern "C"
