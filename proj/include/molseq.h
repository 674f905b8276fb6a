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

#ifndef MOLSEQ_H
#define MOLSEQ_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(MOLSEQ_BUILDING_LIBRARY)
#define MOLSEQ_API __declspec(dllexport)
#else
#define MOLSEQ_API __declspec(dllimport)
#endif
#else
#define MOLSEQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes; 1..3 double as CLI exit codes. */
typedef enum molseq_status {
  MOLSEQ_OK = 0,
  MOLSEQ_ERR_DOMAIN = 1,   /* invalid molecule, rejected input, numeric failure */
  MOLSEQ_ERR_IO = 2,       /* file could not be read or written */
  MOLSEQ_ERR_CONFIG = 3,   /* unknown or malformed setting */
  MOLSEQ_ERR_ARGUMENT = 4, /* null pointer or out-of-range argument */
  MOLSEQ_ERR_INTERNAL = 5  /* allocation failure or unexpected exception */
} molseq_status;

typedef enum molseq_log_level {
  MOLSEQ_LOG_INFO = 0,
  MOLSEQ_LOG_WARNING = 1,
  MOLSEQ_LOG_OUTPUT = 2 /* primary result text, meant for stdout */
} molseq_log_level;

typedef void (*molseq_log_fn)(molseq_log_level level, const char* message, void* user);

typedef struct molseq_config molseq_config;
typedef struct molseq_model molseq_model;

/* Library version, e.g. "0.1.0". */
MOLSEQ_API const char* molseq_version(void);

/* Message of the last failed call on this thread; "" if none. */
MOLSEQ_API const char* molseq_last_error(void);

/* Releases a string returned through a char** out-parameter. */
MOLSEQ_API void molseq_free_string(char* s);

/* ---- notation ---------------------------------------------------------- */

MOLSEQ_API molseq_status molseq_smiles_to_selfies(const char* smiles, char** selfies);
/* Canonical SMILES of the molecule a SELFIES string derives ("" if empty). */
MOLSEQ_API molseq_status molseq_selfies_to_smiles(const char* selfies, char** smiles);
MOLSEQ_API molseq_status molseq_canonical_smiles(const char* smiles, char** canonical);

/* ---- run configuration ------------------------------------------------- */

MOLSEQ_API molseq_status molseq_config_create(molseq_config** config);
MOLSEQ_API void molseq_config_destroy(molseq_config* config);
/* Merges a key=value file; later merges and sets override earlier ones. */
MOLSEQ_API molseq_status molseq_config_load(molseq_config* config, const char* path);
MOLSEQ_API molseq_status molseq_config_set(molseq_config* config, const char* key, const char* value);
MOLSEQ_API molseq_status molseq_config_get(const molseq_config* config, const char* key, char** value);
/* Fully resolved configuration as key=value text. */
MOLSEQ_API molseq_status molseq_config_dump(const molseq_config* config, char** text);

/* ---- pipeline commands --------------------------------------------------
 * Each writes <out_dir>/<command>.config and its outputs. log may be NULL. */

MOLSEQ_API molseq_status molseq_run_convert(const molseq_config* config, molseq_log_fn log, void* user);
MOLSEQ_API molseq_status molseq_run_train(const molseq_config* config, molseq_log_fn log, void* user);
MOLSEQ_API molseq_status molseq_run_generate(const molseq_config* config, molseq_log_fn log, void* user);
MOLSEQ_API molseq_status molseq_run_eval_gen(const molseq_config* config, molseq_log_fn log, void* user);
MOLSEQ_API molseq_status molseq_run_embed(const molseq_config* config, molseq_log_fn log, void* user);
MOLSEQ_API molseq_status molseq_run_eval_prop(const molseq_config* config, molseq_log_fn log, void* user);

/* ---- trained models ---------------------------------------------------- */

/* Loads a checkpoint; use_f64 selects 64-bit arithmetic. */
MOLSEQ_API molseq_status molseq_model_load(const char* checkpoint_path, int use_f64, molseq_model** model);
MOLSEQ_API void molseq_model_free(molseq_model* model);
MOLSEQ_API size_t molseq_model_dim(const molseq_model* model);
/* Mean-pooled encoder embedding of a SMILES string; out holds molseq_model_dim values. */
MOLSEQ_API molseq_status molseq_model_embed(const molseq_model* model, const char* smiles, double* out, size_t out_len);
/* One sample as SELFIES text, identical to entry `index` of the generate command with `seed`. */
MOLSEQ_API molseq_status molseq_model_sample(const molseq_model* model, uint64_t seed, uint64_t index, double temperature,
                                             int max_len, char** selfies);

#ifdef __cplusplus
}
#endif

#endif /* MOLSEQ_H */
