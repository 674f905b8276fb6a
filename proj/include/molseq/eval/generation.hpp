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
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "molseq/chem/canonical.hpp"
#include "molseq/chem/fingerprint.hpp"
#include "molseq/nn/model.hpp"
#include "molseq/tokenizer/vocab.hpp"

namespace molseq::eval {

//! Samples in emission order; an empty canonical string marks an invalid (empty) generation.
struct GeneratedSet {
  std::vector<std::string> selfies;
  std::vector<std::string> canonical;
  std::uint64_t seed = 0;
  std::string checkpoint_id;

  std::size_t size() const noexcept { return selfies.size(); }
};

struct GenerateOptions {
  int n = 10000;
  std::uint64_t seed = 0;
  double temperature = 1.0;
  int max_len = 128;
  int threads = 1;
  //! Encoder <mask> counts are drawn from it; empty means none.
  nn::LengthPrior lengths;
};

/// Draws options.n samples. Sample i uses its own stream derived from
/// (seed, i), first for its encoder length and then for its tokens, so the
/// result does not depend on the thread count.
template <class T>
GeneratedSet generate_set(const nn::Model<T>& model, const tokenizer::Vocabulary& vocab, const GenerateOptions& options,
                          std::string checkpoint_id);

//! Canonical SMILES of a SELFIES string; empty when it decodes to nothing.
std::string canonical_from_selfies(std::string_view selfies);

struct Ratio {
  double value = 0;
  std::size_t numerator = 0;
  std::size_t denominator = 0;
};

//! Non-empty decodes / n. Throws domain_error on an empty set.
Ratio validity(const GeneratedSet& set);
//! Distinct among the first min(k, valid) valid molecules. Throws when none are valid or k < 1.
Ratio unique_at(const GeneratedSet& set, std::size_t k);
//! Distinct valid molecules absent from `training`. Throws on an empty index or no valid molecules.
Ratio novelty(const GeneratedSet& set, const std::unordered_set<std::string>& training);

//! Distinct valid canonical SMILES in order of first appearance.
std::vector<std::string> distinct_valid(const GeneratedSet& set);

/// 1 - (mean over all ordered pairs, self-pairs included, of T^p)^(1/p).
/// Rows are split into blocks across threads; each row sum is reduced in
/// index order, so the value is independent of the thread count.
double internal_diversity(std::span<const chem::Fingerprint> fps, int p, int threads = 1);

//! Canonical index of a SMILES corpus; unparseable lines are counted in `skipped`.
std::unordered_set<std::string> canonical_index(std::span<const std::string> smiles, std::size_t* skipped = nullptr);

struct GenerationReport {
  Ratio validity;
  Ratio unique;
  std::size_t k = 0;
  Ratio novelty;
  double intdiv1 = 0;
  double intdiv2 = 0;
  std::size_t n = 0;
  std::size_t distinct_valid = 0;
  int fp_radius = chem::kDefaultFingerprintRadius;
  int fp_width = chem::kDefaultFingerprintWidth;
  std::uint64_t seed = 0;
  std::string checkpoint_id;
};

struct ReportOptions {
  std::size_t k = 10000;
  int fp_radius = chem::kDefaultFingerprintRadius;
  int fp_width = chem::kDefaultFingerprintWidth;
  int threads = 1;
};

GenerationReport evaluate_generation(const GeneratedSet& set, const std::unordered_set<std::string>& training,
                                     const ReportOptions& options);

std::string report_json(const GenerationReport& r);
std::string report_table(const GenerationReport& r);

}  // namespace molseq::eval
