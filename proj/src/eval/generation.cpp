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

#include "molseq/eval/generation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "molseq/chem/smiles.hpp"
#include "parallel.hpp"
#include "molseq/error.hpp"
#include "molseq/random.hpp"
#include "molseq/selfies/selfies.hpp"

namespace molseq::eval {

std::string canonical_from_selfies(std::string_view selfies) {
  return chem::canonicalize(selfies::decode(selfies::split_selfies(selfies))).text;
}

template <class T>
GeneratedSet generate_set(const nn::Model<T>& model, const tokenizer::Vocabulary& vocab, const GenerateOptions& options,
                          std::string checkpoint_id) {
  if (options.n < 1) throw domain_error("number of samples must be >= 1");
  if (vocab.size() != model.config().vocab_size) throw domain_error("vocabulary size does not match the model");
  GeneratedSet set;
  set.seed = options.seed;
  set.checkpoint_id = std::move(checkpoint_id);
  set.selfies.resize(options.n);
  set.canonical.resize(options.n);
  parallel_blocks(static_cast<std::size_t>(options.n), options.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      std::mt19937_64 rng(derive_seed(options.seed, {i}));
      const int masks = options.lengths.draw(rng);
      auto ids = nn::sample(model, rng, options.max_len, options.temperature, masks);
      auto tokens = tokenizer::decode_ids(ids, vocab);
      set.selfies[i] = selfies::join_selfies(tokens);
      set.canonical[i] = chem::canonicalize(selfies::decode(tokens)).text;
    }
  });
  return set;
}

Ratio validity(const GeneratedSet& set) {
  if (set.canonical.empty()) throw domain_error("validity of an empty generated set");
  Ratio r;
  r.denominator = set.canonical.size();
  r.numerator = static_cast<std::size_t>(std::count_if(set.canonical.begin(), set.canonical.end(), [](const auto& s) { return !s.empty(); }));
  r.value = static_cast<double>(r.numerator) / static_cast<double>(r.denominator);
  return r;
}

Ratio unique_at(const GeneratedSet& set, std::size_t k) {
  if (k < 1) throw domain_error("unique@k needs k >= 1");
  std::unordered_set<std::string> seen;
  std::size_t taken = 0;
  for (const auto& c : set.canonical) {
    if (taken == k) break;
    if (c.empty()) continue;
    ++taken;
    seen.insert(c);
  }
  if (taken == 0) throw domain_error("unique@k: no valid molecules");
  return {static_cast<double>(seen.size()) / static_cast<double>(taken), seen.size(), taken};
}

std::vector<std::string> distinct_valid(const GeneratedSet& set) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& c : set.canonical) {
    if (!c.empty() && seen.insert(c).second) out.push_back(c);
  }
  return out;
}

Ratio novelty(const GeneratedSet& set, const std::unordered_set<std::string>& training) {
  if (training.empty()) throw domain_error("novelty: training index is empty");
  const auto distinct = distinct_valid(set);
  if (distinct.empty()) throw domain_error("novelty: no valid molecules");
  const auto novel = static_cast<std::size_t>(std::count_if(distinct.begin(), distinct.end(), [&](const auto& s) { return !training.contains(s); }));
  return {static_cast<double>(novel) / static_cast<double>(distinct.size()), novel, distinct.size()};
}

double internal_diversity(std::span<const chem::Fingerprint> fps, int p, int threads) {
  if (fps.empty()) throw domain_error("internal diversity of an empty set");
  if (p != 1 && p != 2) throw domain_error("internal diversity order must be 1 or 2");
  const std::size_t n = fps.size();
  std::vector<double> row_sums(n, 0.0);
  parallel_blocks(n, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < n; ++j) {
        const double t = chem::tanimoto(fps[i], fps[j]);
        s += p == 1 ? t : t * t;
      }
      row_sums[i] = s;
    }
  });
  double total = 0;
  for (double s : row_sums) total += s;
  const double mean = total / (static_cast<double>(n) * static_cast<double>(n));
  return 1.0 - (p == 1 ? mean : std::sqrt(mean));
}

std::unordered_set<std::string> canonical_index(std::span<const std::string> smiles, std::size_t* skipped) {
  std::unordered_set<std::string> out;
  std::size_t bad = 0;
  for (const auto& s : smiles) {
    try {
      out.insert(chem::canonicalize(chem::parse_smiles(s)).text);
    } catch (const Error&) {
      ++bad;
    }
  }
  if (skipped) *skipped = bad;
  return out;
}

GenerationReport evaluate_generation(const GeneratedSet& set, const std::unordered_set<std::string>& training,
                                     const ReportOptions& options) {
  GenerationReport r;
  r.n = set.size();
  r.k = options.k;
  r.fp_radius = options.fp_radius;
  r.fp_width = options.fp_width;
  r.seed = set.seed;
  r.checkpoint_id = set.checkpoint_id;
  r.validity = validity(set);
  r.unique = unique_at(set, options.k);
  r.novelty = novelty(set, training);
  const auto distinct = distinct_valid(set);
  r.distinct_valid = distinct.size();
  std::vector<chem::Fingerprint> fps(distinct.size());
  parallel_blocks(distinct.size(), options.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) fps[i] = chem::fingerprint(chem::parse_smiles(distinct[i]), options.fp_radius, options.fp_width);
  });
  r.intdiv1 = internal_diversity(fps, 1, options.threads);
  r.intdiv2 = internal_diversity(fps, 2, options.threads);
  return r;
}

std::string report_json(const GenerationReport& r) {
  auto ratio = [](const Ratio& x) {
    return nlohmann::ordered_json{{"value", x.value}, {"numerator", x.numerator}, {"denominator", x.denominator}};
  };
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["validity"] = ratio(r.validity);
  j["unique_at_k"] = ratio(r.unique);
  j["k"] = r.k;
  j["novelty"] = ratio(r.novelty);
  j["intdiv1"] = r.intdiv1;
  j["intdiv2"] = r.intdiv2;
  j["distinct_valid"] = r.distinct_valid;
  j["fingerprint"] = {{"radius", r.fp_radius}, {"width", r.fp_width}};
  j["seed"] = r.seed;
  j["checkpoint"] = r.checkpoint_id;
  return j.dump(2) + "\n";
}

std::string report_table(const GenerationReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "metric         value    count\n"
                "validity       %.4f   %zu/%zu\n"
                "unique@%-7zu %.4f   %zu/%zu\n"
                "novelty        %.4f   %zu/%zu\n"
                "IntDiv1        %.4f\n"
                "IntDiv2        %.4f\n",
                r.validity.value, r.validity.numerator, r.validity.denominator, r.k, r.unique.value, r.unique.numerator,
                r.unique.denominator, r.novelty.value, r.novelty.numerator, r.novelty.denominator, r.intdiv1, r.intdiv2);
  return buf;
}

template GeneratedSet generate_set<float>(const nn::Model<float>&, const tokenizer::Vocabulary&, const GenerateOptions&, std::string);
template GeneratedSet generate_set<double>(const nn::Model<double>&, const tokenizer::Vocabulary&, const GenerateOptions&, std::string);

}  // namespace molseq::eval
