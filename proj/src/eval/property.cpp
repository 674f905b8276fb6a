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

#include "molseq/eval/property.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "molseq/chem/smiles.hpp"
#include "molseq/error.hpp"
#include "molseq/random.hpp"
#include "molseq/selfies/selfies.hpp"
#include "molseq/util/format.hpp"
#include "parallel.hpp"

namespace molseq::eval {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i <= s.size()) {
    auto j = s.find(',', i);
    if (j == std::string_view::npos) j = s.size();
    auto item = s.substr(i, j - i);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.emplace_back(item);
    i = j + 1;
  }
  return out;
}

// One CSV record; double quotes group fields and "" escapes a quote.
std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

bool is_missing(std::string_view s) {
  return s.empty() || s == "nan" || s == "NaN" || s == "NA";
}

double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

struct FitResult {
  Eigen::VectorXd w;
  double b = 0;
  int iterations = 0;
};

// Accelerated gradient descent with gradient-based restart on one output.
FitResult fit_output(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, TaskType task, const ProbeOptions& opt) {
  const Eigen::Index m = x.rows(), d = x.cols();
  const double inv_m = 1.0 / static_cast<double>(m);
  auto gradient = [&](const Eigen::VectorXd& w, double b, Eigen::VectorXd& gw, double& gb) {
    Eigen::VectorXd z = (x * w).array() + b;
    if (task == TaskType::Classification) z = z.unaryExpr([](double v) { return sigmoid(v); });
    const Eigen::VectorXd r = z - y;
    gw = x.transpose() * r * inv_m + opt.lambda * w;
    gb = r.sum() * inv_m;
  };
  // Lipschitz constant of the gradient: curvature of the loss times the top
  // eigenvalue of the augmented Gram matrix, plus the ridge term.
  Eigen::MatrixXd gram(d + 1, d + 1);
  gram.topLeftCorner(d, d) = x.transpose() * x * inv_m;
  gram.topRightCorner(d, 1) = x.colwise().sum().transpose() * inv_m;
  gram.bottomLeftCorner(1, d) = gram.topRightCorner(d, 1).transpose();
  gram(d, d) = 1.0;
  const double top = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  const double lipschitz = (task == TaskType::Classification ? 0.25 : 1.0) * top + opt.lambda;
  const double step = 1.0 / lipschitz;

  FitResult r;
  r.w = Eigen::VectorXd::Zero(d);
  if (task == TaskType::Regression) {
    r.b = y.mean();
  } else {
    const double p = std::clamp(y.mean(), 1e-6, 1 - 1e-6);
    r.b = std::log(p / (1 - p));
  }
  Eigen::VectorXd vw = r.w, gw;
  double vb = r.b, gb = 0, t = 1;
  for (r.iterations = 0; r.iterations < opt.max_iter; ++r.iterations) {
    gradient(r.w, r.b, gw, gb);
    if (std::sqrt(gw.squaredNorm() + gb * gb) < opt.tolerance) break;
    gradient(vw, vb, gw, gb);
    const Eigen::VectorXd w_next = vw - step * gw;
    const double b_next = vb - step * gb;
    // Restart momentum when it points uphill.
    if (gw.dot(w_next - r.w) + gb * (b_next - r.b) > 0) t = 1;
    const double t_next = (1 + std::sqrt(1 + 4 * t * t)) / 2;
    const double beta = (t - 1) / t_next;
    vw = w_next + beta * (w_next - r.w);
    vb = b_next + beta * (b_next - r.b);
    r.w = w_next;
    r.b = b_next;
    t = t_next;
  }
  return r;
}

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& m, const std::vector<std::size_t>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

// Mean metric over outputs; classification skips outputs lacking a class.
double score(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& y, TaskType task, std::vector<double>* per_label) {
  double total = 0;
  int counted = 0;
  for (Eigen::Index k = 0; k < y.cols(); ++k) {
    std::vector<double> p, v;
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      if (std::isnan(y(i, k))) continue;
      p.push_back(pred(i, k));
      v.push_back(y(i, k));
    }
    double s = kNaN;
    if (task == TaskType::Regression) {
      if (!v.empty()) s = rmse(p, v);
    } else {
      std::vector<int> labels(v.begin(), v.end());
      const bool both = std::count(labels.begin(), labels.end(), 1) > 0 && std::count(labels.begin(), labels.end(), 0) > 0;
      if (both) s = roc_auc(p, labels);
    }
    if (per_label) per_label->push_back(s);
    if (!std::isnan(s)) {
      total += s;
      ++counted;
    }
  }
  if (counted == 0) throw domain_error("no label in the fold can be scored");
  return total / counted;
}

}  // namespace

// ---------------------------------------------------------------------------
// Dataset

TaskManifest TaskManifest::parse(std::string_view text) {
  const auto kv = util::parse_key_values(text);
  TaskManifest m;
  for (const auto& [key, value] : kv) {
    if (key == "name") {
      m.name = value;
    } else if (key == "task") {
      if (value == "classification") m.task = TaskType::Classification;
      else if (value == "regression") m.task = TaskType::Regression;
      else throw config_error("task must be classification or regression, got '" + value + "'");
    } else if (key == "label_columns") {
      m.label_columns = split_list(value);
    } else if (key == "smiles_column") {
      m.smiles_column = value;
    } else {
      throw config_error("unknown manifest key " + key);
    }
  }
  if (!kv.contains("task")) throw config_error("manifest lacks 'task'");
  if (m.label_columns.empty()) throw config_error("manifest lacks 'label_columns'");
  if (m.name.empty()) m.name = m.label_columns.front();
  return m;
}

TaskManifest TaskManifest::load(const std::string& path) {
  return parse(util::read_file(path));
}

PropertyDataset parse_dataset(std::string_view csv, const TaskManifest& manifest) {
  std::vector<std::string_view> lines;
  std::size_t i = 0;
  while (i < csv.size()) {
    auto j = csv.find('\n', i);
    if (j == std::string_view::npos) j = csv.size();
    auto line = csv.substr(i, j - i);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    i = j + 1;
  }
  if (lines.empty()) throw domain_error("dataset is empty");
  const auto header = split_csv_line(lines[0]);
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw config_error("dataset lacks column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t smiles_col = column(manifest.smiles_column);
  std::vector<std::size_t> label_cols;
  for (const auto& c : manifest.label_columns) label_cols.push_back(column(c));

  PropertyDataset ds;
  ds.name = manifest.name;
  ds.task = manifest.task;
  ds.label_names = manifest.label_columns;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = split_csv_line(lines[r]);
    if (fields.size() != header.size()) {
      throw domain_error("dataset line " + std::to_string(r + 1) + " has " + std::to_string(fields.size()) + " fields, header has " +
                         std::to_string(header.size()));
    }
    std::vector<double> labels;
    bool any = false;
    for (std::size_t c : label_cols) {
      if (is_missing(fields[c])) {
        labels.push_back(kNaN);
        continue;
      }
      const double v = util::parse_double(manifest.label_columns[labels.size()], fields[c]);
      if (manifest.task == TaskType::Classification && v != 0.0 && v != 1.0) {
        throw domain_error("dataset line " + std::to_string(r + 1) + ": classification label must be 0 or 1");
      }
      labels.push_back(v);
      any = true;
    }
    bool parses = true;
    try {
      chem::parse_smiles(fields[smiles_col]);
    } catch (const Error&) {
      parses = false;
    }
    if (!parses || !any) {
      ++ds.dropped;
      continue;
    }
    ds.smiles.push_back(fields[smiles_col]);
    ds.labels.push_back(std::move(labels));
  }
  return ds;
}

PropertyDataset load_dataset(const std::string& path, const TaskManifest& manifest) {
  return parse_dataset(util::read_file(path), manifest);
}

// ---------------------------------------------------------------------------
// Split

std::vector<std::size_t> SplitAssignment::indices(Fold f) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < folds.size(); ++i) {
    if (folds[i] == f) out.push_back(i);
  }
  return out;
}

SplitAssignment split(std::size_t n, std::array<double, 3> ratios, std::uint64_t seed) {
  for (double r : ratios) {
    if (!(r > 0)) throw domain_error("split ratios must be positive");
  }
  if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) throw domain_error("split ratios must sum to 1");
  const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratios[0]));
  const auto n_valid = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratios[1]));
  if (n_train == 0 || n_valid == 0 || n_train + n_valid >= n) {
    throw domain_error("split of " + std::to_string(n) + " records leaves a fold empty");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(derive_seed(seed, {0x5B17}));
  std::shuffle(order.begin(), order.end(), rng);
  SplitAssignment s;
  s.seed = seed;
  s.ratios = ratios;
  s.folds.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.folds[order[i]] = i < n_train ? Fold::Train : i < n_train + n_valid ? Fold::Valid : Fold::Test;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Features

template <class T>
Features featurize(const nn::Model<T>& model, const tokenizer::Vocabulary& vocab, std::span<const std::string> smiles,
                   int threads) {
  const std::size_t n = smiles.size();
  std::vector<Eigen::RowVectorXd> rows(n);
  std::vector<char> ok(n, 0);
  parallel_blocks(n, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      try {
        auto ids = tokenizer::encode_ids(selfies::encode(chem::parse_smiles(smiles[i])), vocab);
        if (static_cast<int>(ids.size()) > model.config().max_len) continue;
        rows[i] = model.embed(ids).template cast<double>();
        ok[i] = 1;
      } catch (const Error&) {
      }
    }
  });
  Features f;
  for (std::size_t i = 0; i < n; ++i) {
    if (ok[i]) f.records.push_back(i);
  }
  f.dropped = n - f.records.size();
  f.x.resize(static_cast<Eigen::Index>(f.records.size()), model.config().d_model);
  for (std::size_t r = 0; r < f.records.size(); ++r) f.x.row(static_cast<Eigen::Index>(r)) = rows[f.records[r]];
  return f;
}

// ---------------------------------------------------------------------------
// Probe

Eigen::MatrixXd Probe::predict(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd xs = (x.rowwise() - mean).array().rowwise() / scale.array();
  Eigen::MatrixXd z = (xs * weights).rowwise() + bias;
  if (task == TaskType::Classification) z = z.unaryExpr([](double v) { return sigmoid(v); });
  return z;
}

Eigen::MatrixXd Probe::raw_weights() const {
  return weights.array().colwise() / scale.transpose().array();
}

Eigen::RowVectorXd Probe::raw_bias() const {
  return bias - (mean.array() / scale.array()).matrix() * weights;
}

Probe train_probe(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, TaskType task, const ProbeOptions& options) {
  if (x.rows() == 0 || x.rows() != y.rows()) throw domain_error("probe needs matching, non-empty features and labels");
  if (!(options.lambda >= 0)) throw domain_error("probe lambda must be >= 0");
  Probe p;
  p.task = task;
  p.lambda = options.lambda;
  p.mean = x.colwise().mean();
  p.scale = ((x.rowwise() - p.mean).array().square().colwise().mean()).sqrt();
  for (Eigen::Index j = 0; j < p.scale.size(); ++j) {
    if (!(p.scale[j] > 1e-12)) p.scale[j] = 1.0;
  }
  const Eigen::MatrixXd xs = (x.rowwise() - p.mean).array().rowwise() / p.scale.array();
  p.weights.resize(x.cols(), y.cols());
  p.bias.resize(y.cols());
  for (Eigen::Index k = 0; k < y.cols(); ++k) {
    std::vector<std::size_t> rows;
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      if (!std::isnan(y(i, k))) rows.push_back(static_cast<std::size_t>(i));
    }
    if (rows.empty()) throw domain_error("probe output " + std::to_string(k) + " has no labels in the training fold");
    Eigen::VectorXd yk(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) yk[static_cast<Eigen::Index>(i)] = y(static_cast<Eigen::Index>(rows[i]), k);
    if (task == TaskType::Classification && (yk.minCoeff() == yk.maxCoeff())) {
      throw domain_error("probe output " + std::to_string(k) + " has a single class in the training fold");
    }
    auto fit = fit_output(rows_of(xs, rows), yk, task, options);
    p.weights.col(k) = fit.w;
    p.bias[k] = fit.b;
    p.iterations.push_back(fit.iterations);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Metrics

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw domain_error("roc_auc: length mismatch");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Sum of positive ranks with tied groups sharing their mean rank (doubled to stay integral).
  double pos = 0, neg = 0, rank_sum2 = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mean_rank2 = static_cast<double>(i + 1 + j);  // 2 * mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        ++pos;
        rank_sum2 += mean_rank2;
      } else if (labels[order[k]] == 0) {
        ++neg;
      } else {
        throw domain_error("roc_auc: labels must be 0 or 1");
      }
    }
    i = j;
  }
  if (pos == 0 || neg == 0) throw domain_error("roc_auc needs both classes");
  const double u = (rank_sum2 - pos * (pos + 1)) / 2;
  return u / (pos * neg);
}

double rmse(std::span<const double> predictions, std::span<const double> labels) {
  if (predictions.size() != labels.size()) throw domain_error("rmse: length mismatch");
  if (predictions.empty()) throw domain_error("rmse of empty input");
  double s = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) s += (predictions[i] - labels[i]) * (predictions[i] - labels[i]);
  return std::sqrt(s / static_cast<double>(labels.size()));
}

// ---------------------------------------------------------------------------
// Harness

PropertyResult evaluate_property(const Eigen::MatrixXd& x, const Eigen::MatrixXd& labels, TaskType task,
                                 const SplitAssignment& folds, std::span<const double> lambdas, const ProbeOptions& base) {
  if (static_cast<std::size_t>(x.rows()) != folds.folds.size() || x.rows() != labels.rows()) {
    throw domain_error("features, labels and split differ in length");
  }
  if (lambdas.empty()) throw domain_error("empty lambda grid");
  const auto tr = folds.indices(Fold::Train), va = folds.indices(Fold::Valid), te = folds.indices(Fold::Test);
  const Eigen::MatrixXd xtr = rows_of(x, tr), ytr = rows_of(labels, tr);
  const Eigen::MatrixXd xva = rows_of(x, va), yva = rows_of(labels, va);
  const bool higher_better = task == TaskType::Classification;
  PropertyResult r;
  r.metric = higher_better ? "roc_auc" : "rmse";
  r.split_seed = folds.seed;
  r.n_train = tr.size();
  r.n_valid = va.size();
  r.n_test = te.size();
  Probe best;
  bool have = false;
  for (double lambda : lambdas) {
    ProbeOptions opt = base;
    opt.lambda = lambda;
    Probe p = train_probe(xtr, ytr, task, opt);
    const double v = score(p.predict(xva), yva, task, nullptr);
    if (!have || (higher_better ? v > r.valid : v < r.valid)) {
      r.valid = v;
      r.lambda = lambda;
      best = std::move(p);
      have = true;
    }
  }
  r.test = score(best.predict(rows_of(x, te)), rows_of(labels, te), task, &r.per_label_test);
  return r;
}

std::string property_json(const std::vector<PropertyResult>& results, const std::string& checkpoint_id) {
  nlohmann::ordered_json tasks = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json per = nlohmann::ordered_json::array();
    for (double v : r.per_label_test) per.push_back(std::isnan(v) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(v));
    tasks.push_back({{"task", r.task_name},
                     {"metric", r.metric},
                     {"test", r.test},
                     {"valid", r.valid},
                     {"lambda", r.lambda},
                     {"split_seed", r.split_seed},
                     {"n_train", r.n_train},
                     {"n_valid", r.n_valid},
                     {"n_test", r.n_test},
                     {"per_label_test", per}});
  }
  nlohmann::ordered_json j{{"checkpoint", checkpoint_id}, {"tasks", tasks}};
  return j.dump(2) + "\n";
}

template Features featurize<float>(const nn::Model<float>&, const tokenizer::Vocabulary&, std::span<const std::string>, int);
template Features featurize<double>(const nn::Model<double>&, const tokenizer::Vocabulary&, std::span<const std::string>, int);

}  // namespace molseq::eval
