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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "molseq/nn/model.hpp"
#include "molseq/tokenizer/vocab.hpp"

namespace molseq::eval {

enum class TaskType { Classification, Regression };

/// Key=value task description: name, task (classification|regression),
/// label_columns (comma separated), optional smiles_column (default "smiles").
struct TaskManifest {
  std::string name;
  TaskType task = TaskType::Regression;
  std::vector<std::string> label_columns;
  std::string smiles_column = "smiles";

  static TaskManifest parse(std::string_view text);
  static TaskManifest load(const std::string& path);
};

//! Labels are NaN where missing.
struct PropertyDataset {
  std::string name;
  TaskType task = TaskType::Regression;
  std::vector<std::string> label_names;
  std::vector<std::string> smiles;
  std::vector<std::vector<double>> labels;
  //! Rows dropped for unparseable SMILES or having no label.
  std::size_t dropped = 0;

  std::size_t size() const noexcept { return smiles.size(); }
};

/// Reads a CSV with a header row. Throws config_error for missing columns,
/// domain_error for an empty file or non-binary classification labels.
PropertyDataset parse_dataset(std::string_view csv, const TaskManifest& manifest);
PropertyDataset load_dataset(const std::string& path, const TaskManifest& manifest);

enum class Fold : std::uint8_t { Train, Valid, Test };

struct SplitAssignment {
  std::vector<Fold> folds;
  std::uint64_t seed = 0;
  std::array<double, 3> ratios{};

  std::vector<std::size_t> indices(Fold f) const;
};

/// Seeded shuffle, then contiguous train/valid/test blocks of sizes
/// round(n*r_train), round(n*r_valid) and the remainder. Throws
/// domain_error when ratios are invalid or a fold would be empty.
SplitAssignment split(std::size_t n, std::array<double, 3> ratios, std::uint64_t seed);

struct Features {
  Eigen::MatrixXd x;                 // one row per kept record
  std::vector<std::size_t> records;  // dataset index of each row
  std::size_t dropped = 0;           // records that could not be encoded
};

//! Row i is model.embed of record i's SELFIES ids; records that fail to encode are dropped.
template <class T>
Features featurize(const nn::Model<T>& model, const tokenizer::Vocabulary& vocab, std::span<const std::string> smiles,
                   int threads = 1);

/// Linear probe on train-fold-standardised features: ridge for regression,
/// logistic regression for classification, one output per label. Each output
/// minimises mean loss + lambda/2 |w|^2 over its non-missing rows by
/// accelerated full-batch gradient descent until |grad| < tol or max_iter.
struct Probe {
  TaskType task = TaskType::Regression;
  Eigen::RowVectorXd mean, scale;
  Eigen::MatrixXd weights;  // features x outputs, standardised space
  Eigen::RowVectorXd bias;
  double lambda = 0;
  std::vector<int> iterations;

  //! Regression values or class-1 probabilities, one column per output.
  Eigen::MatrixXd predict(const Eigen::MatrixXd& x) const;
  //! Weights and bias expressed on the raw (unstandardised) features.
  Eigen::MatrixXd raw_weights() const;
  Eigen::RowVectorXd raw_bias() const;
};

struct ProbeOptions {
  double lambda = 1e-2;
  double tolerance = 1e-6;
  int max_iter = 20000;
};

//! y: rows x outputs, NaN where missing. Throws domain_error for a single-class output.
Probe train_probe(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, TaskType task, const ProbeOptions& options);

//! Mann-Whitney AUC with ties counted 1/2. Throws unless both classes are present.
double roc_auc(std::span<const double> scores, std::span<const int> labels);
//! Throws on empty or mismatched input.
double rmse(std::span<const double> predictions, std::span<const double> labels);

inline constexpr std::array<double, 5> kLambdaGrid = {1e-3, 1e-2, 0.1, 1.0, 10.0};

struct PropertyResult {
  std::string task_name;
  std::string metric;  // "roc_auc" or "rmse"
  double test = 0;
  double valid = 0;
  double lambda = 0;
  std::uint64_t split_seed = 0;
  std::size_t n_train = 0, n_valid = 0, n_test = 0;
  std::vector<double> per_label_test;
};

/// Trains one probe per lambda on the train fold, keeps the best on the
/// validation fold and scores it on the test fold. `labels` rows follow `x`.
PropertyResult evaluate_property(const Eigen::MatrixXd& x, const Eigen::MatrixXd& labels, TaskType task,
                                 const SplitAssignment& folds, std::span<const double> lambdas = kLambdaGrid,
                                 const ProbeOptions& base = {});

std::string property_json(const std::vector<PropertyResult>& results, const std::string& checkpoint_id);

}  // namespace molseq::eval
