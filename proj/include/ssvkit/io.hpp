// Copyright 2026 The ssvkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssvkit/analysis.hpp"
#include "ssvkit/shapley_prior.hpp"

namespace ssvkit::io {

using Json = nlohmann::json;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index or -1.
  int column(const std::string &name) const;
};

CsvTable parse_csv(const std::string &text);
CsvTable read_csv(const std::string &path);

std::string read_text(const std::string &path);
void write_text(const std::string &path, const std::string &content);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

/// Numeric cell; Parse errors name the row (1-based, header excluded) and
/// column.
double parse_cell(const CsvTable &table, std::size_t row, std::size_t col);

/// Every column except `target` becomes a feature.
Dataset dataset_from_csv(const CsvTable &table, const std::string &target);

/// Instances for explanation. When `feature_names` is non-empty and every name
/// is a header column, those columns are taken in that order; otherwise the
/// table must have exactly `dim` columns.
Matrix instances_from_csv(const CsvTable &table,
                          const std::vector<std::string> &feature_names, int dim);

Json matrix_to_json(const Matrix &m);
Matrix matrix_from_json(const Json &j, const char *field);
Json vector_to_json(const Vector &v);
Vector vector_from_json(const Json &j, const char *field);

Json posterior_to_json(const GPPosterior &posterior,
                       const std::vector<std::string> &feature_names = {});
GPPosterior posterior_from_json(const Json &j,
                                std::vector<std::string> *feature_names = nullptr);

Json design_to_json(const CoalitionDesign &design);
/// Rebuilds the design from its masks and weights and checks the stored A.
CoalitionDesign design_from_json(const Json &j);

struct ExplanationTable {
  std::vector<std::string> feature_names;
  Matrix instances;                 // n x d
  Matrix means;                     // n x d
  std::vector<Matrix> cov;          // optional, n blocks of d x d
  std::optional<Vector> sigma2;
  std::string algorithm;
  std::string design_digest;
  std::optional<double> credible_level;
  std::optional<CredibleIntervals> intervals;
};

ExplanationTable make_table(const ExplanationBatch &batch, const Matrix &instances,
                            const std::vector<std::string> &feature_names,
                            std::optional<double> credible_level);

Json table_to_json(const ExplanationTable &table);
ExplanationTable table_from_json(const Json &j);

/// Long format: instance, feature, x, mean, sd[, lo, hi].
std::string table_to_csv(const ExplanationTable &table);

/// Reads explain/predict-explain output (JSON, or long-format CSV) or a wide
/// CSV with columns x_1..x_d, phi_1..phi_d.
ExplanationDataset explanation_dataset_from_file(const std::string &path,
                                                 std::vector<std::string> *feature_names = nullptr);

/// Default feature names f1..fd when none are known.
std::vector<std::string> default_feature_names(int d);

} // namespace ssvkit::io
