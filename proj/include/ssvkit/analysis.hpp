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

#include <cstdint>
#include <vector>

#include "ssvkit/explain.hpp"

namespace ssvkit {

struct GlobalImportance {
  Vector mean_abs_ssv; // average over instances of E|phi_i|
  Vector abs_mean_ssv; // average over instances of |E phi_i|
};

struct Edge {
  int i = 0;
  int j = 0;
  double partial_correlation = 0.0;
};

struct BeeswarmRow {
  Eigen::Index instance = 0;
  int feature = 0;
  double mean = 0.0;
  double sd = 0.0;
  double feature_value = 0.0;
  double feature_value_quantile = 0.0;
};

struct FoldedMoments {
  Vector mean;
  Matrix cov;
};

namespace analysis {

/// E|X| for X ~ N(mu, sigma^2).
double folded_mean(double mu, double sigma);

GlobalImportance global_importance(const ExplanationBatch &batch);

/// Seeded Monte Carlo moments of |X| for X ~ N(mean, cov).
FoldedMoments folded_moments_mc(const Vector &mean, const Matrix &cov,
                                std::int64_t draws, std::uint64_t seed);

/// Normalizes a covariance to a correlation matrix. Rows with variance below
/// 1e-12 get 1 on the diagonal and 0 elsewhere.
Matrix correlation_matrix(const Matrix &cov);

/// Partial correlations -P_ij / sqrt(P_ii P_jj) of the precision P.
Matrix partial_correlations(const Matrix &cov);

/// Edges of the Gaussian graphical model after discarding the weakest
/// `sparsity` fraction (by count) of off-diagonal |partial correlations|.
/// Edges are reported once with i < j.
std::vector<Edge> precision_graph(const Matrix &cov, double sparsity);

std::vector<BeeswarmRow> beeswarm_export(const ExplanationBatch &batch,
                                         const Matrix &X_explain);

/// Features ordered by decreasing span (max - min) of their mean explanation.
std::vector<int> rank_by_span(const ExplanationBatch &batch);

} // namespace analysis
} // namespace ssvkit
