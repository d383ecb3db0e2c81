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

#include <map>
#include <memory>
#include <vector>

#include "ssvkit/coalition.hpp"
#include "ssvkit/gp.hpp"

namespace ssvkit {

/// b(x, S) = (K_SS + lambda I)^{-1} k_S(anchors_S, x_S), one column per x.
struct EmbeddingWeights {
  FeatureSubset coalition;
  double lambda = 0.0;
  Matrix weights; // n_anchor x m
};

/// Embedding weights for every coalition of a design, aligned with design
/// order.
struct EmbeddingBatch {
  std::vector<EmbeddingWeights> per_coalition;
  Matrix X_explain;
};

struct CmeOptions {
  /// Solve with conjugate gradient instead of a Cholesky factor.
  bool use_cg = false;
  double cg_tol = 1e-12;
  int cg_max_iter = 2000;
  /// Keep one factor per coalition (memory ~ size * n_anchor^2 doubles).
  bool cache_factors = true;
  int threads = 1;
};

namespace cme {

/// 1e-3 * n_anchor.
double default_lambda(Eigen::Index num_anchors);

/// Conditional mean embedding weights against a fixed anchor set.
class EmbeddingOperator {
public:
  /// With `options.cache_factors` the factors for every coalition of `design`
  /// are computed up front; the operator is immutable afterwards.
  EmbeddingOperator(Matrix anchors, KernelParams kernel, double lambda,
                    const CoalitionDesign *design = nullptr,
                    CmeOptions options = {});

  Matrix weights(const FeatureSubset &subset, const Matrix &X) const;

  const Matrix &anchors() const { return anchors_; }
  const KernelParams &kernel() const { return kernel_; }
  double lambda() const { return lambda_; }
  Eigen::Index num_anchors() const { return anchors_.rows(); }

private:
  Matrix solve(const FeatureSubset &subset, const Matrix &rhs) const;

  Matrix anchors_;
  KernelParams kernel_;
  double lambda_;
  CmeOptions options_;
  std::map<FeatureSubset::Mask, numerics::CholeskyFactor> factors_;
};

EmbeddingWeights embedding_weights(const GPPosterior &posterior,
                                   const FeatureSubset &subset,
                                   const Matrix &X_explain, double lambda,
                                   const CmeOptions &options = {});

EmbeddingBatch embedding_batch(const GPPosterior &posterior,
                               const CoalitionDesign &design,
                               const Matrix &X_explain, double lambda,
                               const CmeOptions &options = {});

/// Per-instance payoff mean b^T m and covariance b^T K b.
std::vector<StochasticGame> game_moments(const GPPosterior &posterior,
                                         const EmbeddingBatch &batch);

} // namespace cme
} // namespace ssvkit
