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

#include "ssvkit/cme.hpp"

#include <string>

namespace ssvkit::cme {

double default_lambda(Eigen::Index num_anchors) {
  return 1e-3 * static_cast<double>(num_anchors);
}

namespace {

Matrix regularized_gram(const Matrix &anchors, const KernelParams &kernel,
                        const FeatureSubset &subset, double lambda) {
  Matrix K = kernels::gram(kernel, subset, anchors, anchors);
  K.diagonal().array() += lambda;
  return numerics::symmetrize(K);
}

} // namespace

EmbeddingOperator::EmbeddingOperator(Matrix anchors, KernelParams kernel,
                                     double lambda, const CoalitionDesign *design,
                                     CmeOptions options)
    : anchors_(std::move(anchors)), kernel_(std::move(kernel)), lambda_(lambda),
      options_(options) {
  kernel_.validate();
  if (!(lambda_ > 0.0))
    fail(ErrorKind::InvalidArgument, "CME regularization must be positive");
  if (anchors_.cols() != kernel_.dim())
    fail(ErrorKind::DimensionMismatch, "anchor dimension differs from kernel");
  if (design == nullptr || !options_.cache_factors || options_.use_cg) return;
  if (design->d != kernel_.dim())
    fail(ErrorKind::DimensionMismatch, "design dimension differs from kernel");

  std::vector<numerics::CholeskyFactor> built(static_cast<std::size_t>(design->size()));
  numerics::parallel_for(built.size(), options_.threads, [&](std::size_t j) {
    const auto subset = design->coalition(static_cast<Eigen::Index>(j));
    if (subset.size() == 0) return;
    built[j] = numerics::cholesky_psd(regularized_gram(anchors_, kernel_, subset, lambda_));
  });
  for (std::size_t j = 0; j < built.size(); ++j)
    if (design->masks[j] != 0u) factors_.emplace(design->masks[j], std::move(built[j]));
}

Matrix EmbeddingOperator::solve(const FeatureSubset &subset, const Matrix &rhs) const {
  if (options_.use_cg) {
    const Matrix K = regularized_gram(anchors_, kernel_, subset, lambda_);
    Matrix out(rhs.rows(), rhs.cols());
    for (Eigen::Index c = 0; c < rhs.cols(); ++c) {
      const auto res = numerics::conjugate_gradient(K, rhs.col(c), options_.cg_tol,
                                                    options_.cg_max_iter);
      out.col(c) = res.x;
    }
    return out;
  }
  if (auto it = factors_.find(subset.mask()); it != factors_.end())
    return it->second.solve(rhs);
  return numerics::cholesky_psd(regularized_gram(anchors_, kernel_, subset, lambda_))
      .solve(rhs);
}

Matrix EmbeddingOperator::weights(const FeatureSubset &subset, const Matrix &X) const {
  if (X.cols() != kernel_.dim() || subset.dim() != kernel_.dim())
    fail(ErrorKind::DimensionMismatch,
         "instances must have " + std::to_string(kernel_.dim()) + " columns");
  const Eigen::Index n = anchors_.rows();
  if (subset.size() == 0) {
    // k_empty = 1, so (J + lambda I)^{-1} 1 = 1 / (n + lambda).
    return Matrix::Constant(n, X.rows(), 1.0 / (static_cast<double>(n) + lambda_));
  }
  return solve(subset, kernels::gram(kernel_, subset, anchors_, X));
}

EmbeddingWeights embedding_weights(const GPPosterior &posterior,
                                   const FeatureSubset &subset,
                                   const Matrix &X_explain, double lambda,
                                   const CmeOptions &options) {
  const EmbeddingOperator op(posterior.inducing_points, posterior.kernel, lambda,
                             nullptr, options);
  return {subset, lambda, op.weights(subset, X_explain)};
}

EmbeddingBatch embedding_batch(const GPPosterior &posterior,
                               const CoalitionDesign &design,
                               const Matrix &X_explain, double lambda,
                               const CmeOptions &options) {
  if (design.d != posterior.dim())
    fail(ErrorKind::DesignMismatch, "design dimension differs from posterior");
  CmeOptions no_cache = options;
  no_cache.cache_factors = false; // each coalition is solved exactly once here
  const EmbeddingOperator op(posterior.inducing_points, posterior.kernel, lambda,
                             nullptr, no_cache);
  EmbeddingBatch batch;
  batch.X_explain = X_explain;
  batch.per_coalition.resize(static_cast<std::size_t>(design.size()));
  numerics::parallel_for(batch.per_coalition.size(), options.threads, [&](std::size_t j) {
    const auto subset = design.coalition(static_cast<Eigen::Index>(j));
    batch.per_coalition[j] = {subset, lambda, op.weights(subset, X_explain)};
  });
  return batch;
}

std::vector<StochasticGame> game_moments(const GPPosterior &posterior,
                                         const EmbeddingBatch &batch) {
  const Eigen::Index nI = posterior.num_inducing();
  for (const auto &w : batch.per_coalition)
    if (w.weights.rows() != nI)
      fail(ErrorKind::DesignMismatch,
           "embedding weights were built for a different inducing set");
  const Eigen::Index ell = static_cast<Eigen::Index>(batch.per_coalition.size());
  const Eigen::Index n = batch.X_explain.rows();
  std::vector<StochasticGame> games(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    Matrix B(nI, ell);
    for (Eigen::Index j = 0; j < ell; ++j)
      B.col(j) = batch.per_coalition[static_cast<std::size_t>(j)].weights.col(k);
    auto &g = games[static_cast<std::size_t>(k)];
    g.payoff_mean = B.transpose() * posterior.mean_at_inducing;
    g.payoff_cov = numerics::symmetrize(B.transpose() * posterior.cov_at_inducing * B);
  }
  return games;
}

} // namespace ssvkit::cme
