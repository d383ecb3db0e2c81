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

#include "ssvkit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

namespace ssvkit::analysis {

double folded_mean(double mu, double sigma) {
  if (sigma < 0.0) fail(ErrorKind::InvalidArgument, "sigma must be non-negative");
  if (sigma == 0.0) return std::abs(mu);
  const boost::math::normal_distribution<double> std_normal;
  return sigma * std::sqrt(2.0 / std::numbers::pi) * std::exp(-mu * mu / (2.0 * sigma * sigma)) +
         mu * (1.0 - 2.0 * boost::math::cdf(std_normal, -mu / sigma));
}

GlobalImportance global_importance(const ExplanationBatch &batch) {
  const int d = batch.dim();
  const Eigen::Index n = batch.num_instances();
  GlobalImportance out{Vector::Zero(d), Vector::Zero(d)};
  if (n == 0) return out;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Vector var = batch.cov(k).diagonal();
    for (int i = 0; i < d; ++i) {
      const double mu = batch.means(k, i);
      out.mean_abs_ssv[i] += folded_mean(mu, std::sqrt(std::max(var[i], 0.0)));
      out.abs_mean_ssv[i] += std::abs(mu);
    }
  }
  out.mean_abs_ssv /= static_cast<double>(n);
  out.abs_mean_ssv /= static_cast<double>(n);
  return out;
}

FoldedMoments folded_moments_mc(const Vector &mean, const Matrix &cov,
                                std::int64_t draws, std::uint64_t seed) {
  if (draws < 2) fail(ErrorKind::InvalidArgument, "need at least two draws");
  const Eigen::Index d = mean.size();
  if (cov.rows() != d || cov.cols() != d)
    fail(ErrorKind::DimensionMismatch, "mean and covariance disagree");
  const Matrix L = numerics::cholesky_psd(numerics::symmetrize(cov)).lower;
  boost::random::mt19937_64 rng(seed);
  boost::random::normal_distribution<double> z;
  Vector sum = Vector::Zero(d);
  Matrix outer = Matrix::Zero(d, d);
  Vector e(d);
  for (std::int64_t t = 0; t < draws; ++t) {
    for (Eigen::Index i = 0; i < d; ++i) e[i] = z(rng);
    const Vector a = (mean + L * e).cwiseAbs();
    sum += a;
    outer.noalias() += a * a.transpose();
  }
  const double n = static_cast<double>(draws);
  FoldedMoments out;
  out.mean = sum / n;
  out.cov = numerics::symmetrize((outer - n * out.mean * out.mean.transpose()) / (n - 1.0));
  return out;
}

Matrix correlation_matrix(const Matrix &cov) {
  if (cov.rows() != cov.cols())
    fail(ErrorKind::DimensionMismatch, "covariance must be square");
  const Eigen::Index d = cov.rows();
  Matrix out = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    out(i, i) = 1.0;
    if (cov(i, i) < 1e-12) continue;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (j == i || cov(j, j) < 1e-12) continue;
      out(i, j) = cov(i, j) / std::sqrt(cov(i, i) * cov(j, j));
    }
  }
  return numerics::symmetrize(out);
}

Matrix partial_correlations(const Matrix &cov) {
  const auto chol = numerics::cholesky_psd(numerics::symmetrize(cov));
  const Matrix P = numerics::symmetrize(chol.solve(Matrix::Identity(cov.rows(), cov.cols())));
  const Eigen::Index d = P.rows();
  Matrix rho = Matrix::Identity(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      if (i != j) rho(i, j) = -P(i, j) / std::sqrt(P(i, i) * P(j, j));
  return rho;
}

std::vector<Edge> precision_graph(const Matrix &cov, double sparsity) {
  if (!(sparsity >= 0.0 && sparsity < 1.0))
    fail(ErrorKind::InvalidArgument, "sparsity must lie in [0, 1)");
  const Matrix rho = partial_correlations(cov);
  const int d = static_cast<int>(rho.rows());
  std::vector<double> magnitudes;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) magnitudes.push_back(std::abs(rho(i, j)));
  if (magnitudes.empty()) return {};
  std::sort(magnitudes.begin(), magnitudes.end());
  const auto drop = static_cast<std::size_t>(std::floor(sparsity * magnitudes.size()));
  const double threshold = std::max(drop == 0 ? 0.0 : magnitudes[drop - 1], 1e-12);
  std::vector<Edge> edges;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (std::abs(rho(i, j)) > threshold) edges.push_back({i, j, rho(i, j)});
  return edges;
}

std::vector<BeeswarmRow> beeswarm_export(const ExplanationBatch &batch,
                                         const Matrix &X_explain) {
  const Eigen::Index n = batch.num_instances();
  const int d = batch.dim();
  if (X_explain.rows() != n || X_explain.cols() != d)
    fail(ErrorKind::DimensionMismatch, "instances do not match the explanation batch");
  // Mid-rank quantile: (#below + #equal / 2) / n, with the value itself counted
  // among the equals.
  Matrix quantile(n, d);
  for (int i = 0; i < d; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      double below = 0.0, equal = 0.0;
      for (Eigen::Index r = 0; r < n; ++r) {
        if (X_explain(r, i) < X_explain(k, i)) below += 1.0;
        else if (X_explain(r, i) == X_explain(k, i)) equal += 1.0;
      }
      quantile(k, i) = (below + 0.5 * equal) / static_cast<double>(n);
    }
  }
  std::vector<BeeswarmRow> rows;
  rows.reserve(static_cast<std::size_t>(n * d));
  for (Eigen::Index k = 0; k < n; ++k) {
    const Vector var = batch.cov(k).diagonal();
    for (int i = 0; i < d; ++i)
      rows.push_back({k, i, batch.means(k, i), std::sqrt(std::max(var[i], 0.0)),
                      X_explain(k, i), quantile(k, i)});
  }
  return rows;
}

std::vector<int> rank_by_span(const ExplanationBatch &batch) {
  const int d = batch.dim();
  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  if (batch.num_instances() == 0) return order;
  const Vector span = batch.means.colwise().maxCoeff() - batch.means.colwise().minCoeff();
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return span[a] > span[b]; });
  return order;
}

} // namespace ssvkit::analysis
