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

#include "ssvkit/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace ssvkit {

void Dataset::validate() const {
  if (X.rows() < 1) fail(ErrorKind::InvalidArgument, "dataset is empty");
  if (y.size() != X.rows())
    fail(ErrorKind::DimensionMismatch, "X and y row counts differ");
  if (!X.allFinite() || !y.allFinite())
    fail(ErrorKind::NonFinite, "dataset has non-finite entries");
  if (!feature_names.empty() &&
      feature_names.size() != static_cast<std::size_t>(X.cols()))
    fail(ErrorKind::DimensionMismatch, "feature name count differs from d");
}

InducingStrategy parse_inducing_strategy(const std::string &name) {
  if (name == "all") return InducingStrategy::All;
  if (name == "uniform") return InducingStrategy::Uniform;
  if (name == "farthest_point") return InducingStrategy::FarthestPoint;
  fail(ErrorKind::Parse, "unknown inducing strategy '" + name + "'");
}

std::string to_string(InducingStrategy strategy) {
  switch (strategy) {
  case InducingStrategy::All: return "all";
  case InducingStrategy::Uniform: return "uniform";
  case InducingStrategy::FarthestPoint: return "farthest_point";
  }
  return "all";
}

namespace gp {

ExactRegression::ExactRegression(const Dataset &data, KernelParams kernel,
                                 double noise)
    : X_(data.X), y_(data.y), kernel_(std::move(kernel)), noise_(noise) {
  data.validate();
  kernel_.validate();
  if (kernel_.dim() != data.dim())
    fail(ErrorKind::DimensionMismatch, "kernel dimension differs from data");
  if (!(noise_ > 0.0)) fail(ErrorKind::InvalidArgument, "noise must be positive");
  Matrix K = kernels::gram(kernel_, X_, X_);
  K.diagonal().array() += noise_;
  chol_ = numerics::cholesky_psd(numerics::symmetrize(K));
  alpha_ = chol_.solve(y_);
}

std::pair<Vector, Matrix> ExactRegression::predict(const Matrix &Xq) const {
  const Matrix Kqx = kernels::gram(kernel_, Xq, X_);
  Vector mean = Kqx * alpha_;
  const Matrix V = chol_.solve_lower(Kqx.transpose());
  Matrix cov = kernels::gram(kernel_, Xq, Xq) - V.transpose() * V;
  return {std::move(mean), numerics::symmetrize(cov)};
}

double ExactRegression::log_marginal_likelihood() const {
  const double n = static_cast<double>(y_.size());
  return -0.5 * y_.dot(alpha_) - 0.5 * chol_.log_determinant() -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

std::vector<Eigen::Index> select_inducing(const Dataset &data,
                                          Eigen::Index count,
                                          InducingStrategy strategy,
                                          std::uint64_t seed) {
  const Eigen::Index n = data.size();
  std::vector<Eigen::Index> out;
  if (strategy == InducingStrategy::All) {
    out.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i;
    return out;
  }
  if (count < 1 || count > n)
    fail(ErrorKind::CountOutOfRange,
         "inducing count must lie in [1, " + std::to_string(n) + "]");

  if (strategy == InducingStrategy::Uniform) {
    // Floyd's algorithm: count distinct draws from [0, n).
    boost::random::mt19937_64 rng(seed);
    std::set<Eigen::Index> chosen;
    for (Eigen::Index j = n - count; j < n; ++j) {
      boost::random::uniform_int_distribution<Eigen::Index> pick(0, j);
      const Eigen::Index t = pick(rng);
      if (!chosen.insert(t).second) chosen.insert(j);
    }
    return {chosen.begin(), chosen.end()};
  }

  // Farthest point: seed with the row nearest the data mean, then greedily add
  // the row maximizing its distance to the chosen set. Ties go to the lower
  // index.
  const Eigen::RowVectorXd centre = data.X.colwise().mean();
  Eigen::Index start = 0;
  (data.X.rowwise() - centre).rowwise().squaredNorm().minCoeff(&start);
  out.push_back(start);
  Vector min_dist = (data.X.rowwise() - data.X.row(start)).rowwise().squaredNorm();
  while (static_cast<Eigen::Index>(out.size()) < count) {
    Eigen::Index next = 0;
    min_dist.maxCoeff(&next);
    out.push_back(next);
    min_dist = min_dist.cwiseMin(
        (data.X.rowwise() - data.X.row(next)).rowwise().squaredNorm());
  }
  return out;
}

GPPosterior fit_exact(const Dataset &data, const KernelParams &kernel,
                      double noise, const InducingSelector &inducing) {
  const ExactRegression model(data, kernel, noise);
  const auto rows =
      select_inducing(data, inducing.count, inducing.strategy, inducing.seed);
  GPPosterior post;
  post.inducing_points.resize(static_cast<Eigen::Index>(rows.size()), data.dim());
  for (std::size_t i = 0; i < rows.size(); ++i)
    post.inducing_points.row(static_cast<Eigen::Index>(i)) = data.X.row(rows[i]);
  auto [mean, cov] = model.predict(post.inducing_points);
  post.mean_at_inducing = std::move(mean);
  post.cov_at_inducing = std::move(cov);
  post.kernel = kernel;
  post.noise = noise;
  return post;
}

double log_marginal_likelihood(const Dataset &data, const KernelParams &kernel,
                               double noise) {
  return ExactRegression(data, kernel, noise).log_marginal_likelihood();
}

std::vector<GridEntry> default_grid(const Dataset &data) {
  data.validate();
  const Vector base = data.size() >= 2 ? kernels::median_heuristic(data.X)
                                       : Vector::Ones(data.dim());
  double var_y = 0.0;
  if (data.size() >= 2) {
    const double mu = data.y.mean();
    var_y = (data.y.array() - mu).square().sum() /
            static_cast<double>(data.size() - 1);
  }
  if (!(var_y > 0.0)) var_y = 1.0;

  std::vector<GridEntry> grid;
  for (double scale : {0.25, 0.5, 1.0, 2.0, 4.0})
    for (double rel_noise : {1e-3, 1e-2, 1e-1, 1.0})
      grid.push_back({KernelParams{1.0, base * scale}, rel_noise * var_y});
  return grid;
}

Selection select_hyperparameters(const Dataset &data,
                                 const std::vector<GridEntry> &grid) {
  if (grid.empty())
    fail(ErrorKind::InvalidArgument, "hyperparameter grid is empty");
  Selection best;
  best.log_marginal_likelihood = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double lml = log_marginal_likelihood(data, grid[i].kernel, grid[i].noise);
    if (!found || lml > best.log_marginal_likelihood) {
      best = {grid[i], lml, i};
      found = true;
    }
  }
  return best;
}

} // namespace gp
} // namespace ssvkit
