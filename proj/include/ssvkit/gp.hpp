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
#include <string>
#include <utility>
#include <vector>

#include "ssvkit/kernels.hpp"

namespace ssvkit {

struct Dataset {
  Matrix X;
  Vector y;
  std::vector<std::string> feature_names;

  Eigen::Index size() const { return X.rows(); }
  int dim() const { return static_cast<int>(X.cols()); }
  void validate() const;
};

/// GP posterior evaluated at a set of inducing rows. This is everything the
/// explainers need from the regression model.
struct GPPosterior {
  Matrix inducing_points;   // n_I x d
  Vector mean_at_inducing;  // n_I
  Matrix cov_at_inducing;   // n_I x n_I
  KernelParams kernel;
  double noise = 1.0;

  Eigen::Index num_inducing() const { return inducing_points.rows(); }
  int dim() const { return static_cast<int>(inducing_points.cols()); }
};

enum class InducingStrategy { All, Uniform, FarthestPoint };

InducingStrategy parse_inducing_strategy(const std::string &name);
std::string to_string(InducingStrategy strategy);

struct InducingSelector {
  Eigen::Index count = 0; // ignored for InducingStrategy::All
  InducingStrategy strategy = InducingStrategy::All;
  std::uint64_t seed = 0;
};

namespace gp {

/// Exact GP regression conditioned on the full training set.
class ExactRegression {
public:
  ExactRegression(const Dataset &data, KernelParams kernel, double noise);

  /// Posterior mean and covariance at the rows of Xq.
  std::pair<Vector, Matrix> predict(const Matrix &Xq) const;
  double log_marginal_likelihood() const;

  const KernelParams &kernel() const { return kernel_; }
  double noise() const { return noise_; }

private:
  Matrix X_;
  Vector y_;
  KernelParams kernel_;
  double noise_;
  numerics::CholeskyFactor chol_; // of K + noise I
  Vector alpha_;                  // (K + noise I)^{-1} y
};

std::vector<Eigen::Index> select_inducing(const Dataset &data,
                                          Eigen::Index count,
                                          InducingStrategy strategy,
                                          std::uint64_t seed);

GPPosterior fit_exact(const Dataset &data, const KernelParams &kernel,
                      double noise, const InducingSelector &inducing);

double log_marginal_likelihood(const Dataset &data, const KernelParams &kernel,
                               double noise);

struct GridEntry {
  KernelParams kernel;
  double noise = 1.0;
};

/// Median-heuristic lengthscales times {0.25, 0.5, 1, 2, 4} crossed with noise
/// levels {1e-3, 1e-2, 1e-1, 1} * var(y). Kernel variance is var(y) (1 when
/// y is constant).
std::vector<GridEntry> default_grid(const Dataset &data);

struct Selection {
  GridEntry best;
  double log_marginal_likelihood = 0.0;
  std::size_t index = 0;
};

/// Grid entry with the largest exact log marginal likelihood; ties keep the
/// earliest entry.
Selection select_hyperparameters(const Dataset &data,
                                 const std::vector<GridEntry> &grid);

} // namespace gp
} // namespace ssvkit
