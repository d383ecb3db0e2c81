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
#include <vector>

#include "ssvkit/shapley_prior.hpp"

namespace ssvkit::selftest {

struct CheckResult {
  std::string name;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct Options {
  std::uint64_t seed = 0;
  int threads = 1;
  /// Negative control: perturbs the projection used by the oracle check.
  bool corrupt_projection = false;
};

std::vector<CheckResult> run(const Options &options);

/// y = sin(x1) + 0.5 x2^2 - x3 + 0.3 x1 x4 + noise over the available
/// features, X uniform on [-2, 2]^d.
Dataset synthetic_regression(Eigen::Index n, int d, double noise_sd, std::uint64_t seed);

/// Random Gaussian game over `design`: payoff mean N(0, 1), covariance G G^T / size
/// with G standard normal.
StochasticGame random_game(const CoalitionDesign &design, std::uint64_t seed);

struct PosteriorMcResult {
  Matrix mean;               // n x d empirical mean of per-draw Shapley values
  Matrix mean_standard_error; // n x d
  std::vector<Matrix> cov;   // per-instance empirical covariance
};

/// Draws joint posterior values at the inducing points from
/// N(mean_at_inducing, cov_at_inducing) using an eigendecomposition square
/// root, and maps each draw through A B(x)^T to deterministic Shapley values.
PosteriorMcResult posterior_monte_carlo(const GPPosterior &posterior,
                                        const CoalitionDesign &design,
                                        const Matrix &X_explain, double lambda,
                                        std::int64_t draws, std::uint64_t seed);

/// Stratified Monte Carlo estimate of E|mu + sigma Z| with `draws` strata.
double folded_mean_monte_carlo(double mu, double sigma, std::int64_t draws,
                               std::uint64_t seed);

} // namespace ssvkit::selftest
