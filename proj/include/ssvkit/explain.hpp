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
#include <optional>
#include <string>
#include <vector>

#include <boost/random/mersenne_twister.hpp>

#include "ssvkit/cme.hpp"

namespace ssvkit {

/// Gaussian law of the Shapley values of one instance.
struct StochasticExplanation {
  Vector mean;
  Matrix cov;
  Eigen::Index instance_index = 0;
};

struct BayesConfig {
  double ell0 = 0.1;
  double sigma0_sq = 0.1;
  std::uint64_t seed = 0;
  /// Replaces the sampled noise variance for every instance when set.
  std::optional<double> sigma2_override;
};

/// Explanations for a batch of instances.
///
/// The joint covariance over (feature, instance) pairs is kept in factored
/// form: cov((i, a), (m, b)) = sum_l R_a(i, l) R_b(m, l), with one d x r block
/// R_a per instance. When `sigma2` is present the per-instance covariance
/// additionally carries bayes_term * sigma2[a].
struct ExplanationBatch {
  std::string algorithm;
  Matrix means;                    // n x d
  std::vector<Matrix> cov_factor;  // n blocks of d x r
  Matrix payoff_means;             // size x n, E[v_x] per coalition
  std::optional<Vector> sigma2;
  std::optional<Matrix> bayes_term; // (Z^T W Z)^{-1}, interior rows
  std::string design_digest;

  Eigen::Index num_instances() const { return means.rows(); }
  int dim() const { return static_cast<int>(means.cols()); }

  /// d x d covariance of instance a.
  Matrix cov(Eigen::Index a) const;
  /// d x d cross covariance between instances a and b. The noise-variance term
  /// is per instance and only contributes when a == b.
  Matrix cross_cov(Eigen::Index a, Eigen::Index b) const;
  StochasticExplanation explanation(Eigen::Index a) const;
};

struct CredibleIntervals {
  Matrix lo; // n x d
  Matrix hi; // n x d
};

namespace explain {

/// Mean and low-rank covariance of the Shapley values under the GP posterior.
ExplanationBatch gpshap(const GPPosterior &posterior, const CoalitionDesign &design,
                        const Matrix &X_explain, double lambda,
                        const CmeOptions &options = {});

/// Per-instance s^2 = (weighted interior residual + |phi|^2) / size.
Vector bayes_s2(const Matrix &payoff_means, const CoalitionDesign &design,
                const Matrix &means);

/// One draw from Scaled-Inv-chi^2(ell0 + ell, (ell0 sigma0^2 + ell s2) / (ell0 + ell)).
double sample_sigma2(const BayesConfig &config, Eigen::Index ell, double s2,
                     boost::random::mt19937_64 &rng);
double sample_sigma2(const BayesConfig &config, Eigen::Index ell, double s2);

/// (Z^T W Z)^{-1} over interior rows.
Matrix bayes_term(const CoalitionDesign &design);

ExplanationBatch bayesgpshap(const GPPosterior &posterior,
                             const CoalitionDesign &design, const Matrix &X_explain,
                             double lambda, const BayesConfig &config,
                             const CmeOptions &options = {});

/// BayesSHAP for deterministic payoffs (one column per instance).
ExplanationBatch bayesshap_deterministic(const Matrix &payoffs,
                                         const CoalitionDesign &design,
                                         const BayesConfig &config);

CredibleIntervals credible_intervals(const ExplanationBatch &batch, double level);

/// Two-sided standard normal quantile z_{(1 + level) / 2}.
double normal_interval_scale(double level);

} // namespace explain
} // namespace ssvkit
