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

#include "ssvkit/selftest.hpp"

#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "ssvkit/analysis.hpp"
#include "ssvkit/explain.hpp"

namespace ssvkit::selftest {

namespace {

Matrix standard_normal(Eigen::Index rows, Eigen::Index cols, boost::random::mt19937_64 &rng) {
  boost::random::normal_distribution<double> z;
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = z(rng);
  return m;
}

double max_abs(const Matrix &m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

CheckResult check_coalition_oracle(const Options &opt) {
  CheckResult r{"coalition_oracle", 0.0, 1e-8, false, "d=2..8, 10 games each"};
  for (int d = 2; d <= 8; ++d) {
    CoalitionDesign design = coalition::enumerate_coalitions(d);
    if (opt.corrupt_projection) design.A(0, 1) += 1e-3;
    for (int g = 0; g < 10; ++g) {
      const auto game = random_game(design, opt.seed + 1000u * d + g);
      const auto exact = coalition::exact_ssv(design, game, opt.threads);
      const Vector mean = design.A * game.payoff_mean;
      const Matrix cov = design.A * game.payoff_cov * design.A.transpose();
      r.max_deviation = std::max({r.max_deviation, max_abs(mean - exact.mean),
                                  max_abs(cov - exact.cov)});
    }
  }
  r.passed = r.max_deviation <= r.tolerance;
  return r;
}

CheckResult check_efficiency(const Options &opt) {
  CheckResult r{"distribution_efficiency", 0.0, 1e-10, false, "sum(A mu) and 1^T A S A^T 1"};
  for (int d = 2; d <= 8; ++d) {
    const auto design = coalition::enumerate_coalitions(d);
    const auto game = random_game(design, opt.seed + 77u * d);
    const Eigen::Index e = design.empty_index(), f = design.full_index();
    const double mean_gap = (design.A * game.payoff_mean).sum() -
                            (game.payoff_mean[f] - game.payoff_mean[e]);
    const Matrix cov = design.A * game.payoff_cov * design.A.transpose();
    const double var_diff = game.payoff_cov(f, f) + game.payoff_cov(e, e) - 2.0 * game.payoff_cov(e, f);
    r.max_deviation = std::max({r.max_deviation, std::abs(mean_gap), std::abs(cov.sum() - var_diff)});
  }
  r.passed = r.max_deviation <= r.tolerance;
  return r;
}

CheckResult check_posterior_mc(const Options &opt) {
  CheckResult r{"posterior_monte_carlo", 0.0, 0.0, true,
                "mean within 3 SE; cov within max(5% rel, 1e-3 abs)"};
  const auto data = synthetic_regression(60, 3, 0.1, opt.seed + 5);
  KernelParams kernel{1.0, kernels::median_heuristic(data.X)};
  const auto post = gp::fit_exact(data, kernel, 0.01,
                                  {30, InducingStrategy::FarthestPoint, opt.seed});
  const auto design = coalition::enumerate_coalitions(3);
  const Matrix X = data.X.topRows(5);
  const double lambda = cme::default_lambda(post.num_inducing());
  CmeOptions cme_opt;
  cme_opt.threads = opt.threads;
  const auto batch = explain::gpshap(post, design, X, lambda, cme_opt);
  const auto mc = posterior_monte_carlo(post, design, X, lambda, 20000, opt.seed + 6);
  double worst_z = 0.0, worst_cov = 0.0;
  for (Eigen::Index k = 0; k < X.rows(); ++k) {
    for (int i = 0; i < 3; ++i) {
      const double se = std::max(mc.mean_standard_error(k, i), 1e-300);
      worst_z = std::max(worst_z, std::abs(batch.means(k, i) - mc.mean(k, i)) / se);
    }
    const Matrix analytic = batch.cov(k);
    for (int i = 0; i < 3; ++i)
      for (int m = 0; m < 3; ++m) {
        const double allowed = std::max(0.05 * std::abs(analytic(i, m)), 1e-3);
        worst_cov = std::max(worst_cov, std::abs(analytic(i, m) - mc.cov[static_cast<std::size_t>(k)](i, m)) / allowed);
      }
  }
  r.max_deviation = std::max(worst_z / 3.0, worst_cov);
  r.tolerance = 1.0;
  r.passed = worst_z <= 3.0 && worst_cov <= 1.0;
  r.detail += "; deviation is a fraction of the allowance";
  return r;
}

CheckResult check_prior_identity(const Options &opt) {
  CheckResult r{"shapley_prior_identity", 0.0, 1e-8, false, "A * induced_payoff == predictive mean"};
  boost::random::mt19937_64 rng(opt.seed + 9);
  for (int t = 0; t < 5; ++t) {
    const int d = 2 + t % 3;
    const Eigen::Index n = 3 + t;
    const Matrix X = standard_normal(n, d, rng);
    const Matrix Phi = standard_normal(n, d, rng);
    const Matrix anchors = standard_normal(8, d, rng);
    KernelParams kernel{1.0, Vector::Constant(d, 1.0)};
    CmeOptions cme_opt;
    cme_opt.threads = opt.threads;
    const auto model = ShapleyPriorModel::fit({X, Phi}, anchors, kernel,
                                              coalition::enumerate_coalitions(d), 0.01, 0.1,
                                              {cme_opt, 4000});
    const Vector x = standard_normal(d, 1, rng);
    const Vector lhs = model.design().A * model.induced_payoff(x);
    r.max_deviation = std::max(r.max_deviation, max_abs(lhs - model.predict(x).mean));
  }
  r.passed = r.max_deviation <= r.tolerance;
  return r;
}

CheckResult check_folded_mean(const Options &opt) {
  CheckResult r{"folded_mean_mc", 0.0, 1e-3, false, "10^6 stratified draws per grid point"};
  std::uint64_t s = opt.seed + 11;
  for (double mu : {-2.0, -1.0, 0.0, 1.0, 2.0})
    for (double sigma : {0.5, 1.0, 2.0}) {
      const double mc = folded_mean_monte_carlo(mu, sigma, 1000000, s++);
      r.max_deviation = std::max(r.max_deviation, std::abs(mc - analysis::folded_mean(mu, sigma)));
    }
  r.passed = r.max_deviation <= r.tolerance;
  return r;
}

} // namespace

Dataset synthetic_regression(Eigen::Index n, int d, double noise_sd, std::uint64_t seed) {
  boost::random::mt19937_64 rng(seed);
  boost::random::uniform_real_distribution<double> u(-2.0, 2.0);
  boost::random::normal_distribution<double> z;
  Dataset data;
  data.X.resize(n, d);
  data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int c = 0; c < d; ++c) data.X(i, c) = u(rng);
    double y = std::sin(data.X(i, 0));
    if (d > 1) y += 0.5 * data.X(i, 1) * data.X(i, 1);
    if (d > 2) y -= data.X(i, 2);
    if (d > 3) y += 0.3 * data.X(i, 0) * data.X(i, 3);
    data.y[i] = y + noise_sd * z(rng);
  }
  return data;
}

StochasticGame random_game(const CoalitionDesign &design, std::uint64_t seed) {
  boost::random::mt19937_64 rng(seed);
  const Eigen::Index ell = design.size();
  StochasticGame g;
  g.payoff_mean = standard_normal(ell, 1, rng);
  const Matrix G = standard_normal(ell, ell, rng);
  g.payoff_cov = numerics::symmetrize(G * G.transpose() / static_cast<double>(ell));
  return g;
}

PosteriorMcResult posterior_monte_carlo(const GPPosterior &posterior,
                                        const CoalitionDesign &design,
                                        const Matrix &X_explain, double lambda,
                                        std::int64_t draws, std::uint64_t seed) {
  const auto batch = cme::embedding_batch(posterior, design, X_explain, lambda);
  const Eigen::Index n = X_explain.rows(), nI = posterior.num_inducing();
  const Eigen::Index ell = design.size();
  const int d = design.d;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(numerics::symmetrize(posterior.cov_at_inducing));
  const Matrix root = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  boost::random::mt19937_64 rng(seed);
  const Matrix F = (root * standard_normal(nI, draws, rng)).colwise() + posterior.mean_at_inducing;

  PosteriorMcResult out;
  out.mean.resize(n, d);
  out.mean_standard_error.resize(n, d);
  const double D = static_cast<double>(draws);
  for (Eigen::Index k = 0; k < n; ++k) {
    Matrix Bt(ell, nI);
    for (Eigen::Index j = 0; j < ell; ++j)
      Bt.row(j) = batch.per_coalition[static_cast<std::size_t>(j)].weights.col(k).transpose();
    const Matrix phi = design.A * (Bt * F); // d x draws
    const Vector mu = phi.rowwise().mean();
    const Matrix centred = phi.colwise() - mu;
    const Matrix cov = centred * centred.transpose() / (D - 1.0);
    out.mean.row(k) = mu.transpose();
    out.mean_standard_error.row(k) = (cov.diagonal() / D).cwiseSqrt().transpose();
    out.cov.push_back(cov);
  }
  return out;
}

double folded_mean_monte_carlo(double mu, double sigma, std::int64_t draws,
                               std::uint64_t seed) {
  boost::random::mt19937_64 rng(seed);
  boost::random::uniform_01<double> u01;
  const boost::math::normal_distribution<double> std_normal;
  const double N = static_cast<double>(draws);
  double acc = 0.0;
  for (std::int64_t i = 0; i < draws; ++i) {
    double u = (static_cast<double>(i) + u01(rng)) / N;
    u = std::clamp(u, std::numeric_limits<double>::min(), 1.0 - 1e-16);
    acc += std::abs(mu + sigma * boost::math::quantile(std_normal, u));
  }
  return acc / N;
}

std::vector<CheckResult> run(const Options &options) {
  return {check_coalition_oracle(options), check_efficiency(options),
          check_posterior_mc(options), check_prior_identity(options),
          check_folded_mean(options)};
}

} // namespace ssvkit::selftest
