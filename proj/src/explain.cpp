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

#include "ssvkit/explain.hpp"

#include <cmath>

#include <boost/math/distributions/normal.hpp>
#include <boost/random/chi_squared_distribution.hpp>

namespace ssvkit {

Matrix ExplanationBatch::cov(Eigen::Index a) const {
  const Matrix &R = cov_factor[static_cast<std::size_t>(a)];
  Matrix out = R * R.transpose();
  if (sigma2 && bayes_term) out += (*sigma2)[a] * *bayes_term;
  return numerics::symmetrize(out);
}

Matrix ExplanationBatch::cross_cov(Eigen::Index a, Eigen::Index b) const {
  if (a == b) return cov(a);
  return cov_factor[static_cast<std::size_t>(a)] *
         cov_factor[static_cast<std::size_t>(b)].transpose();
}

StochasticExplanation ExplanationBatch::explanation(Eigen::Index a) const {
  return {means.row(a).transpose(), cov(a), a};
}

namespace explain {

namespace {

// Coalitions are processed in blocks of this size; the reduction over blocks
// is serial so results do not depend on the thread count.
constexpr std::size_t kCoalitionBlock = 32;

} // namespace

ExplanationBatch gpshap(const GPPosterior &posterior, const CoalitionDesign &design,
                        const Matrix &X_explain, double lambda,
                        const CmeOptions &options) {
  const int d = design.d;
  if (posterior.dim() != d || X_explain.cols() != d)
    fail(ErrorKind::DimensionMismatch,
         "design, posterior and instances must share the feature dimension");
  const Eigen::Index nI = posterior.num_inducing();
  const Eigen::Index n = X_explain.rows();
  const Eigen::Index ell = design.size();

  Matrix L;
  if (posterior.cov_at_inducing.isZero(0.0))
    L = Matrix::Zero(nI, nI);
  else
    L = numerics::cholesky_psd(numerics::symmetrize(posterior.cov_at_inducing)).lower;

  const cme::EmbeddingOperator op(posterior.inducing_points, posterior.kernel, lambda,
                                  nullptr, [&] {
                                    CmeOptions o = options;
                                    o.cache_factors = false;
                                    return o;
                                  }());

  ExplanationBatch out;
  out.algorithm = "gpshap";
  out.design_digest = design.digest();
  out.payoff_means = Matrix::Zero(ell, n);
  out.cov_factor.assign(static_cast<std::size_t>(n), Matrix::Zero(d, nI));

  std::vector<Matrix> Q(kCoalitionBlock); // per coalition: n x nI
  for (Eigen::Index j0 = 0; j0 < ell; j0 += static_cast<Eigen::Index>(kCoalitionBlock)) {
    const Eigen::Index j1 = std::min(ell, j0 + static_cast<Eigen::Index>(kCoalitionBlock));
    const std::size_t width = static_cast<std::size_t>(j1 - j0);
    numerics::parallel_for(width, options.threads, [&](std::size_t t) {
      const Eigen::Index j = j0 + static_cast<Eigen::Index>(t);
      const Matrix B = op.weights(design.coalition(j), X_explain); // nI x n
      out.payoff_means.row(j) = (B.transpose() * posterior.mean_at_inducing).transpose();
      Q[t] = B.transpose() * L;
    });
    // R_k += A[:, j0:j1] * [Q_j(k, :)]_j
    const Matrix A_block = design.A.middleCols(j0, j1 - j0);
    Matrix stacked(static_cast<Eigen::Index>(width), nI);
    for (Eigen::Index k = 0; k < n; ++k) {
      for (std::size_t t = 0; t < width; ++t)
        stacked.row(static_cast<Eigen::Index>(t)) = Q[t].row(k);
      out.cov_factor[static_cast<std::size_t>(k)].noalias() += A_block * stacked;
    }
  }
  out.means = (design.A * out.payoff_means).transpose();
  return out;
}

Vector bayes_s2(const Matrix &payoff_means, const CoalitionDesign &design,
                const Matrix &means) {
  const Eigen::Index n = payoff_means.cols();
  if (payoff_means.rows() != design.size() || means.rows() != n ||
      means.cols() != design.d)
    fail(ErrorKind::DimensionMismatch, "bayes_s2 shape mismatch");
  const double ell = static_cast<double>(design.size());
  Vector s2(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Vector phi = means.row(k).transpose();
    const Vector residual = (payoff_means.col(k).array() -
                             payoff_means(design.empty_index(), k)).matrix() -
                            design.Z * phi;
    // Boundary rows have zero weight.
    const double weighted = (design.weights.array() * residual.array().square()).sum();
    s2[k] = (weighted + phi.squaredNorm()) / ell;
  }
  return s2;
}

double sample_sigma2(const BayesConfig &config, Eigen::Index ell, double s2,
                     boost::random::mt19937_64 &rng) {
  if (ell < 1) fail(ErrorKind::InvalidArgument, "need at least one coalition");
  if (config.ell0 < 0.0 || config.sigma0_sq < 0.0 || s2 < 0.0)
    fail(ErrorKind::InvalidArgument, "Bayes hyperparameters must be non-negative");
  const double df = config.ell0 + static_cast<double>(ell);
  const double scale = (config.ell0 * config.sigma0_sq + static_cast<double>(ell) * s2) / df;
  boost::random::chi_squared_distribution<double> chi2(df);
  const double draw = chi2(rng);
  if (scale == 0.0) return 0.0;
  return df * scale / draw;
}

double sample_sigma2(const BayesConfig &config, Eigen::Index ell, double s2) {
  boost::random::mt19937_64 rng(config.seed);
  return sample_sigma2(config, ell, s2, rng);
}

Matrix bayes_term(const CoalitionDesign &design) {
  const Matrix &M = design.ZtWZ_interior;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(M, Eigen::EigenvaluesOnly);
  const double lmax = eig.eigenvalues().maxCoeff();
  if (!(lmax > 0.0) || eig.eigenvalues().minCoeff() <= 1e-10 * lmax)
    fail(ErrorKind::SingularSystem,
         "interior coalitions do not identify every feature; Z^T W Z is singular");
  const Eigen::LLT<Matrix> llt(M);
  return numerics::symmetrize(llt.solve(Matrix::Identity(M.rows(), M.cols())));
}

namespace {

void attach_noise_term(ExplanationBatch &batch, const CoalitionDesign &design,
                       const BayesConfig &config) {
  const Vector s2 = bayes_s2(batch.payoff_means, design, batch.means);
  boost::random::mt19937_64 rng(config.seed);
  Vector sigma2(s2.size());
  for (Eigen::Index k = 0; k < s2.size(); ++k)
    sigma2[k] = config.sigma2_override ? *config.sigma2_override
                                       : sample_sigma2(config, design.size(), s2[k], rng);
  batch.sigma2 = std::move(sigma2);
  batch.bayes_term = bayes_term(design);
}

} // namespace

ExplanationBatch bayesgpshap(const GPPosterior &posterior,
                             const CoalitionDesign &design, const Matrix &X_explain,
                             double lambda, const BayesConfig &config,
                             const CmeOptions &options) {
  ExplanationBatch out = gpshap(posterior, design, X_explain, lambda, options);
  out.algorithm = "bayesgpshap";
  attach_noise_term(out, design, config);
  return out;
}

ExplanationBatch bayesshap_deterministic(const Matrix &payoffs,
                                         const CoalitionDesign &design,
                                         const BayesConfig &config) {
  if (payoffs.rows() != design.size())
    fail(ErrorKind::DimensionMismatch, "one payoff row per coalition is required");
  ExplanationBatch out;
  out.algorithm = "bayesshap";
  out.design_digest = design.digest();
  out.payoff_means = payoffs;
  out.means = (design.A * payoffs).transpose();
  out.cov_factor.assign(static_cast<std::size_t>(payoffs.cols()), Matrix::Zero(design.d, 0));
  attach_noise_term(out, design, config);
  return out;
}

double normal_interval_scale(double level) {
  if (!(level > 0.0 && level < 1.0))
    fail(ErrorKind::InvalidArgument, "credible level must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(),
                               0.5 * (1.0 + level));
}

CredibleIntervals credible_intervals(const ExplanationBatch &batch, double level) {
  const double z = normal_interval_scale(level);
  CredibleIntervals out{batch.means, batch.means};
  for (Eigen::Index k = 0; k < batch.num_instances(); ++k) {
    const Vector sd = batch.cov(k).diagonal().cwiseMax(0.0).cwiseSqrt();
    out.lo.row(k) -= z * sd.transpose();
    out.hi.row(k) += z * sd.transpose();
  }
  return out;
}

} // namespace explain
} // namespace ssvkit
