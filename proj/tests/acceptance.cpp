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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <deque>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <unordered_map>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include "ssvkit/analysis.hpp"
#include "ssvkit/cli.hpp"
#include "ssvkit/coalition.hpp"
#include "ssvkit/explain.hpp"
#include "ssvkit/io.hpp"
#include "ssvkit/selftest.hpp"
#include "ssvkit/shapley_prior.hpp"

using namespace ssvkit;
namespace fs = std::filesystem;

namespace {

double max_abs(const Matrix &m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

struct Outcome {
  bool passed = false;
  std::string detail;
};

// Every batch produced below is kept for the Jensen and PSD sweeps.
std::deque<ExplanationBatch> g_batches;

const ExplanationBatch &keep(ExplanationBatch b) {
  g_batches.push_back(std::move(b));
  return g_batches.back();
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

struct Fixture {
  Dataset data;
  GPPosterior post;
  double lambda;
};

Fixture fixture(Eigen::Index n, int d, Eigen::Index n_inducing, std::uint64_t seed) {
  Fixture f;
  f.data = selftest::synthetic_regression(n, d, 0.1, seed);
  const auto sel = gp::select_hyperparameters(f.data, gp::default_grid(f.data));
  f.post = gp::fit_exact(f.data, sel.best.kernel, sel.best.noise,
                         {n_inducing, InducingStrategy::FarthestPoint, seed});
  f.lambda = cme::default_lambda(n_inducing);
  return f;
}

Outcome criterion1() {
  double worst = 0;
  for (int d = 2; d <= 8; ++d) {
    const auto design = coalition::enumerate_coalitions(d);
    for (std::uint64_t g = 0; g < 50; ++g) {
      const auto game = selftest::random_game(design, 1000 * d + g);
      const auto oracle = coalition::exact_ssv(design, game);
      worst = std::max(worst, max_abs(design.A * game.payoff_mean - oracle.mean));
      worst = std::max(worst,
                       max_abs(design.A * game.payoff_cov * design.A.transpose() - oracle.cov));
    }
  }
  return {worst <= 1e-8, "max deviation " + fmt(worst) + " (tol 1e-8)"};
}

Outcome criterion2() {
  const auto f = fixture(100, 4, 60, 2);
  const auto design = coalition::enumerate_coalitions(4);
  const Matrix X = f.data.X.topRows(5);
  const auto &batch = keep(explain::gpshap(f.post, design, X, f.lambda));
  const auto mc = selftest::posterior_monte_carlo(f.post, design, X, f.lambda, 20000, 17);
  double worst_z = 0, worst_cov = 0;
  for (Eigen::Index k = 0; k < X.rows(); ++k) {
    const Matrix cov = batch.cov(k);
    for (int i = 0; i < 4; ++i) {
      const double se = mc.mean_standard_error(k, i);
      const double diff = std::abs(mc.mean(k, i) - batch.means(k, i));
      worst_z = std::max(worst_z, se > 0 ? diff / se : (diff > 0 ? INFINITY : 0.0));
      for (int m = 0; m < 4; ++m) {
        const double allowed = std::max(0.05 * std::abs(cov(i, m)), 1e-3);
        worst_cov = std::max(worst_cov,
                             std::abs(cov(i, m) - mc.cov[static_cast<std::size_t>(k)](i, m)) / allowed);
      }
    }
  }
  return {worst_z <= 3.0 && worst_cov <= 1.0,
          "max |mean err|/SE " + fmt(worst_z) + " (<= 3), max cov err/allowance " + fmt(worst_cov) +
              " (<= 1)"};
}

Outcome criterion3() {
  double worst_mean = 0, worst_cov = 0;
  for (int d : {3, 5, 7}) {
    const auto f = fixture(60, d, 40, 30 + d);
    const Matrix X = f.data.X.topRows(8);
    for (const auto &design : {coalition::enumerate_coalitions(d),
                               coalition::sample_coalitions(d, std::min(2 * d + 4, (1 << d) - 2), 5)}) {
      const auto &batch = keep(explain::gpshap(f.post, design, X, f.lambda));
      const auto games =
          cme::game_moments(f.post, cme::embedding_batch(f.post, design, X, f.lambda));
      const auto full = design.full_index();
      for (Eigen::Index k = 0; k < X.rows(); ++k) {
        const auto &g = games[static_cast<std::size_t>(k)];
        worst_mean = std::max(worst_mean, std::abs(batch.means.row(k).sum() -
                                                   (g.payoff_mean[full] - g.payoff_mean[0])));
        const double var = g.payoff_cov(full, full) + g.payoff_cov(0, 0) - 2 * g.payoff_cov(0, full);
        worst_cov = std::max(worst_cov, std::abs(batch.cov(k).sum() - var));
      }
    }
  }
  return {worst_mean <= 1e-10 && worst_cov <= 1e-8,
          "mean gap " + fmt(worst_mean) + " (tol 1e-10), variance gap " + fmt(worst_cov) +
              " (tol 1e-8)"};
}

Outcome criterion4() {
  auto data = selftest::synthetic_regression(80, 4, 0.1, 4);
  data.X.col(2).setConstant(1.0);
  const auto sel = gp::select_hyperparameters(data, gp::default_grid(data));
  const auto post = gp::fit_exact(data, sel.best.kernel, sel.best.noise,
                                  {40, InducingStrategy::FarthestPoint, 0});
  const auto &b = keep(explain::gpshap(post, coalition::enumerate_coalitions(4),
                                       data.X.topRows(10), cme::default_lambda(40)));
  double mean = b.means.col(2).cwiseAbs().maxCoeff(), var = 0;
  for (Eigen::Index k = 0; k < b.num_instances(); ++k) var = std::max(var, b.cov(k)(2, 2));
  return {mean < 1e-8 && var < 1e-8, "max |mean| " + fmt(mean) + ", max variance " + fmt(var)};
}

Outcome criterion5() {
  const auto base = selftest::synthetic_regression(80, 3, 0.1, 5);
  Matrix X(base.X.rows(), 4);
  X << base.X, base.X.col(1);
  const Dataset data{X, base.y, {}};
  const KernelParams kernel{1.0, Vector::Constant(4, 1.5)};
  const auto post = gp::fit_exact(data, kernel, 0.01, {40, InducingStrategy::FarthestPoint, 0});
  const auto &b = keep(explain::gpshap(post, coalition::enumerate_coalitions(4), X.topRows(10),
                                       cme::default_lambda(40)));
  double dm = max_abs(b.means.col(1) - b.means.col(3)), dv = 0;
  for (Eigen::Index k = 0; k < b.num_instances(); ++k)
    dv = std::max(dv, std::abs(b.cov(k)(1, 1) - b.cov(k)(3, 3)));
  return {dm <= 1e-8 && dv <= 1e-8, "mean gap " + fmt(dm) + ", variance gap " + fmt(dv)};
}

Outcome criterion6() {
  const auto design = coalition::enumerate_coalitions(2);
  StochasticGame g{(Vector(4) << 0, 1, 0, 2).finished(), Matrix::Zero(4, 4)};
  g.payoff_cov(1, 1) = 1;
  g.payoff_cov(2, 2) = 1;
  g.payoff_cov(3, 3) = 2;
  g.payoff_cov(1, 3) = g.payoff_cov(3, 1) = 1;
  const Vector v = coalition::exact_ssv(design, g).cov.diagonal();
  const Vector w = coalition::shapley_of_variance_game(design, g);
  const double gap = (v - w).cwiseAbs().maxCoeff();
  const bool values = std::abs(v[0] - 1.5) < 1e-12 && std::abs(w[0] - 1.0) < 1e-12;
  return {gap > 0.1 && values, "Var(phi_1) " + fmt(v[0]) + " vs variance-game value " +
                                   fmt(w[0]) + ", sup gap " + fmt(gap)};
}

Outcome criterion7() {
  const auto f = fixture(60, 5, 30, 7);
  const Matrix X = f.data.X.topRows(6);
  double worst = 0, reduce = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto design = coalition::sample_coalitions(5, 14, seed);
    const auto &gp = keep(explain::gpshap(f.post, design, X, f.lambda));
    const auto &bg = keep(explain::bayesgpshap(f.post, design, X, f.lambda, {0.1, 0.1, seed}));
    const Matrix T = explain::bayes_term(design);
    for (Eigen::Index k = 0; k < X.rows(); ++k)
      worst = std::max(worst, max_abs(bg.cov(k) - gp.cov(k) - T * (*bg.sigma2)[k]));
  }
  GPPosterior zero = f.post;
  zero.cov_at_inducing.setZero();
  for (const auto &design : {coalition::enumerate_coalitions(5), coalition::sample_coalitions(5, 20, 1)}) {
    const BayesConfig cfg{0.1, 0.1, 11};
    const auto &bg = keep(explain::bayesgpshap(zero, design, X, f.lambda, cfg));
    const auto &bs = keep(explain::bayesshap_deterministic(bg.payoff_means, design, cfg));
    reduce = std::max(reduce, max_abs(bg.means - bs.means));
    for (Eigen::Index k = 0; k < X.rows(); ++k) reduce = std::max(reduce, max_abs(bg.cov(k) - bs.cov(k)));
  }
  return {worst <= 1e-10 && reduce == 0.0,
          "decomposition gap " + fmt(worst) + " (tol 1e-10), zero-posterior gap " + fmt(reduce)};
}

Outcome criterion8() {
  const int d = 8;
  const auto f = fixture(100, d, 50, 8);
  const Matrix x = f.data.X.topRows(1);
  const auto full = coalition::enumerate_coalitions(d);
  const Vector v = explain::gpshap(f.post, full, x, f.lambda).payoff_means.col(0);
  std::unordered_map<FeatureSubset::Mask, Eigen::Index> where;
  for (Eigen::Index j = 0; j < full.size(); ++j) where[full.masks[static_cast<std::size_t>(j)]] = j;

  std::vector<double> log_l, log_var;
  std::ostringstream detail;
  for (int ell : {16, 32, 64, 128}) {
    Matrix est(30, d);
    for (int r = 0; r < 30; ++r) {
      const auto design = coalition::sample_coalitions(d, ell, 7919u * ell + r);
      Vector sub(design.size());
      for (Eigen::Index j = 0; j < design.size(); ++j)
        sub[j] = v[where.at(design.masks[static_cast<std::size_t>(j)])];
      est.row(r) = (design.A * sub).transpose();
    }
    const Eigen::RowVectorXd mean = est.colwise().mean();
    const double var = (est.rowwise() - mean).squaredNorm() / (29.0 * d);
    log_l.push_back(std::log(ell));
    log_var.push_back(std::log(var));
    detail << "var(" << ell << ")=" << fmt(var) << ' ';
  }
  const double n = 4.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    sx += log_l[i];
    sy += log_var[i];
    sxx += log_l[i] * log_l[i];
    sxy += log_l[i] * log_var[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  detail << "slope " << fmt(slope) << " (in [-1.3, -0.7])";
  return {slope >= -1.3 && slope <= -0.7, detail.str()};
}

Outcome criterion9() {
  double worst = 0;
  for (std::uint64_t m = 0; m < 20; ++m) {
    const int d = 1 + static_cast<int>(m % 4);
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(m % 9);
    ExplanationDataset data;
    data.X = selftest::synthetic_regression(n, std::max(d, 1), 0.0, 500 + m).X.leftCols(d);
    boost::random::mt19937_64 rng(900 + m);
    boost::random::normal_distribution<double> n01;
    data.Phi.resize(n, d);
    for (Eigen::Index i = 0; i < data.Phi.size(); ++i) data.Phi.data()[i] = n01(rng);
    const Matrix anchors = selftest::synthetic_regression(12, std::max(d, 1), 0.0, 700 + m).X.leftCols(d);
    const auto design = d <= 3 ? coalition::enumerate_coalitions(d)
                               : coalition::sample_coalitions(d, 10, m);
    const auto model = ShapleyPriorModel::fit(data, anchors, {1.0, Vector::Constant(d, 1.3)},
                                              design, 0.01, 0.05);
    for (int t = 0; t < 3; ++t) {
      const Vector x = selftest::synthetic_regression(1, std::max(d, 1), 0.0, 1000 * m + t)
                           .X.row(0).head(d).transpose();
      worst = std::max(worst, max_abs(design.A * model.induced_payoff(x) - model.predict(x).mean));
    }
  }

  const auto f = fixture(150, 4, 50, 9);
  const auto design = coalition::enumerate_coalitions(4);
  const auto &batch = keep(explain::gpshap(f.post, design, f.data.X, f.lambda));
  const Eigen::Index n_train = 100, n_test = 50;
  ExplanationDataset train{f.data.X.topRows(n_train), batch.means.topRows(n_train)};
  const double mean_phi = train.Phi.mean();
  const double var_phi = (train.Phi.array() - mean_phi).square().mean();
  const auto model = ShapleyPriorModel::fit(train, f.post.inducing_points, f.post.kernel, design,
                                            f.lambda, 1e-2 * var_phi);
  const Eigen::RowVectorXd baseline = train.Phi.colwise().mean();
  double se_model = 0, se_base = 0;
  Matrix pred_means(n_test, 4);
  std::vector<Matrix> pred_factors;
  for (Eigen::Index k = 0; k < n_test; ++k) {
    const auto p = model.predict(f.data.X.row(n_train + k).transpose());
    const Eigen::RowVectorXd truth = batch.means.row(n_train + k);
    se_model += (p.mean.transpose() - truth).squaredNorm();
    se_base += (baseline - truth).squaredNorm();
    pred_means.row(k) = p.mean.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(p.cov);
    pred_factors.push_back(eig.eigenvectors() *
                           eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal());
  }
  ExplanationBatch predicted;
  predicted.algorithm = "shapley_prior";
  predicted.means = pred_means;
  predicted.cov_factor = pred_factors;
  keep(std::move(predicted));
  const double rmse_model = std::sqrt(se_model / (n_test * 4.0));
  const double rmse_base = std::sqrt(se_base / (n_test * 4.0));
  const double gain = 1.0 - rmse_model / rmse_base;
  return {worst <= 1e-8 && gain >= 0.2,
          "identity gap " + fmt(worst) + " (tol 1e-8); RMSE " + fmt(rmse_model) + " vs baseline " +
              fmt(rmse_base) + ", improvement " + fmt(100 * gain) + "% (>= 20%)"};
}

Outcome criterion10() {
  double worst = 0;
  std::uint64_t seed = 0;
  for (double mu : {-2.0, -1.0, 0.0, 1.0, 2.0})
    for (double sigma : {0.5, 1.0, 2.0})
      worst = std::max(worst, std::abs(analysis::folded_mean(mu, sigma) -
                                       selftest::folded_mean_monte_carlo(mu, sigma, 1000000, ++seed)));
  double jensen = 0;
  for (const auto &b : g_batches) {
    const auto g = analysis::global_importance(b);
    jensen = std::min(jensen, (g.mean_abs_ssv - g.abs_mean_ssv).minCoeff());
  }
  return {worst <= 1e-3 && jensen >= 0.0,
          "max |analytic - MC| " + fmt(worst) + " (tol 1e-3); min Jensen gap " + fmt(jensen) +
              " over " + std::to_string(g_batches.size()) + " batches"};
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ssvkit");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

Outcome criterion11() {
  std::size_t checked = 0, bad = 0;
  for (const auto &b : g_batches)
    for (Eigen::Index k = 0; k < b.num_instances(); ++k) {
      ++checked;
      if (!numerics::is_psd(b.cov(k), 1e-8)) ++bad;
    }

  const auto dir = fs::temp_directory_path() / "ssvkit_acceptance";
  fs::create_directories(dir);
  const auto data = selftest::synthetic_regression(60, 5, 0.1, 11);
  std::ostringstream csv;
  csv << "a,b,c,d,e,y\n";
  for (Eigen::Index r = 0; r < data.X.rows(); ++r) {
    for (int i = 0; i < 5; ++i) csv << io::format_double(data.X(r, i)) << ',';
    csv << io::format_double(data.y[r]) << '\n';
  }
  const std::string data_csv = (dir / "data.csv").string();
  io::write_text(data_csv, csv.str());

  bool identical = true;
  std::string first_diff;
  std::vector<std::string> names{"post", "ex_gp", "ex_bgp", "ex_bs", "pred", "an"};
  for (const auto &threads : {std::string("1"), std::string("4")}) {
    auto p = [&](const std::string &n) { return (dir / (n + "_t" + threads + ".json")).string(); };
    bool ok = cli({"fit", "--data", data_csv, "--inducing", "30", "--seed", "3", "--threads", threads, "--out", p("post")}) == 0;
    ok = ok && cli({"explain", "--posterior", p("post"), "--instances", data_csv, "--seed", "5",
                    "--threads", threads, "--out", p("ex_gp")}) == 0;
    ok = ok && cli({"explain", "--posterior", p("post"), "--instances", data_csv, "--algo",
                    "bayesgpshap", "--coalitions", "12", "--credible", "0.9", "--seed", "5",
                    "--threads", threads, "--out", p("ex_bgp")}) == 0;
    ok = ok && cli({"explain", "--posterior", p("post"), "--instances", data_csv, "--algo",
                    "bayesshap", "--coalitions", "16", "--seed", "5", "--threads", threads,
                    "--out", p("ex_bs")}) == 0;
    ok = ok && cli({"predict-explain", "--explanations", p("ex_gp"), "--instances", data_csv,
                    "--posterior", p("post"), "--seed", "5", "--threads", threads, "--out", p("pred")}) == 0;
    ok = ok && cli({"analyze", "--explanations", p("ex_bgp"), "--folded-draws", "5000", "--seed",
                    "5", "--threads", threads, "--out", p("an")}) == 0;
    if (!ok) return {false, "CLI run failed with --threads " + threads};
  }
  for (const auto &n : names) {
    const auto a = io::read_text((dir / (n + "_t1.json")).string());
    const auto b = io::read_text((dir / (n + "_t4.json")).string());
    if (a != b && first_diff.empty()) first_diff = n;
    identical = identical && a == b;
  }
  // Emitted covariances from the CLI files as well.
  for (const auto &n : {"ex_gp", "ex_bgp", "ex_bs", "pred"}) {
    const auto t = io::table_from_json(io::Json::parse(io::read_text((dir / (std::string(n) + "_t1.json")).string())));
    for (const auto &c : t.cov) {
      ++checked;
      if (!numerics::is_psd(c, 1e-8)) ++bad;
    }
  }
  return {bad == 0 && identical,
          std::to_string(checked) + " covariances checked, " + std::to_string(bad) +
              " not PSD; outputs " + (identical ? "identical" : "differ (" + first_diff + ")") +
              " across thread counts"};
}

} // namespace

int main() {
  struct Criterion {
    const char *name;
    double budget_seconds; // 0: no runtime bound
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"exact-SSV oracle equivalence", 5, criterion1},
      {"Monte-Carlo posterior oracle", 60, criterion2},
      {"efficiency", 0, criterion3},
      {"null player", 0, criterion4},
      {"symmetry", 0, criterion5},
      {"variance separation", 0, criterion6},
      {"variance decomposition", 0, criterion7},
      {"subsampling rate", 120, criterion8},
      {"Shapley prior", 60, criterion9},
      {"folded mean", 0, criterion10},
      {"numerical hygiene", 0, criterion11},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto &c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = o.passed;
    std::string timing = fmt(secs) + " s";
    if (c.budget_seconds > 0) {
      timing += " (budget " + fmt(c.budget_seconds) + " s)";
      pass = pass && secs < c.budget_seconds;
    }
    failures += pass ? 0 : 1;
    std::cout << (pass ? "PASS" : "FAIL") << "  [" << i + 1 << "] " << c.name << ": " << o.detail
              << "; " << timing << std::endl;
  }
  std::cout << (failures == 0 ? "all acceptance criteria passed"
                              : std::to_string(failures) + " acceptance criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
