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

#include <doctest.h>

#include "helpers.hpp"
#include "ssvkit/coalition.hpp"
#include "ssvkit/error.hpp"
#include "ssvkit/shapley_prior.hpp"

using namespace ssvkit;
using ssvkit::testing::max_abs;

namespace {

struct Setup {
  ExplanationDataset data;
  Matrix anchors;
  KernelParams kernel;
  CoalitionDesign design;
};

Setup make_setup(Eigen::Index n, int d, std::uint64_t seed) {
  Setup s;
  s.data.X = ssvkit::testing::random_uniform(n, d, -2, 2, seed);
  s.data.Phi = ssvkit::testing::random_matrix(n, d, seed + 1);
  s.anchors = ssvkit::testing::random_uniform(8, d, -2, 2, seed + 2);
  s.kernel = {1.0, Vector::Constant(d, 1.0)};
  s.design = coalition::enumerate_coalitions(d);
  return s;
}

} // namespace

TEST_CASE("kappa is symmetric and PSD") {
  const auto s = make_setup(5, 3, 1);
  const auto m = ShapleyPriorModel::fit(s.data, s.anchors, s.kernel, s.design, 0.01, 0.1);
  const Vector x = s.data.X.row(0).transpose(), y = s.data.X.row(1).transpose();
  CHECK(max_abs(m.kappa(x, y) - m.kappa(y, x).transpose()) < 1e-12);
  CHECK(numerics::is_psd(m.kappa(x, x)));
  CHECK(numerics::is_psd(m.training_gram()));
}

TEST_CASE("single feature kappa is the payoff-difference kernel") {
  auto s = make_setup(4, 1, 2);
  const auto m = ShapleyPriorModel::fit(s.data, s.anchors, s.kernel, s.design, 0.05, 0.1);
  const Vector x = s.data.X.row(0).transpose(), y = s.data.X.row(1).transpose();
  cme::EmbeddingOperator op(s.anchors, s.kernel, 0.05);
  const Matrix bx = op.weights(FeatureSubset::full(1), x.transpose()) -
                    op.weights(FeatureSubset::empty(1), x.transpose());
  const Matrix by = op.weights(FeatureSubset::full(1), y.transpose()) -
                    op.weights(FeatureSubset::empty(1), y.transpose());
  const Matrix K = kernels::gram(s.kernel, s.anchors, s.anchors);
  CHECK(m.kappa(x, y)(0, 0) == doctest::Approx((bx.transpose() * K * by)(0, 0)).epsilon(1e-12));
  const auto p = m.predict(x);
  const Vector v = m.induced_payoff(x);
  CHECK(std::abs(v[1] - v[0] - p.mean[0]) < 1e-10);
}

TEST_CASE("empty training set gives the prior") {
  auto s = make_setup(0, 2, 3);
  s.data.X.resize(0, 2);
  s.data.Phi.resize(0, 2);
  const auto m = ShapleyPriorModel::fit(s.data, s.anchors, s.kernel, s.design, 0.01, 0.1);
  CHECK(m.alpha().size() == 0);
  const Vector x = Vector::Constant(2, 0.3);
  const auto p = m.predict(x);
  CHECK(max_abs(p.mean) == 0.0);
  CHECK(max_abs(p.cov - m.kappa(x, x)) < 1e-14);
  CHECK(max_abs(m.induced_payoff(x)) == 0.0);
}

TEST_CASE("identity, efficiency and shrinkage") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const int d = 1 + static_cast<int>(seed % 4);
    const auto s = make_setup(3 + static_cast<Eigen::Index>(seed % 7), d, 50 + seed);
    const auto m = ShapleyPriorModel::fit(s.data, s.anchors, s.kernel, s.design, 0.02, 0.05);
    const Vector x = ssvkit::testing::random_uniform(d, 1, -2, 2, seed).col(0);
    const auto p = m.predict(x);
    const Vector v = m.induced_payoff(x);
    CHECK(max_abs(s.design.A * v - p.mean) < 1e-8);
    CHECK(std::abs(p.mean.sum() - (v[s.design.full_index()] - v[0])) < 1e-8);
    CHECK(numerics::is_psd(p.cov));
    CHECK(numerics::is_psd(m.kappa(x, x) - p.cov + 1e-8 * Matrix::Identity(d, d)));
  }
}

TEST_CASE("far from data only the empty-coalition embedding remains") {
  // k over the empty coalition is constant, so the prediction tends to a
  // limit shared by every distant input rather than to zero.
  const auto s = make_setup(6, 2, 7);
  const auto m = ShapleyPriorModel::fit(s.data, s.anchors, s.kernel, s.design, 0.01, 0.1);
  const Vector far1 = Vector::Constant(2, 60.0);
  const Vector far2 = (Vector(2) << -75.0, 90.0).finished();
  const auto p1 = m.predict(far1), p2 = m.predict(far2);
  CHECK(max_abs(p1.mean - p2.mean) < 1e-10);
  CHECK(max_abs(p1.cov - p2.cov) < 1e-10);
  CHECK(max_abs(m.kappa(far1, far1) - m.kappa(far2, far2)) < 1e-10);
  CHECK(numerics::is_psd(m.kappa(far1, far1) - p1.cov + 1e-8 * Matrix::Identity(2, 2)));
}

TEST_CASE("interpolation at small noise") {
  auto s = make_setup(3, 2, 9);
  s.anchors = ssvkit::testing::random_uniform(30, 2, -2, 2, 99);
  const auto m = ShapleyPriorModel::fit(s.data, s.anchors, s.kernel, s.design, 1e-6, 1e-10);
  for (Eigen::Index a = 0; a < 3; ++a)
    CHECK(max_abs(m.predict(s.data.X.row(a).transpose()).mean - s.data.Phi.row(a).transpose()) < 1e-3);
}

TEST_CASE("training order and linearity") {
  const auto s = make_setup(5, 3, 11);
  const auto m = ShapleyPriorModel::fit(s.data, s.anchors, s.kernel, s.design, 0.01, 0.1);
  ExplanationDataset rev = s.data;
  rev.X = s.data.X.colwise().reverse();
  rev.Phi = s.data.Phi.colwise().reverse();
  const auto mr = ShapleyPriorModel::fit(rev, s.anchors, s.kernel, s.design, 0.01, 0.1);
  for (Eigen::Index a = 0; a < 5; ++a)
    CHECK(max_abs(m.alpha().segment(3 * a, 3) - mr.alpha().segment(3 * (4 - a), 3)) < 1e-10);
  const Vector x = Vector::Constant(3, 0.2);
  CHECK(max_abs(m.predict(x).mean - mr.predict(x).mean) < 1e-10);

  ExplanationDataset other = s.data, sum = s.data;
  other.Phi = ssvkit::testing::random_matrix(5, 3, 77);
  sum.Phi = s.data.Phi + other.Phi;
  const auto mo = ShapleyPriorModel::fit(other, s.anchors, s.kernel, s.design, 0.01, 0.1);
  const auto ms = ShapleyPriorModel::fit(sum, s.anchors, s.kernel, s.design, 0.01, 0.1);
  CHECK(max_abs(ms.predict(x).mean - m.predict(x).mean - mo.predict(x).mean) < 1e-10);
}

TEST_CASE("system size cap and validation") {
  const auto s = make_setup(5, 3, 13);
  ShapleyPriorModel::Options o;
  o.max_system = 10;
  CHECK_THROWS_AS(ShapleyPriorModel::fit(s.data, s.anchors, s.kernel, s.design, 0.01, 0.1, o), Error);
  ExplanationDataset bad = s.data;
  bad.Phi.conservativeResize(5, 2);
  CHECK_THROWS_AS(ShapleyPriorModel::fit(bad, s.anchors, s.kernel, s.design, 0.01, 0.1), Error);
  CHECK(shapley_prior::default_anchors(s.data.X, 3).rows() == 3);
}
