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

#include <algorithm>
#include <set>

#include <doctest.h>

#include "helpers.hpp"
#include "ssvkit/coalition.hpp"
#include "ssvkit/error.hpp"
#include "ssvkit/selftest.hpp"

using namespace ssvkit;
using ssvkit::testing::max_abs;

namespace {

// The d = 2 game used throughout: ordering {}, {1}, {2}, {1,2}.
StochasticGame two_player_game() {
  StochasticGame g;
  g.payoff_mean = (Vector(4) << 0, 1, 0, 2).finished();
  g.payoff_cov = Matrix::Zero(4, 4);
  g.payoff_cov(1, 1) = 1;
  g.payoff_cov(2, 2) = 1;
  g.payoff_cov(3, 3) = 2;
  g.payoff_cov(1, 3) = g.payoff_cov(3, 1) = 1;
  return g;
}

} // namespace

TEST_CASE("shapley kernel weights") {
  CHECK(coalition::shapley_kernel_weight(3, 1) == doctest::Approx(1.0 / 3));
  CHECK(coalition::shapley_kernel_weight(3, 2) == doctest::Approx(1.0 / 3));
  CHECK(coalition::shapley_kernel_weight(4, 2) == doctest::Approx(0.125));
  CHECK_THROWS_AS(coalition::shapley_kernel_weight(3, 0), Error);
  CHECK_THROWS_AS(coalition::shapley_kernel_weight(3, 3), Error);
}

TEST_CASE("enumeration") {
  const auto d1 = coalition::enumerate_coalitions(1);
  CHECK(d1.size() == 2);
  CHECK(max_abs(d1.A - (Matrix(1, 2) << -1, 1).finished()) < 1e-15);

  const auto d2 = coalition::enumerate_coalitions(2);
  CHECK(d2.size() == 4);
  CHECK(d2.masks == std::vector<FeatureSubset::Mask>{0, 1, 2, 3});
  const Vector phi = d2.A * two_player_game().payoff_mean;
  CHECK(phi[0] == doctest::Approx(1.5));
  CHECK(phi[1] == doctest::Approx(0.5));

  try {
    coalition::enumerate_coalitions(21);
    FAIL("expected throw");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::DimensionTooLarge);
  }
}

TEST_CASE("sampled designs") {
  const auto bare = coalition::sample_coalitions(4, 2, 1);
  CHECK(bare.size() == 2);
  const Vector v = (Vector(2) << 1.0, 3.0).finished();
  CHECK(max_abs(bare.A * v - Vector::Constant(4, 0.5)) < 1e-14);

  const auto all = coalition::sample_coalitions(4, 16, 5);
  CHECK(all.masks == coalition::enumerate_coalitions(4).masks);
  CHECK(all.is_full_enumeration());

  const auto a = coalition::sample_coalitions(6, 20, 9);
  const auto b = coalition::sample_coalitions(6, 20, 9);
  CHECK(a.masks == b.masks);
  CHECK(a.digest() == b.digest());
  CHECK(std::set<FeatureSubset::Mask>(a.masks.begin(), a.masks.end()).size() == 20);
  CHECK_THROWS_AS(coalition::sample_coalitions(3, 9, 0), Error);
  CHECK_THROWS_AS(coalition::sample_coalitions(3, 1, 0), Error);

  // Above the enumeration cap duplicates are merged.
  const auto big = coalition::sample_coalitions(24, 50, 3);
  CHECK(big.size() <= 50);
  CHECK(big.masks.front() == 0u);
  CHECK(big.masks.back() == (1u << 24) - 1);
  CHECK(max_abs(big.A.colwise().sum().transpose().segment(1, big.size() - 2)) < 1e-9);
}

TEST_CASE("projection on simple games") {
  for (int d = 2; d <= 6; ++d) {
    const auto design = coalition::enumerate_coalitions(d);
    CHECK(max_abs(design.A * Vector::Constant(design.size(), 3.7)) < 1e-12);
    const Vector a = Vector::LinSpaced(d, -1.0, 2.0);
    const Vector v = design.Z * a;
    CHECK(max_abs(design.A * v - a) < 1e-10);
  }
}

TEST_CASE("projection matches brute-force Shapley values") {
  for (int d = 2; d <= 8; ++d) {
    const auto design = coalition::enumerate_coalitions(d);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto game = selftest::random_game(design, 100 * d + seed);
      CHECK(max_abs(design.A * game.payoff_mean -
                    coalition::exact_shapley(design, game.payoff_mean)) < 1e-8);
    }
  }
}

TEST_CASE("exact ssv on the two-player game") {
  const auto design = coalition::enumerate_coalitions(2);
  const auto game = two_player_game();
  const auto ssv = coalition::exact_ssv(design, game);
  CHECK(ssv.mean[0] == doctest::Approx(1.5));
  CHECK(ssv.mean[1] == doctest::Approx(0.5));
  CHECK(ssv.cov(0, 0) == doctest::Approx(1.5));
  const Vector var_game = coalition::shapley_of_variance_game(design, game);
  CHECK(var_game[0] == doctest::Approx(1.0));
  CHECK(var_game[1] == doctest::Approx(1.0));
  CHECK(std::abs(ssv.cov(0, 0) - var_game[0]) > 0.1);

  StochasticGame det{game.payoff_mean, Matrix::Zero(4, 4)};
  const auto s0 = coalition::exact_ssv(design, det);
  CHECK(max_abs(s0.cov) == 0.0);
  CHECK(max_abs(s0.mean - design.A * det.payoff_mean) < 1e-14);
  CHECK(max_abs(coalition::shapley_of_variance_game(design, det)) == 0.0);
}

TEST_CASE("exact ssv symmetry, efficiency and linearity") {
  const auto design = coalition::enumerate_coalitions(3);
  // Features 0 and 1 exchangeable: payoff depends on |S n {0,1}| and on 2.
  Vector mu(8);
  for (int j = 0; j < 8; ++j) {
    const auto m = design.masks[static_cast<std::size_t>(j)];
    mu[j] = 1.3 * std::popcount(m & 3u) + 0.4 * ((m >> 2) & 1u);
  }
  Matrix F = Matrix::Zero(8, 3);
  for (int j = 0; j < 8; ++j) {
    const auto m = design.masks[static_cast<std::size_t>(j)];
    F(j, 0) = std::popcount(m & 3u);
    F(j, 1) = (m >> 2) & 1u;
    F(j, 2) = 1.0;
  }
  const StochasticGame sym{mu, F * F.transpose()};
  const auto s = coalition::exact_ssv(design, sym);
  CHECK(std::abs(s.mean[0] - s.mean[1]) < 1e-12);
  CHECK(std::abs(s.cov(0, 0) - s.cov(1, 1)) < 1e-12);

  const auto g1 = selftest::random_game(design, 1);
  const auto g2 = selftest::random_game(design, 2);
  const auto s1 = coalition::exact_ssv(design, g1);
  const auto s2 = coalition::exact_ssv(design, g2);
  const auto s12 = coalition::exact_ssv(
      design, {g1.payoff_mean + g2.payoff_mean, g1.payoff_cov + g2.payoff_cov});
  CHECK(max_abs(s12.mean - s1.mean - s2.mean) < 1e-12);
  CHECK(max_abs(s12.cov - s1.cov - s2.cov) < 1e-12);

  const double var_diff = g1.payoff_cov(7, 7) + g1.payoff_cov(0, 0) - 2 * g1.payoff_cov(0, 7);
  CHECK(std::abs(s1.mean.sum() - (g1.payoff_mean[7] - g1.payoff_mean[0])) < 1e-10);
  CHECK(std::abs(s1.cov.sum() - var_diff) < 1e-10);
}

TEST_CASE("swapping players swaps attributions") {
  const auto design = coalition::enumerate_coalitions(3);
  const auto g = selftest::random_game(design, 17);
  // Permutation of coalition indices induced by swapping players 0 and 2.
  std::vector<Eigen::Index> perm(8);
  for (int j = 0; j < 8; ++j) {
    auto m = design.masks[static_cast<std::size_t>(j)];
    const auto b0 = m & 1u, b2 = (m >> 2) & 1u;
    m = (m & 2u) | (b0 << 2) | b2;
    perm[static_cast<std::size_t>(j)] =
        std::find(design.masks.begin(), design.masks.end(), m) - design.masks.begin();
  }
  StochasticGame h{Vector(8), Matrix(8, 8)};
  for (int j = 0; j < 8; ++j) {
    h.payoff_mean[perm[j]] = g.payoff_mean[j];
    for (int k = 0; k < 8; ++k) h.payoff_cov(perm[j], perm[k]) = g.payoff_cov(j, k);
  }
  const auto sg = coalition::exact_ssv(design, g);
  const auto sh = coalition::exact_ssv(design, h);
  CHECK(std::abs(sg.mean[0] - sh.mean[2]) < 1e-12);
  CHECK(std::abs(sg.mean[1] - sh.mean[1]) < 1e-12);
  CHECK(std::abs(sg.cov(0, 0) - sh.cov(2, 2)) < 1e-12);
}

TEST_CASE("design bookkeeping") {
  CHECK_THROWS_AS(coalition::make_design(3, {0u, 1u, 2u}), Error); // no full coalition
  const auto d = coalition::make_design(3, {7u, 1u, 0u, 6u, 2u});
  CHECK(d.masks == std::vector<FeatureSubset::Mask>{0, 1, 2, 6, 7});
  CHECK(d.weights[0] == 0.0);
  CHECK(d.weights[4] == 0.0);
  CHECK(d.digest().size() == 16);
  CHECK(d.digest() != coalition::enumerate_coalitions(3).digest());
}
