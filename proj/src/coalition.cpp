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

#include "ssvkit/coalition.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <set>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace ssvkit {

namespace {

using Mask = FeatureSubset::Mask;

Mask full_mask(int d) { return d >= 32 ? ~Mask{0} : ((Mask{1} << d) - 1u); }

bool coalition_less(Mask a, Mask b) {
  const int pa = std::popcount(a), pb = std::popcount(b);
  return pa != pb ? pa < pb : a < b;
}

double binomial(int n, int k) {
  return boost::math::binomial_coefficient<double>(static_cast<unsigned>(n),
                                                   static_cast<unsigned>(k));
}

void check_dim(int d) {
  if (d < 1) fail(ErrorKind::InvalidArgument, "need at least one feature");
  if (d > kMaxFeatures)
    fail(ErrorKind::DimensionTooLarge,
         "at most " + std::to_string(kMaxFeatures) + " features are supported");
}

struct Fnv1a {
  std::uint64_t h = 1469598103934665603ull;
  void bytes(const void *p, std::size_t n) {
    const auto *c = static_cast<const unsigned char *>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= c[i];
      h *= 1099511628211ull;
    }
  }
  template <typename T> void value(const T &v) { bytes(&v, sizeof(T)); }
};

// Index of every mask in a full enumeration, or throws.
std::vector<Eigen::Index> full_enumeration_index(const CoalitionDesign &design) {
  if (design.d > kMaxOracleDim)
    fail(ErrorKind::DimensionTooLarge,
         "exact Shapley oracle supports d <= " + std::to_string(kMaxOracleDim));
  if (!design.is_full_enumeration())
    fail(ErrorKind::DesignMismatch, "exact oracle needs all 2^d coalitions");
  std::vector<Eigen::Index> pos(std::size_t{1} << design.d);
  for (Eigen::Index j = 0; j < design.size(); ++j)
    pos[design.masks[static_cast<std::size_t>(j)]] = j;
  return pos;
}

// c_s = 1 / (d * C(d-1, s)), the weight of a size-s coalition in the
// marginal-contribution form.
std::vector<double> marginal_weights(int d) {
  std::vector<double> c(static_cast<std::size_t>(d));
  for (int s = 0; s < d; ++s) c[static_cast<std::size_t>(s)] = 1.0 / (d * binomial(d - 1, s));
  return c;
}

} // namespace

bool CoalitionDesign::is_full_enumeration() const {
  if (d > kMaxEnumerationDim) return false;
  if (masks.size() != (std::size_t{1} << d)) return false;
  std::vector<bool> seen(masks.size(), false);
  for (Mask m : masks) {
    if (m >= seen.size() || seen[m]) return false;
    seen[m] = true;
  }
  return true;
}

std::string CoalitionDesign::digest() const {
  Fnv1a f;
  f.value(static_cast<std::int64_t>(d));
  for (Mask m : masks) f.value(m);
  f.bytes(weights.data(), sizeof(double) * static_cast<std::size_t>(weights.size()));
  // Row-major walk so the digest matches the serialized layout.
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) f.value(A(i, j));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(f.h));
  return buf;
}

namespace coalition {

double shapley_kernel_weight(int d, int s) {
  if (s <= 0 || s >= d)
    fail(ErrorKind::BoundaryCoalition,
         "boundary coalitions have infinite weight; they are constraints");
  return (d - 1.0) / (binomial(d, s) * s * (d - s));
}

Matrix build_projection(int d, const std::vector<Mask> &masks,
                        const Vector &weights) {
  check_dim(d);
  const Eigen::Index ell = static_cast<Eigen::Index>(masks.size());
  if (weights.size() != ell)
    fail(ErrorKind::DimensionMismatch, "one weight per coalition is required");
  const Mask full = full_mask(d);
  Eigen::Index empty_pos = -1, full_pos = -1;
  std::vector<Eigen::Index> interior;
  for (Eigen::Index j = 0; j < ell; ++j) {
    const Mask m = masks[static_cast<std::size_t>(j)];
    if (m == 0u) empty_pos = j;
    else if (m == full) full_pos = j;
    else interior.push_back(j);
  }
  if (empty_pos < 0 || full_pos < 0)
    fail(ErrorKind::InvalidArgument,
         "design must contain the empty and grand coalitions");

  Matrix A = Matrix::Zero(d, ell);
  if (d == 1 || interior.empty()) {
    A.col(full_pos).setConstant(1.0 / d);
    A.col(empty_pos).setConstant(-1.0 / d);
    return A;
  }

  // Eliminate phi_0 = v_empty and phi_{d-1} = T - sum_{i<d-1} phi_i, where
  // T = v_full - v_empty. The reduced unknowns see regressors
  // z_ji - z_j,d-1 and targets (v_j - v_empty) - z_j,d-1 T.
  const Eigen::Index m = static_cast<Eigen::Index>(interior.size());
  const int r = d - 1;
  Matrix Zr(m, r);
  Vector z_last(m), w(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const Mask mask = masks[static_cast<std::size_t>(interior[static_cast<std::size_t>(a)])];
    const double last = (mask >> (d - 1)) & 1u;
    z_last[a] = last;
    for (int i = 0; i < r; ++i) Zr(a, i) = static_cast<double>((mask >> i) & 1u) - last;
    w[a] = weights[interior[static_cast<std::size_t>(a)]];
    if (!(w[a] > 0.0) || !std::isfinite(w[a]))
      fail(ErrorKind::InvalidArgument, "interior weights must be positive");
  }
  const Matrix ZrtW = Zr.transpose() * w.asDiagonal();
  const Matrix M = numerics::symmetrize(ZrtW * Zr);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(M, Eigen::EigenvaluesOnly);
  const double lmax = eig.eigenvalues().maxCoeff();
  const double lmin = eig.eigenvalues().minCoeff();
  if (!(lmax > 0.0) || lmin <= 1e-10 * lmax)
    fail(ErrorKind::SingularSystem,
         "coalition design is rank deficient; sample more distinct coalitions");
  const Eigen::LLT<Matrix> llt(M);
  if (llt.info() != Eigen::Success)
    fail(ErrorKind::SingularSystem, "reduced regression system is not positive definite");
  const Matrix P = llt.solve(ZrtW); // r x m

  const Vector p_last = P * z_last;
  const Vector p_ones = P.rowwise().sum();
  for (Eigen::Index a = 0; a < m; ++a)
    A.block(0, interior[static_cast<std::size_t>(a)], r, 1) = P.col(a);
  A.block(0, full_pos, r, 1) = -p_last;
  A.block(0, empty_pos, r, 1) = p_last - p_ones;
  A.row(r) = -A.topRows(r).colwise().sum();
  A(r, full_pos) += 1.0;
  A(r, empty_pos) -= 1.0;
  return A;
}

CoalitionDesign make_design(int d, std::vector<Mask> masks,
                            const std::vector<double> &multiplicity) {
  check_dim(d);
  if (!multiplicity.empty() && multiplicity.size() != masks.size())
    fail(ErrorKind::DimensionMismatch, "one multiplicity per coalition is required");
  const Mask full = full_mask(d);
  std::vector<std::pair<Mask, double>> rows;
  rows.reserve(masks.size());
  for (std::size_t j = 0; j < masks.size(); ++j) {
    if ((masks[j] & ~full) != 0u)
      fail(ErrorKind::InvalidArgument, "coalition mask exceeds dimension");
    rows.emplace_back(masks[j], multiplicity.empty() ? 1.0 : multiplicity[j]);
  }
  std::sort(rows.begin(), rows.end(),
            [](const auto &a, const auto &b) { return coalition_less(a.first, b.first); });
  for (std::size_t j = 1; j < rows.size(); ++j)
    if (rows[j].first == rows[j - 1].first)
      fail(ErrorKind::InvalidArgument, "duplicate coalition in design");
  if (rows.size() < 2 || rows.front().first != 0u || rows.back().first != full)
    fail(ErrorKind::InvalidArgument,
         "design must contain the empty and grand coalitions");

  CoalitionDesign design;
  design.d = d;
  const Eigen::Index ell = static_cast<Eigen::Index>(rows.size());
  design.masks.resize(rows.size());
  design.Z = Matrix::Zero(ell, d);
  design.weights = Vector::Zero(ell);
  for (Eigen::Index j = 0; j < ell; ++j) {
    const auto &[mask, mult] = rows[static_cast<std::size_t>(j)];
    design.masks[static_cast<std::size_t>(j)] = mask;
    for (int i = 0; i < d; ++i) design.Z(j, i) = (mask >> i) & 1u;
    if (j != 0 && j != ell - 1)
      design.weights[j] = mult * shapley_kernel_weight(d, std::popcount(mask));
  }
  design.ZtWZ_interior = numerics::symmetrize(
      design.Z.transpose() * design.weights.asDiagonal() * design.Z);
  design.A = build_projection(d, design.masks, design.weights);
  return design;
}

CoalitionDesign enumerate_coalitions(int d) {
  check_dim(d);
  if (d > kMaxEnumerationDim)
    fail(ErrorKind::DimensionTooLarge,
         "full enumeration is capped at d = " + std::to_string(kMaxEnumerationDim));
  std::vector<Mask> masks(std::size_t{1} << d);
  for (std::size_t m = 0; m < masks.size(); ++m) masks[m] = static_cast<Mask>(m);
  return make_design(d, std::move(masks));
}

CoalitionDesign sample_coalitions(int d, std::int64_t count, std::uint64_t seed) {
  check_dim(d);
  if (count < 2)
    fail(ErrorKind::CountOutOfRange, "need at least two coalitions");
  boost::random::mt19937_64 rng(seed);
  const Mask full = full_mask(d);
  std::vector<Mask> masks{0u, full};
  std::vector<double> mult{1.0, 1.0};

  if (d <= kMaxEnumerationDim) {
    const std::int64_t interior = (std::int64_t{1} << d) - 2;
    if (count - 2 > interior)
      fail(ErrorKind::CountOutOfRange,
           "cannot draw " + std::to_string(count) + " distinct coalitions for d = " +
               std::to_string(d));
    // Floyd's algorithm over interior masks 1 .. 2^d - 2.
    std::set<std::int64_t> chosen;
    for (std::int64_t j = interior - (count - 2); j < interior; ++j) {
      boost::random::uniform_int_distribution<std::int64_t> pick(0, j);
      const std::int64_t t = pick(rng);
      if (!chosen.insert(t).second) chosen.insert(j);
    }
    for (std::int64_t t : chosen) {
      masks.push_back(static_cast<Mask>(t + 1));
      mult.push_back(1.0);
    }
  } else {
    std::map<Mask, double> drawn;
    boost::random::uniform_int_distribution<std::uint64_t> pick(1, std::uint64_t{full} - 1);
    for (std::int64_t j = 0; j < count - 2; ++j)
      drawn[static_cast<Mask>(pick(rng))] += 1.0;
    for (const auto &[mask, k] : drawn) {
      masks.push_back(mask);
      mult.push_back(k);
    }
  }
  return make_design(d, std::move(masks), mult);
}

Vector exact_shapley(const CoalitionDesign &design, const Vector &values) {
  const auto pos = full_enumeration_index(design);
  if (values.size() != design.size())
    fail(ErrorKind::DimensionMismatch, "one payoff per coalition is required");
  const int d = design.d;
  const auto c = marginal_weights(d);
  Vector phi = Vector::Zero(d);
  for (int i = 0; i < d; ++i) {
    const Mask bit = Mask{1} << i;
    for (Mask S = 0; S < pos.size(); ++S) {
      if (S & bit) continue;
      phi[i] += c[static_cast<std::size_t>(std::popcount(S))] *
                (values[pos[S | bit]] - values[pos[S]]);
    }
  }
  return phi;
}

SsvMoments exact_ssv(const CoalitionDesign &design, const StochasticGame &game,
                     int threads) {
  const auto pos = full_enumeration_index(design);
  const Eigen::Index ell = design.size();
  if (game.payoff_mean.size() != ell || game.payoff_cov.rows() != ell ||
      game.payoff_cov.cols() != ell)
    fail(ErrorKind::DimensionMismatch, "game does not match design");
  const int d = design.d;
  const auto c = marginal_weights(d);
  const Matrix &cov = game.payoff_cov;

  SsvMoments out;
  out.mean = exact_shapley(design, game.payoff_mean);
  out.cov = Matrix::Zero(d, d);

  // Upper-triangle cells, each reduced independently in a fixed order.
  std::vector<std::pair<int, int>> cells;
  for (int i = 0; i < d; ++i)
    for (int m = i; m < d; ++m) cells.emplace_back(i, m);
  std::vector<double> values(cells.size());
  numerics::parallel_for(cells.size(), threads, [&](std::size_t k) {
    const auto [i, m] = cells[k];
    const Mask bi = Mask{1} << i, bm = Mask{1} << m;
    double acc = 0.0;
    for (Mask S = 0; S < pos.size(); ++S) {
      if (S & bi) continue;
      const Eigen::Index si = pos[S | bi], s0 = pos[S];
      const double cs = c[static_cast<std::size_t>(std::popcount(S))];
      for (Mask T = 0; T < pos.size(); ++T) {
        if (T & bm) continue;
        const Eigen::Index tm = pos[T | bm], t0 = pos[T];
        acc += cs * c[static_cast<std::size_t>(std::popcount(T))] *
               (cov(si, tm) - cov(si, t0) - cov(s0, tm) + cov(s0, t0));
      }
    }
    values[k] = acc;
  });
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto [i, m] = cells[k];
    out.cov(i, m) = values[k];
    out.cov(m, i) = values[k];
  }
  return out;
}

Vector shapley_of_variance_game(const CoalitionDesign &design,
                                const StochasticGame &game) {
  if (game.payoff_cov.rows() != design.size())
    fail(ErrorKind::DimensionMismatch, "game does not match design");
  return exact_shapley(design, game.payoff_cov.diagonal());
}

} // namespace coalition
} // namespace ssvkit
