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

#include "ssvkit/kernels.hpp"

namespace ssvkit {

inline constexpr int kMaxEnumerationDim = 20;
inline constexpr int kMaxOracleDim = 12;

/// A set of coalitions together with the linear map A that sends a payoff
/// vector over those coalitions to Shapley-value estimates.
///
/// Coalitions are sorted by (size, mask); the empty coalition is always row 0
/// and the grand coalition is always the last row. Boundary rows carry weight
/// 0 in `weights`: they enter the regression as equality constraints, not as
/// weighted observations.
struct CoalitionDesign {
  int d = 0;
  std::vector<FeatureSubset::Mask> masks;
  Matrix Z;                 // size() x d, Z(j, i) = 1 iff feature i in S_j
  Vector weights;           // size(), Shapley kernel weight times multiplicity
  Matrix A;                 // d x size()
  Matrix ZtWZ_interior;     // d x d, interior rows only

  Eigen::Index size() const { return static_cast<Eigen::Index>(masks.size()); }
  Eigen::Index empty_index() const { return 0; }
  Eigen::Index full_index() const { return size() - 1; }
  FeatureSubset coalition(Eigen::Index j) const {
    return {masks[static_cast<std::size_t>(j)], d};
  }
  bool is_interior(Eigen::Index j) const {
    return j != empty_index() && j != full_index();
  }
  /// True when every one of the 2^d coalitions is present.
  bool is_full_enumeration() const;
  /// 64-bit FNV-1a digest of d, masks, weights and A, as 16 hex digits.
  std::string digest() const;
};

/// Payoff law of a stochastic game over the coalitions of a design.
struct StochasticGame {
  Vector payoff_mean;
  Matrix payoff_cov;
};

namespace coalition {

/// w(S) = (d - 1) / (C(d, s) s (d - s)) for 0 < s < d.
double shapley_kernel_weight(int d, int s);

/// Constrained weighted least squares projection. Minimizes
///   sum_j w_j (v_j - phi_0 - z_j^T phi)^2   over interior rows
/// subject to phi_0 = v_empty and phi_0 + sum(phi) = v_full, solved exactly by
/// eliminating the constraints. Returns the d x size() matrix mapping v to phi.
///
/// With no interior rows every feature receives an equal share of
/// v_full - v_empty. Throws SingularSystem when the reduced system is rank
/// deficient.
Matrix build_projection(int d, const std::vector<FeatureSubset::Mask> &masks,
                        const Vector &weights);

/// Builds a design from arbitrary masks (must include the empty and grand
/// coalitions). Rows are sorted; `multiplicity` scales interior weights and
/// defaults to 1.
CoalitionDesign make_design(int d, std::vector<FeatureSubset::Mask> masks,
                            const std::vector<double> &multiplicity = {});

/// All 2^d coalitions, for 1 <= d <= 20.
CoalitionDesign enumerate_coalitions(int d);

/// The empty and grand coalitions plus count - 2 interior coalitions drawn
/// uniformly. Draws are without replacement for d <= 20; above that they are
/// with replacement and duplicate rows have their weights summed.
CoalitionDesign sample_coalitions(int d, std::int64_t count, std::uint64_t seed);

/// Deterministic Shapley values by the permutation-weighted marginal
/// contribution formula. Requires a full enumeration with d <= 12.
Vector exact_shapley(const CoalitionDesign &design, const Vector &values);

struct SsvMoments {
  Vector mean;
  Matrix cov;
};

/// Mean and covariance of stochastic Shapley values by explicit summation over
/// pairs of coalitions. Independent of `design.A`; used as the reference
/// oracle for the projection.
SsvMoments exact_ssv(const CoalitionDesign &design, const StochasticGame &game,
                     int threads = 1);

/// Deterministic Shapley values of the variance game S -> Var[nu(S)].
Vector shapley_of_variance_game(const CoalitionDesign &design,
                                const StochasticGame &game);

} // namespace coalition
} // namespace ssvkit
