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

#include <bit>
#include <cstdint>
#include <vector>

#include "ssvkit/numerics.hpp"

namespace ssvkit {

inline constexpr int kMaxFeatures = 30;

/// Subset S of the feature index set {0, ..., d-1}, stored as a bitmask.
class FeatureSubset {
public:
  using Mask = std::uint32_t;

  FeatureSubset() = default;
  FeatureSubset(Mask mask, int dim);

  static FeatureSubset empty(int dim) { return {0u, dim}; }
  static FeatureSubset full(int dim);

  Mask mask() const { return mask_; }
  int dim() const { return dim_; }
  int size() const { return std::popcount(mask_); }
  bool contains(int feature) const { return (mask_ >> feature) & 1u; }
  std::vector<int> members() const;

  friend bool operator==(const FeatureSubset &, const FeatureSubset &) = default;

private:
  Mask mask_ = 0;
  int dim_ = 0;
};

/// ARD squared-exponential kernel parameters.
struct KernelParams {
  double variance = 1.0;
  Vector lengthscales;

  int dim() const { return static_cast<int>(lengthscales.size()); }
  void validate() const;
};

namespace kernels {

/// k_S(A, B) for the subset-restricted RBF kernel. Columns outside `subset`
/// never enter the computation; for the empty subset every entry is 1.
Matrix gram(const KernelParams &params, const FeatureSubset &subset,
            const Matrix &A, const Matrix &B);

/// Full-feature gram matrix.
Matrix gram(const KernelParams &params, const Matrix &A, const Matrix &B);

/// Per-column median of pairwise absolute differences; zero medians fall back
/// to 1.0.
Vector median_heuristic(const Matrix &X);

} // namespace kernels
} // namespace ssvkit
