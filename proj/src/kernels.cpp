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

#include "ssvkit/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ssvkit {

FeatureSubset::FeatureSubset(Mask mask, int dim) : mask_(mask), dim_(dim) {
  if (dim < 0 || dim > kMaxFeatures)
    fail(ErrorKind::DimensionTooLarge,
         "feature subsets support at most " + std::to_string(kMaxFeatures) +
             " features");
  if (dim < kMaxFeatures && (mask >> dim) != 0u)
    fail(ErrorKind::InvalidArgument, "subset mask has bits beyond dimension");
}

FeatureSubset FeatureSubset::full(int dim) {
  const Mask mask = dim == 32 ? ~Mask{0} : ((Mask{1} << dim) - 1u);
  return {mask, dim};
}

std::vector<int> FeatureSubset::members() const {
  std::vector<int> out;
  for (int i = 0; i < dim_; ++i)
    if (contains(i)) out.push_back(i);
  return out;
}

void KernelParams::validate() const {
  if (!(variance > 0.0) || !std::isfinite(variance))
    fail(ErrorKind::InvalidArgument, "kernel variance must be positive");
  if (lengthscales.size() == 0)
    fail(ErrorKind::InvalidArgument, "kernel needs at least one lengthscale");
  for (Eigen::Index i = 0; i < lengthscales.size(); ++i)
    if (!(lengthscales[i] > 0.0) || !std::isfinite(lengthscales[i]))
      fail(ErrorKind::InvalidArgument, "lengthscales must be positive");
}

namespace kernels {

Matrix gram(const KernelParams &params, const FeatureSubset &subset,
            const Matrix &A, const Matrix &B) {
  const Eigen::Index d = params.lengthscales.size();
  if (A.cols() != d || B.cols() != d || subset.dim() != d)
    fail(ErrorKind::DimensionMismatch,
         "gram: inputs must have " + std::to_string(d) + " columns");
  if (subset.size() == 0) return Matrix::Ones(A.rows(), B.rows());

  const std::vector<int> active = subset.members();
  Matrix sq = Matrix::Zero(A.rows(), B.rows());
  for (int u : active) {
    const double inv = 1.0 / params.lengthscales[u];
    const Vector a = A.col(u) * inv;
    const Vector b = B.col(u) * inv;
    for (Eigen::Index j = 0; j < B.rows(); ++j)
      sq.col(j).array() += (a.array() - b[j]).square();
  }
  return params.variance * (-0.5 * sq.array()).exp().matrix();
}

Matrix gram(const KernelParams &params, const Matrix &A, const Matrix &B) {
  return gram(params,
              FeatureSubset::full(static_cast<int>(params.lengthscales.size())),
              A, B);
}

Vector median_heuristic(const Matrix &X) {
  const Eigen::Index n = X.rows();
  if (n < 2) fail(ErrorKind::TooFewPoints, "median heuristic needs n >= 2");
  Vector out(X.cols());
  std::vector<double> diffs;
  diffs.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index u = 0; u < X.cols(); ++u) {
    diffs.clear();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j)
        diffs.push_back(std::abs(X(i, u) - X(j, u)));
    const std::size_t m = diffs.size();
    std::sort(diffs.begin(), diffs.end());
    const double median =
        m % 2 == 1 ? diffs[m / 2] : 0.5 * (diffs[m / 2 - 1] + diffs[m / 2]);
    out[u] = median > 0.0 ? median : 1.0;
  }
  return out;
}

} // namespace kernels
} // namespace ssvkit
