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

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "ssvkit/error.hpp"

namespace ssvkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace numerics {

inline constexpr double kInitialJitter = 1e-12;
inline constexpr double kJitterGrowth = 10.0;
inline constexpr double kDefaultMaxJitter = 1e-4;

/// Lower Cholesky factor of `m + jitter_used * I`.
struct CholeskyFactor {
  Matrix lower;
  double jitter_used = 0.0;

  Eigen::Index dim() const { return lower.rows(); }

  /// Solves (m + jitter I) x = rhs.
  Matrix solve(const Matrix &rhs) const;
  /// Returns L^{-1} rhs.
  Matrix solve_lower(const Matrix &rhs) const;
  double log_determinant() const;
};

/// Factorizes a symmetric matrix, adding jitter to the diagonal when the plain
/// factorization fails. Jitter starts at 1e-12 and grows tenfold per retry
/// until it would exceed `max_jitter`.
CholeskyFactor cholesky_psd(const Matrix &m,
                            double max_jitter = kDefaultMaxJitter);

/// (m + lambda I)^{-1} rhs through `cholesky_psd`.
Matrix solve_regularized(const Matrix &m, double lambda, const Matrix &rhs,
                         double max_jitter = kDefaultMaxJitter);

struct CgResult {
  Vector x;
  int iterations = 0;
  bool converged = false;
  double relative_residual = 0.0;
};

/// Plain conjugate gradient for symmetric positive (semi-)definite systems.
/// Returns the iterate with the smallest residual seen when `max_iter` is hit.
CgResult conjugate_gradient(const Matrix &m, const Vector &rhs, double tol,
                            int max_iter);

/// Eigenvalue-clipped projection onto the PSD cone.
Matrix psd_project(const Matrix &m);

/// True when `cholesky_psd(m, max_jitter)` succeeds.
bool is_psd(const Matrix &m, double max_jitter = 1e-8);

/// Returns (m + m^T) / 2.
Matrix symmetrize(const Matrix &m);

void require_symmetric(const Matrix &m, const char *what);
void require_finite(const Matrix &m, const char *what);

/// Runs `fn(i)` for i in [0, n) on up to `threads` workers with a static
/// contiguous partition. `fn` must only write to slots owned by index i.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn &&fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([begin, end, w, &fn, &errors] {
        try {
          for (std::size_t i = begin; i < end; ++i) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  // Rethrow the error of the lowest partition so failures do not depend on
  // scheduling.
  for (auto &e : errors)
    if (e) std::rethrow_exception(e);
}

} // namespace numerics
} // namespace ssvkit
