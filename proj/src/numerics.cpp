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

#include "ssvkit/numerics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ssvkit {

const char *to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::JitterExceeded: return "JitterExceeded";
  case ErrorKind::NonFinite: return "NonFinite";
  case ErrorKind::DimensionMismatch: return "DimensionMismatch";
  case ErrorKind::TooFewPoints: return "TooFewPoints";
  case ErrorKind::CountOutOfRange: return "CountOutOfRange";
  case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
  case ErrorKind::BoundaryCoalition: return "BoundaryCoalition";
  case ErrorKind::SingularSystem: return "SingularSystem";
  case ErrorKind::DesignMismatch: return "DesignMismatch";
  case ErrorKind::InvalidArgument: return "InvalidArgument";
  case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

namespace numerics {

namespace {

bool try_factor(const Matrix &m, double jitter, Matrix &lower) {
  Matrix shifted = m;
  if (jitter > 0.0) shifted.diagonal().array() += jitter;
  Eigen::LLT<Matrix> llt(shifted);
  if (llt.info() != Eigen::Success) return false;
  lower = llt.matrixL();
  const auto diag = lower.diagonal().array();
  return diag.isFinite().all() && (diag > 0.0).all();
}

} // namespace

void require_finite(const Matrix &m, const char *what) {
  if (!m.allFinite())
    fail(ErrorKind::NonFinite, std::string(what) + " has non-finite entries");
}

void require_symmetric(const Matrix &m, const char *what) {
  if (m.rows() != m.cols())
    fail(ErrorKind::DimensionMismatch, std::string(what) + " is not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    fail(ErrorKind::InvalidArgument, std::string(what) + " is not symmetric");
}

Matrix symmetrize(const Matrix &m) { return 0.5 * (m + m.transpose()); }

CholeskyFactor cholesky_psd(const Matrix &m, double max_jitter) {
  require_finite(m, "matrix");
  require_symmetric(m, "matrix");
  CholeskyFactor out;
  if (m.rows() == 0) return out;
  if (try_factor(m, 0.0, out.lower)) return out;
  for (double jitter = kInitialJitter; jitter <= max_jitter * (1.0 + 1e-12);
       jitter *= kJitterGrowth) {
    if (try_factor(m, jitter, out.lower)) {
      out.jitter_used = jitter;
      return out;
    }
  }
  std::ostringstream msg;
  msg << "Cholesky factorization failed with jitter up to " << max_jitter;
  fail(ErrorKind::JitterExceeded, msg.str());
}

Matrix CholeskyFactor::solve(const Matrix &rhs) const {
  if (rhs.rows() != lower.rows())
    fail(ErrorKind::DimensionMismatch, "right-hand side row count mismatch");
  Matrix x = lower.triangularView<Eigen::Lower>().solve(rhs);
  lower.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
  return x;
}

Matrix CholeskyFactor::solve_lower(const Matrix &rhs) const {
  if (rhs.rows() != lower.rows())
    fail(ErrorKind::DimensionMismatch, "right-hand side row count mismatch");
  return lower.triangularView<Eigen::Lower>().solve(rhs);
}

double CholeskyFactor::log_determinant() const {
  return 2.0 * lower.diagonal().array().log().sum();
}

Matrix solve_regularized(const Matrix &m, double lambda, const Matrix &rhs,
                         double max_jitter) {
  if (!(lambda > 0.0))
    fail(ErrorKind::InvalidArgument, "regularization must be positive");
  if (rhs.rows() != m.rows())
    fail(ErrorKind::DimensionMismatch, "right-hand side row count mismatch");
  Matrix shifted = m;
  shifted.diagonal().array() += lambda;
  return cholesky_psd(shifted, max_jitter).solve(rhs);
}

CgResult conjugate_gradient(const Matrix &m, const Vector &rhs, double tol,
                            int max_iter) {
  if (m.rows() != m.cols() || m.rows() != rhs.size())
    fail(ErrorKind::DimensionMismatch, "conjugate_gradient shape mismatch");
  CgResult out;
  out.x = Vector::Zero(rhs.size());
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) {
    out.converged = true;
    return out;
  }
  Vector x = out.x;
  Vector r = rhs;
  Vector p = r;
  double rs = r.squaredNorm();
  double best = std::sqrt(rs) / rhs_norm;
  out.relative_residual = best;
  for (int it = 1; it <= max_iter; ++it) {
    const Vector mp = m * p;
    const double denom = p.dot(mp);
    if (denom <= 0.0) break; // direction of zero curvature: stop at the best iterate
    const double alpha = rs / denom;
    x += alpha * p;
    r -= alpha * mp;
    if (!x.allFinite())
      fail(ErrorKind::NonFinite, "conjugate gradient iterate diverged");
    const double rs_next = r.squaredNorm();
    const double rel = std::sqrt(rs_next) / rhs_norm;
    out.iterations = it;
    if (rel < best) {
      best = rel;
      out.x = x;
      out.relative_residual = rel;
    }
    if (rel <= tol) {
      out.converged = true;
      return out;
    }
    p = r + (rs_next / rs) * p;
    rs = rs_next;
  }
  return out;
}

Matrix psd_project(const Matrix &m) {
  require_finite(m, "matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(m));
  const Vector clipped = eig.eigenvalues().cwiseMax(0.0);
  return symmetrize(eig.eigenvectors() * clipped.asDiagonal() *
                    eig.eigenvectors().transpose());
}

bool is_psd(const Matrix &m, double max_jitter) {
  try {
    cholesky_psd(symmetrize(m), max_jitter);
    return true;
  } catch (const Error &) {
    return false;
  }
}

} // namespace numerics
} // namespace ssvkit
