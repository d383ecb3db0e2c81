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

#include "ssvkit/shapley_prior.hpp"

#include <string>

namespace ssvkit {

void ExplanationDataset::validate() const {
  if (X.rows() != Phi.rows() || X.cols() != Phi.cols())
    fail(ErrorKind::DimensionMismatch, "X and Phi must have identical shapes");
  if (!X.allFinite() || !Phi.allFinite())
    fail(ErrorKind::NonFinite, "explanation dataset has non-finite entries");
}

ShapleyPriorModel ShapleyPriorModel::fit(const ExplanationDataset &data, Matrix anchors,
                                         KernelParams kernel, CoalitionDesign design,
                                         double lambda, double noise, Options options) {
  data.validate();
  if (!(noise > 0.0)) fail(ErrorKind::InvalidArgument, "noise must be positive");
  const int d = design.d;
  if (kernel.dim() != d || anchors.cols() != d || (data.size() > 0 && data.dim() != d))
    fail(ErrorKind::DimensionMismatch, "kernel, anchors, design and data must share d");
  const Eigen::Index nd = data.size() * d;
  if (nd > options.max_system)
    fail(ErrorKind::InvalidArgument,
         "n * d = " + std::to_string(nd) + " exceeds the dense limit of " +
             std::to_string(options.max_system) + "; subsample the explanations");

  ShapleyPriorModel model;
  model.design_ = std::move(design);
  model.noise_ = noise;
  model.threads_ = options.cme.threads;
  model.embed_ = std::make_shared<const cme::EmbeddingOperator>(
      std::move(anchors), std::move(kernel), lambda, &model.design_, options.cme);
  model.K_anchor_ = numerics::symmetrize(
      kernels::gram(model.kernel(), model.anchors(), model.anchors()));
  model.training_X_ = data.X;
  const Eigen::Index nA = model.anchors().rows();
  if (nd == 0) {
    model.C_train_ = Matrix::Zero(0, nA);
    model.KCt_train_ = Matrix::Zero(nA, 0);
    model.alpha_ = Vector::Zero(0);
    return model;
  }
  model.C_train_ = model.project_embeddings(data.X);
  model.KCt_train_ = model.K_anchor_ * model.C_train_.transpose();
  Matrix G = numerics::symmetrize(model.C_train_ * model.KCt_train_);
  G.diagonal().array() += noise;
  model.chol_ = numerics::cholesky_psd(G);
  const Matrix phi_t = data.Phi.transpose(); // column a holds instance a
  model.alpha_ = model.chol_.solve(Eigen::Map<const Vector>(phi_t.data(), nd));
  return model;
}

Matrix ShapleyPriorModel::project_embeddings(const Matrix &X) const {
  const int d = design_.d;
  const Eigen::Index ell = design_.size();
  const Eigen::Index m = X.rows();
  std::vector<Matrix> W(static_cast<std::size_t>(ell)); // n_anchor x m each
  numerics::parallel_for(W.size(), threads_, [&](std::size_t j) {
    W[j] = embed_->weights(design_.coalition(static_cast<Eigen::Index>(j)), X);
  });
  const Eigen::Index nA = embed_->num_anchors();
  Matrix C(m * d, nA);
  Matrix Bt(ell, nA);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index j = 0; j < ell; ++j)
      Bt.row(j) = W[static_cast<std::size_t>(j)].col(a).transpose();
    C.middleRows(a * d, d).noalias() = design_.A * Bt;
  }
  return C;
}

Matrix ShapleyPriorModel::kappa(const Vector &x, const Vector &x2) const {
  const Matrix Cx = project_embeddings(x.transpose());
  const Matrix Cx2 = project_embeddings(x2.transpose());
  return Cx * K_anchor_ * Cx2.transpose();
}

Matrix ShapleyPriorModel::training_gram() const {
  return numerics::symmetrize(C_train_ * KCt_train_);
}

PredictedExplanation ShapleyPriorModel::predict(const Vector &x_new) const {
  if (x_new.size() != design_.d)
    fail(ErrorKind::DimensionMismatch, "query has the wrong dimension");
  const Matrix Cx = project_embeddings(x_new.transpose());
  Matrix prior = numerics::symmetrize(Cx * K_anchor_ * Cx.transpose());
  if (alpha_.size() == 0) return {Vector::Zero(design_.d), std::move(prior)};
  const Matrix cross = Cx * KCt_train_; // d x n*d
  PredictedExplanation out;
  out.mean = cross * alpha_;
  out.cov = numerics::symmetrize(prior - cross * chol_.solve(cross.transpose()));
  return out;
}

Vector ShapleyPriorModel::induced_payoff(const Vector &x_new) const {
  if (x_new.size() != design_.d)
    fail(ErrorKind::DimensionMismatch, "query has the wrong dimension");
  const Eigen::Index ell = design_.size();
  if (alpha_.size() == 0) return Vector::Zero(ell);
  const Vector u = K_anchor_ * (C_train_.transpose() * alpha_);
  const Matrix X = x_new.transpose();
  Vector v(ell);
  for (Eigen::Index j = 0; j < ell; ++j)
    v[j] = embed_->weights(design_.coalition(j), X).col(0).dot(u);
  return v;
}

namespace shapley_prior {

Matrix default_anchors(const Matrix &X, Eigen::Index count) {
  Dataset data{X, Vector::Zero(X.rows()), {}};
  const auto rows = gp::select_inducing(data, std::min(count, X.rows()),
                                        InducingStrategy::FarthestPoint, 0);
  Matrix out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
  return out;
}

} // namespace shapley_prior
} // namespace ssvkit
