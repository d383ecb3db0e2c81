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

#include <memory>

#include "ssvkit/cme.hpp"

namespace ssvkit {

/// Inputs paired with explanation vectors, from any explainer.
struct ExplanationDataset {
  Matrix X;   // n x d
  Matrix Phi; // n x d

  Eigen::Index size() const { return X.rows(); }
  int dim() const { return static_cast<int>(X.cols()); }
  void validate() const;
};

struct PredictedExplanation {
  Vector mean;
  Matrix cov;
};

/// Multi-output GP regression over explanation functions with the
/// matrix-valued kernel kappa(x, x') = A Psi(x)^T Psi(x') A^T, where Psi holds
/// the empirical conditional mean embeddings of the prior kernel on the
/// anchors.
///
/// Training targets are stacked instance-major: entries [a*d, (a+1)*d) of the
/// dual vector belong to training instance a.
class ShapleyPriorModel {
public:
  struct Options {
    CmeOptions cme;
    /// Largest admissible n * d for the dense solve.
    Eigen::Index max_system = 4000;
  };

  static ShapleyPriorModel fit(const ExplanationDataset &data, Matrix anchors,
                               KernelParams kernel, CoalitionDesign design,
                               double lambda, double noise, Options options);
  static ShapleyPriorModel fit(const ExplanationDataset &data, Matrix anchors,
                               KernelParams kernel, CoalitionDesign design,
                               double lambda, double noise) {
    return fit(data, std::move(anchors), std::move(kernel), std::move(design), lambda,
               noise, Options{});
  }

  /// d x d kernel block between two inputs.
  Matrix kappa(const Vector &x, const Vector &x2) const;
  PredictedExplanation predict(const Vector &x_new) const;
  /// Payoff vector over the design whose projection is the predictive mean.
  Vector induced_payoff(const Vector &x_new) const;

  /// The n*d x n*d training gram without the noise term.
  Matrix training_gram() const;

  const Matrix &anchors() const { return embed_->anchors(); }
  const KernelParams &kernel() const { return embed_->kernel(); }
  const CoalitionDesign &design() const { return design_; }
  double lambda() const { return embed_->lambda(); }
  double noise() const { return noise_; }
  const Vector &alpha() const { return alpha_; }
  const Matrix &training_X() const { return training_X_; }
  int dim() const { return design_.d; }

private:
  ShapleyPriorModel() = default;
  /// Stacked A B(x)^T blocks: row block a (d rows) belongs to X.row(a).
  Matrix project_embeddings(const Matrix &X) const;

  std::shared_ptr<const cme::EmbeddingOperator> embed_;
  CoalitionDesign design_;
  double noise_ = 1.0;
  int threads_ = 1;
  Matrix K_anchor_;      // prior gram on anchors
  Matrix training_X_;
  Matrix C_train_;       // n*d x n_anchor
  Matrix KCt_train_;     // n_anchor x n*d
  numerics::CholeskyFactor chol_;
  Vector alpha_;
};

namespace shapley_prior {

/// Farthest-point subset of X used as anchors when none are supplied.
Matrix default_anchors(const Matrix &X, Eigen::Index count);

} // namespace shapley_prior
} // namespace ssvkit
