// Copyright 2026 The kcontrol Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <memory>
#include <optional>

#include "kcontrol/core.hpp"
#include "kcontrol/kernels.hpp"

namespace kcontrol {

/// Observed transitions (x_i, u_i, x'_i), one per row of each matrix.
class SampleSet {
 public:
  SampleSet(Matrix states, Matrix controls, Matrix successors)
      : states_(std::move(states)),
        controls_(std::move(controls)),
        successors_(std::move(successors)) {
    if (states_.rows() < 1) {
      detail::fail(ErrorKind::kInvalidArgument, "sample must be non-empty");
    }
    if (controls_.rows() != states_.rows() ||
        successors_.rows() != states_.rows()) {
      detail::fail(ErrorKind::kDimensionMismatch, "sample lists differ in ",
                   "length: ", states_.rows(), " states, ", controls_.rows(),
                   " controls, ", successors_.rows(), " successors");
    }
    detail::require_same_dim(states_.cols(), successors_.cols(),
                             "sample state/successor");
    if (states_.cols() < 1 || controls_.cols() < 1) {
      detail::fail(ErrorKind::kInvalidArgument,
                   "sample dimensions must be positive");
    }
  }

  Eigen::Index size() const noexcept { return states_.rows(); }
  Eigen::Index state_dim() const noexcept { return states_.cols(); }
  Eigen::Index control_dim() const noexcept { return controls_.cols(); }

  const Matrix& states() const noexcept { return states_; }
  const Matrix& controls() const noexcept { return controls_; }
  const Matrix& successors() const noexcept { return successors_; }

  friend bool operator==(const SampleSet& a, const SampleSet& b) {
    return a.states_ == b.states_ && a.controls_ == b.controls_ &&
           a.successors_ == b.successors_;
  }

 private:
  Matrix states_;
  Matrix controls_;
  Matrix successors_;
};

/// Evaluates a function at every successor point of the sample.
template <typename F>
Vector evaluate_at_successors(const SampleSet& sample, F&& f) {
  Vector out(sample.size());
  for (Eigen::Index i = 0; i < sample.size(); ++i) {
    out[i] = f(Vector(sample.successors().row(i).transpose()));
  }
  return out;
}

inline double default_regularization(Eigen::Index sample_size) {
  const double m = static_cast<double>(sample_size);
  return 1.0 / (m * m);
}

/// Empirical conditional distribution embedding fitted to a SampleSet.
///
/// Holds W = (G + lambda M I)^-1, where G is the product-kernel Gram matrix
/// over the sample's (x_i, u_i) pairs. The embedding of Q(. | x, u) is
/// sum_i beta_i(x, u) k(x'_i, .) with beta(x, u) = W z(x, u) and
/// z_i(x, u) = k_x(x_i, x) k_u(u_i, u).
///
/// Instances are immutable; copies share the fitted state.
class EmbeddingEstimator {
 public:
  EmbeddingEstimator(SampleSet sample, KernelSpec kernel_x,
                     KernelSpec kernel_u, double lambda, Matrix inverse)
      : state_(std::make_shared<const State>(State{
            std::move(sample), kernel_x, kernel_u, lambda,
            std::move(inverse)})) {
    const auto m = state_->sample.size();
    if (state_->inverse.rows() != m || state_->inverse.cols() != m) {
      detail::fail(ErrorKind::kDimensionMismatch,
                   "regularized inverse must be ", m, "x", m);
    }
  }

  const SampleSet& sample() const noexcept { return state_->sample; }
  const KernelSpec& kernel_x() const noexcept { return state_->kernel_x; }
  const KernelSpec& kernel_u() const noexcept { return state_->kernel_u; }
  double lambda() const noexcept { return state_->lambda; }
  const Matrix& inverse() const noexcept { return state_->inverse; }
  Eigen::Index size() const noexcept { return state_->sample.size(); }

  /// z(x, u): joint feature column against the training pairs.
  Vector features(const Eigen::Ref<const Vector>& x,
                  const Eigen::Ref<const Vector>& u) const {
    Vector z = state_x_column(x);
    z.array() *= control_column(u).array();
    return z;
  }

  Vector state_x_column(const Eigen::Ref<const Vector>& x) const {
    detail::require_same_dim(x.size(), sample().state_dim(), "state query");
    return kernel_column(kernel_x(), sample().states(), x);
  }

  Vector control_column(const Eigen::Ref<const Vector>& u) const {
    detail::require_same_dim(u.size(), sample().control_dim(),
                             "control query");
    return kernel_column(kernel_u(), sample().controls(), u);
  }

 private:
  struct State {
    SampleSet sample;
    KernelSpec kernel_x;
    KernelSpec kernel_u;
    double lambda;
    Matrix inverse;
  };
  std::shared_ptr<const State> state_;
};

namespace detail {

inline void require_finite_rows(const Matrix& m, std::string_view what) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (!m.row(i).allFinite()) {
      fail(ErrorKind::kFactorization, "non-finite ", what, " at row ", i);
    }
  }
}

}  // namespace detail

/// Fits the embedding by Cholesky factorization of G + lambda M I and
/// materializes its inverse.
inline EmbeddingEstimator fit(SampleSet sample, const KernelSpec& kernel_x,
                              const KernelSpec& kernel_u, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    detail::fail(ErrorKind::kInvalidArgument,
                 "regularization must be positive and finite, got ", lambda);
  }
  detail::require_finite_rows(sample.states(), "state");
  detail::require_finite_rows(sample.controls(), "control");
  detail::require_finite_rows(sample.successors(), "successor");

  const auto m = sample.size();
  Matrix system =
      product_gram(kernel_x, kernel_u, sample.states(), sample.controls());
  system.diagonal().array() += lambda * static_cast<double>(m);

  Eigen::LLT<Matrix> llt(system);
  if (llt.info() != Eigen::Success) {
    const Matrix& factor = llt.matrixLLT();
    Eigen::Index row = 0;
    while (row + 1 < m && factor(row, row) > 0.0) ++row;
    detail::fail(ErrorKind::kFactorization,
                 "Cholesky factorization failed at row ", row);
  }
  Matrix inverse = llt.solve(Matrix::Identity(m, m));
  // The triangular solves leave ulp-level asymmetry.
  inverse = (0.5 * (inverse + inverse.transpose())).eval();
  return EmbeddingEstimator(std::move(sample), kernel_x, kernel_u, lambda,
                            std::move(inverse));
}

inline EmbeddingEstimator fit(SampleSet sample, const KernelSpec& kernel_x,
                              const KernelSpec& kernel_u) {
  const double lambda = default_regularization(sample.size());
  return fit(std::move(sample), kernel_x, kernel_u, lambda);
}

inline Vector beta(const EmbeddingEstimator& est,
                   const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& u) {
  return est.inverse() * est.features(x, u);
}

/// <f, m(x, u)>: approximates E[f(x') | x, u] given f at the successors.
inline double predict_expectation(const EmbeddingEstimator& est,
                                  const Eigen::Ref<const Vector>& f_at_successors,
                                  const Eigen::Ref<const Vector>& x,
                                  const Eigen::Ref<const Vector>& u) {
  if (f_at_successors.size() != est.size()) {
    detail::fail(ErrorKind::kDimensionMismatch, "expected ", est.size(),
                 " successor values, got ", f_at_successors.size());
  }
  return f_at_successors.dot(beta(est, x, u));
}

}  // namespace kcontrol
