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

#include "kcontrol/core.hpp"

namespace kcontrol {

enum class KernelFamily { kGaussian };

/// Positive-definite kernel on R^d. Only the Gaussian family
/// k(a, b) = exp(-|a - b|^2 / (2 sigma^2)) is provided.
class KernelSpec {
 public:
  static KernelSpec gaussian(double bandwidth) {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
      detail::fail(ErrorKind::kInvalidArgument,
                   "kernel bandwidth must be positive and finite, got ",
                   bandwidth);
    }
    return KernelSpec(KernelFamily::kGaussian, bandwidth);
  }

  KernelFamily family() const noexcept { return family_; }
  double bandwidth() const noexcept { return bandwidth_; }

  // Kernel value as a function of the squared distance.
  double from_squared_distance(double sq) const noexcept {
    return std::exp(-sq * inv_two_sigma_sq_);
  }

  friend bool operator==(const KernelSpec& a, const KernelSpec& b) {
    return a.family_ == b.family_ && a.bandwidth_ == b.bandwidth_;
  }

 private:
  KernelSpec(KernelFamily family, double bandwidth)
      : family_(family),
        bandwidth_(bandwidth),
        inv_two_sigma_sq_(1.0 / (2.0 * bandwidth * bandwidth)) {}

  KernelFamily family_;
  double bandwidth_;
  double inv_two_sigma_sq_;
};

namespace detail {

// Squared distance from explicit differences; k(a, a) == 1 exactly and
// gram entries equal eval bit for bit.
template <typename A, typename B>
double squared_distance(const Eigen::MatrixBase<A>& a,
                        const Eigen::MatrixBase<B>& b) {
  double sq = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    sq += d * d;
  }
  return sq;
}

}  // namespace detail

inline double eval(const KernelSpec& spec, const Eigen::Ref<const Vector>& a,
                   const Eigen::Ref<const Vector>& b) {
  detail::require_same_dim(a.size(), b.size(), "kernel eval");
  return spec.from_squared_distance(
      detail::squared_distance(a.transpose(), b.transpose()));
}

/// Dense Gram matrix G(i, j) = k(rows.row(i), cols.row(j)).
inline Matrix gram(const KernelSpec& spec, const Eigen::Ref<const Matrix>& rows,
                   const Eigen::Ref<const Matrix>& cols) {
  detail::require_same_dim(rows.cols(), cols.cols(), "gram");
  Matrix g(rows.rows(), cols.rows());
  for (Eigen::Index j = 0; j < cols.rows(); ++j) {
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      g(i, j) = spec.from_squared_distance(
          detail::squared_distance(rows.row(i), cols.row(j)));
    }
  }
  return g;
}

/// Kernel column k(points.row(i), query) for every i.
inline Vector kernel_column(const KernelSpec& spec,
                            const Eigen::Ref<const Matrix>& points,
                            const Eigen::Ref<const Vector>& query) {
  detail::require_same_dim(points.cols(), query.size(), "kernel column");
  Vector col(points.rows());
  const Eigen::RowVectorXd q = query.transpose();
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    col[i] = spec.from_squared_distance(
        detail::squared_distance(points.row(i), q));
  }
  return col;
}

/// Gram matrix of the product kernel on joint (x, u) points:
/// G(i, j) = k_x(x_i, x_j) * k_u(u_i, u_j).
inline Matrix product_gram(const KernelSpec& spec_x, const KernelSpec& spec_u,
                           const Eigen::Ref<const Matrix>& states,
                           const Eigen::Ref<const Matrix>& controls) {
  if (states.rows() != controls.rows()) {
    detail::fail(ErrorKind::kDimensionMismatch, "product_gram: ",
                 states.rows(), " states vs ", controls.rows(), " controls");
  }
  Matrix g = gram(spec_x, states, states);
  g.array() *= gram(spec_u, controls, controls).array();
  return g;
}

}  // namespace kcontrol
