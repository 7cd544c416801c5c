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
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "kcontrol/core.hpp"
#include "kcontrol/embedding.hpp"

namespace kcontrol {

namespace detail {

inline void validate_box(const Box& box, std::string_view what) {
  if (box.empty()) fail(ErrorKind::kInvalidArgument, what, " box is empty");
  for (std::size_t k = 0; k < box.size(); ++k) {
    if (!(box[k].lo < box[k].hi) || !std::isfinite(box[k].lo) ||
        !std::isfinite(box[k].hi)) {
      fail(ErrorKind::kInvalidArgument, what, " box axis ", k,
           " needs finite lo < hi");
    }
  }
}

// Row-major lattice, last axis varying fastest.
inline Matrix lattice_points(const Box& box,
                             const std::vector<std::size_t>& counts) {
  if (counts.size() != box.size()) {
    fail(ErrorKind::kDimensionMismatch, "lattice counts (", counts.size(),
         ") vs box axes (", box.size(), ")");
  }
  std::size_t total = 1;
  for (auto c : counts) {
    if (c == 0) fail(ErrorKind::kInvalidArgument, "lattice count must be > 0");
    total *= c;
  }
  const auto dim = static_cast<Eigen::Index>(box.size());
  Matrix points(static_cast<Eigen::Index>(total), dim);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t k = box.size(); k-- > 0;) {
      const std::size_t idx = rem % counts[k];
      rem /= counts[k];
      const double v =
          counts[k] == 1
              ? 0.5 * (box[k].lo + box[k].hi)
              : box[k].lo + (box[k].hi - box[k].lo) * static_cast<double>(idx) /
                                static_cast<double>(counts[k] - 1);
      points(static_cast<Eigen::Index>(flat), static_cast<Eigen::Index>(k)) = v;
    }
  }
  return points;
}

}  // namespace detail

/// The P admissible candidate controls, one per row.
class ControlGrid {
 public:
  /// Uniform lattice over `box` with `counts[k]` points on axis k
  /// (endpoints included; a count of 1 takes the axis midpoint).
  static ControlGrid lattice(const Box& box,
                             const std::vector<std::size_t>& counts) {
    detail::validate_box(box, "control grid");
    return ControlGrid(detail::lattice_points(box, counts), box);
  }

  static ControlGrid from_points(Matrix candidates,
                                 std::optional<Box> admissible = std::nullopt) {
    return ControlGrid(std::move(candidates), std::move(admissible));
  }

  Eigen::Index size() const noexcept { return candidates_.rows(); }
  Eigen::Index dim() const noexcept { return candidates_.cols(); }
  const Matrix& candidates() const noexcept { return candidates_; }
  Vector candidate(Eigen::Index j) const {
    return candidates_.row(j).transpose();
  }
  const std::optional<Box>& admissible() const noexcept { return admissible_; }

 private:
  ControlGrid(Matrix candidates, std::optional<Box> admissible)
      : candidates_(std::move(candidates)), admissible_(std::move(admissible)) {
    if (candidates_.rows() < 1 || candidates_.cols() < 1) {
      detail::fail(ErrorKind::kInvalidArgument,
                   "control grid needs at least one candidate");
    }
    if (!candidates_.allFinite()) {
      detail::fail(ErrorKind::kNonFinite, "control grid has non-finite entry");
    }
    if (admissible_) {
      detail::validate_box(*admissible_, "admissible control");
      if (static_cast<Eigen::Index>(admissible_->size()) != candidates_.cols()) {
        detail::fail(ErrorKind::kDimensionMismatch,
                     "admissible box vs candidate dimension");
      }
      for (Eigen::Index j = 0; j < candidates_.rows(); ++j) {
        for (Eigen::Index k = 0; k < candidates_.cols(); ++k) {
          const auto& iv = (*admissible_)[static_cast<std::size_t>(k)];
          if (candidates_(j, k) < iv.lo || candidates_(j, k) > iv.hi) {
            detail::fail(ErrorKind::kInvalidArgument, "candidate ", j,
                         " outside admissible box on axis ", k);
          }
        }
      }
    }
  }

  Matrix candidates_;
  std::optional<Box> admissible_;
};

/// Probability weights over grid candidates.
class PolicyWeights {
 public:
  static PolicyWeights one_hot(std::size_t size, std::size_t index) {
    if (index >= size) {
      detail::fail(ErrorKind::kInvalidArgument, "one-hot index ", index,
                   " out of range ", size);
    }
    std::vector<double> alpha(size, 0.0);
    alpha[index] = 1.0;
    return PolicyWeights(std::move(alpha));
  }

  const std::vector<double>& alpha() const noexcept { return alpha_; }
  std::size_t size() const noexcept { return alpha_.size(); }

 private:
  explicit PolicyWeights(std::vector<double> alpha) : alpha_(std::move(alpha)) {}
  std::vector<double> alpha_;
};

struct LpSolution {
  std::size_t index;
  PolicyWeights weights;
  double value;
};

/// Solves min_alpha C^T alpha over the probability simplex through its
/// Lagrangian dual max -nu s.t. -nu <= C_j, whose optimum is min_j C_j.
/// The primal optimum is the vertex at the smallest minimizing index.
inline LpSolution solve_lp_dual(std::span<const double> costs) {
  if (costs.empty()) {
    detail::fail(ErrorKind::kInvalidArgument, "cost row is empty");
  }
  std::size_t best = 0;
  for (std::size_t j = 0; j < costs.size(); ++j) {
    if (!std::isfinite(costs[j])) {
      detail::fail(ErrorKind::kNonFinite, "cost row entry ", j,
                   " is not finite");
    }
    if (costs[j] < costs[best]) best = j;
  }
  return {best, PolicyWeights::one_hot(costs.size(), best), costs[best]};
}

inline LpSolution solve_lp_dual(const Vector& costs) {
  return solve_lp_dual(std::span<const double>(costs.data(),
                                               static_cast<std::size_t>(costs.size())));
}

struct Decision {
  std::size_t index;
  Vector control;
  double value;
};

/// Caches k_u(u_i, u~_j) for a fixed estimator and grid, an M x P matrix.
class ControlFeatures {
 public:
  ControlFeatures(const EmbeddingEstimator& est, const ControlGrid& grid)
      : grid_(grid) {
    detail::require_same_dim(grid.dim(), est.sample().control_dim(),
                             "control grid");
    features_ = gram(est.kernel_u(), est.sample().controls(), grid.candidates());
  }

  const ControlGrid& grid() const noexcept { return grid_; }
  const Matrix& matrix() const noexcept { return features_; }

  /// C(x)_j = weights^T (k_x(x) .* k_u(u~_j)) for all j, where `weights`
  /// is W c for the cost (or value) vector c at the successors.
  Vector cost_row(const EmbeddingEstimator& est, const Vector& weights,
                  const Eigen::Ref<const Vector>& x) const {
    Vector scaled = est.state_x_column(x);
    scaled.array() *= weights.array();
    return features_.transpose() * scaled;
  }

 private:
  ControlGrid grid_;
  Matrix features_;
};

/// One-step policy minimizing the approximate expected cost c(x') over the
/// grid. c^T W is computed once at construction.
class GreedyPolicy {
 public:
  GreedyPolicy(EmbeddingEstimator est, const Vector& cost_at_successors,
               const ControlGrid& grid)
      : est_(std::move(est)), features_(est_, grid) {
    if (cost_at_successors.size() != est_.size()) {
      detail::fail(ErrorKind::kDimensionMismatch, "expected ", est_.size(),
                   " successor costs, got ", cost_at_successors.size());
    }
    weights_ = est_.inverse() * cost_at_successors;
  }

  Vector cost_row(const Eigen::Ref<const Vector>& x) const {
    return features_.cost_row(est_, weights_, x);
  }

  Decision decide(const Eigen::Ref<const Vector>& x) const {
    const Vector row = cost_row(x);
    const LpSolution sol = solve_lp_dual(row);
    return {sol.index, grid().candidate(static_cast<Eigen::Index>(sol.index)),
            sol.value};
  }

  const ControlGrid& grid() const noexcept { return features_.grid(); }

 private:
  EmbeddingEstimator est_;
  ControlFeatures features_;
  Vector weights_;
};

inline Vector cost_row(const EmbeddingEstimator& est,
                       const Vector& cost_at_successors,
                       const ControlGrid& grid,
                       const Eigen::Ref<const Vector>& x) {
  return GreedyPolicy(est, cost_at_successors, grid).cost_row(x);
}

inline Decision greedy_control(const EmbeddingEstimator& est,
                               const Vector& cost_at_successors,
                               const ControlGrid& grid,
                               const Eigen::Ref<const Vector>& x) {
  return GreedyPolicy(est, cost_at_successors, grid).decide(x);
}

}  // namespace kcontrol
