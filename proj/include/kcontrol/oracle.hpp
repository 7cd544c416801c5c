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

// Ground-truth references used to score the kernel-based controllers.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "kcontrol/core.hpp"
#include "kcontrol/dp.hpp"
#include "kcontrol/policy.hpp"
#include "kcontrol/systems.hpp"

namespace kcontrol {

/// One-step minimizer of |A x + B u| for the noise-free double integrator
/// with scalar u restricted to `bounds`. The objective is convex in u, so
/// clamping the unconstrained least-squares solution is optimal.
inline double optimal_control_integrator(const Eigen::Ref<const Vector>& x,
                                         double sampling_time,
                                         Interval bounds = {-1.0, 1.0}) {
  detail::require_same_dim(x.size(), 2, "integrator oracle state");
  const double ts = sampling_time;
  const double ax0 = x[0] + ts * x[1];
  const double ax1 = x[1];
  const double b0 = 0.5 * ts * ts;
  const double b1 = ts;
  const double u_free = -(b0 * ax0 + b1 * ax1) / (b0 * b0 + b1 * b1);
  return std::clamp(u_free, bounds.lo, bounds.hi);
}

struct McEstimate {
  double mean;
  double std_error;
};

/// Plain Monte Carlo estimate of E[f(step(x, u))].
template <typename F>
McEstimate mc_expectation(const SystemSpec& spec, F&& f,
                          const Eigen::Ref<const Vector>& x,
                          const Eigen::Ref<const Vector>& u, std::size_t draws,
                          Rng& rng) {
  if (draws == 0) detail::fail(ErrorKind::kInvalidArgument, "draws must be >= 1");
  // Welford accumulation.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < draws; ++k) {
    const double v = f(step(spec, x, u, rng));
    const double delta = v - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (v - mean);
  }
  const double n = static_cast<double>(draws);
  const double var = draws > 1 ? m2 / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n)};
}

struct ExhaustiveResult {
  double value;
  std::vector<std::size_t> indices;
  std::vector<Vector> controls;
};

inline constexpr double kExhaustiveLimit = 1e6;

/// Exact minimum of sum_t g_t(x_t, u_t) + g_N(x_N) over every grid control
/// sequence of length N under deterministic dynamics `next(x, u)`. Ties go
/// to the lexicographically first sequence.
template <typename NextFn>
ExhaustiveResult exhaustive_dp(NextFn&& next, const ControlGrid& grid,
                               const CostFunction& cost, std::size_t n,
                               const Vector& x0) {
  if (n == 0) detail::fail(ErrorKind::kInvalidArgument, "horizon must be >= 1");
  if (!cost.terminal) {
    detail::fail(ErrorKind::kInvalidArgument, "terminal cost is required");
  }
  const auto p = static_cast<std::size_t>(grid.size());
  if (std::pow(static_cast<double>(p), static_cast<double>(n)) > kExhaustiveLimit) {
    detail::fail(ErrorKind::kCombinatorialLimit, p, "^", n,
                 " control sequences exceed the enumeration limit");
  }

  ExhaustiveResult best{std::numeric_limits<double>::infinity(), {}, {}};
  std::vector<std::size_t> path(n);
  std::function<void(std::size_t, const Vector&, double)> descend =
      [&](std::size_t t, const Vector& x, double acc) {
        if (t == n) {
          const double total = acc + cost.terminal(x);
          if (total < best.value) {
            best.value = total;
            best.indices = path;
          }
          return;
        }
        for (std::size_t j = 0; j < p; ++j) {
          const Vector u = grid.candidate(static_cast<Eigen::Index>(j));
          path[t] = j;
          descend(t + 1, next(x, u), acc + cost.stage_at(t, x, u));
        }
      };
  descend(0, x0, 0.0);

  for (auto j : best.indices) {
    best.controls.push_back(grid.candidate(static_cast<Eigen::Index>(j)));
  }
  return best;
}

}  // namespace kcontrol
