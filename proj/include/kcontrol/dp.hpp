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
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "kcontrol/core.hpp"
#include "kcontrol/embedding.hpp"
#include "kcontrol/policy.hpp"

namespace kcontrol {

/// Additive cost: terminal g_N(x) and an optional time-indexed stage cost
/// g_t(x, u). A missing stage cost counts as zero.
struct CostFunction {
  std::function<double(const Vector&)> terminal;
  std::function<double(std::size_t t, const Vector& x, const Vector& u)> stage;

  double stage_at(std::size_t t, const Vector& x, const Vector& u) const {
    return stage ? stage(t, x, u) : 0.0;
  }
};

/// V_t tabulated at the sample's successor points.
struct ValueTable {
  std::size_t t;
  Vector values;
};

/// Markov policy {pi_0, ..., pi_{N-1}} over a control grid.
class DpPolicy {
 public:
  DpPolicy(EmbeddingEstimator est, ControlFeatures features,
           std::vector<Vector> weights, CostFunction cost)
      : data_(std::make_shared<const Data>(Data{std::move(est),
                                                std::move(features),
                                                std::move(weights),
                                                std::move(cost)})) {}

  std::size_t horizon() const noexcept { return data_->weights.size(); }
  const ControlGrid& grid() const noexcept { return data_->features.grid(); }

  /// Candidate row g_t(x, u~_j) + <V_{t+1}, m(x, u~_j)> for every j.
  Vector cost_row(std::size_t t, const Eigen::Ref<const Vector>& x) const {
    if (t >= horizon()) {
      detail::fail(ErrorKind::kInvalidArgument, "time ", t,
                   " outside horizon ", horizon());
    }
    const Data& d = *data_;
    Vector row = d.features.cost_row(d.est, d.weights[t], x);
    if (d.cost.stage) {
      const Vector xv = x;
      for (Eigen::Index j = 0; j < row.size(); ++j) {
        row[j] = d.cost.stage(t, xv, grid().candidate(j)) + row[j];
      }
    }
    return row;
  }

  Decision decide(std::size_t t, const Eigen::Ref<const Vector>& x) const {
    const LpSolution sol = solve_lp_dual(cost_row(t, x));
    return {sol.index, grid().candidate(static_cast<Eigen::Index>(sol.index)),
            sol.value};
  }

  std::function<Decision(const Vector&)> step_policy(std::size_t t) const {
    if (t >= horizon()) {
      detail::fail(ErrorKind::kInvalidArgument, "time ", t,
                   " outside horizon ", horizon());
    }
    return [self = *this, t](const Vector& x) { return self.decide(t, x); };
  }

 private:
  struct Data {
    EmbeddingEstimator est;
    ControlFeatures features;
    std::vector<Vector> weights;  // weights[t] = W V_{t+1}
    CostFunction cost;
  };
  std::shared_ptr<const Data> data_;
};

struct DpSolution {
  std::vector<ValueTable> values;  // values[t] holds V_t, t = 0..N
  DpPolicy policy;
};

/// Backward recursion V_N = g_N and
///   V_t(x) = min_j [ g_t(x, u~_j) + <V_{t+1}, m(x, u~_j)> ],
/// with every V_t tabulated at the successors x'_i.
inline DpSolution backward_recursion(const EmbeddingEstimator& est,
                                     const CostFunction& cost,
                                     const ControlGrid& grid, std::size_t n) {
  if (n == 0) detail::fail(ErrorKind::kInvalidArgument, "horizon must be >= 1");
  if (!cost.terminal) {
    detail::fail(ErrorKind::kInvalidArgument, "terminal cost is required");
  }
  const SampleSet& sample = est.sample();
  const Eigen::Index m = sample.size();
  ControlFeatures features(est, grid);

  std::vector<ValueTable> tables(n + 1);
  tables[n] = {n, evaluate_at_successors(sample, cost.terminal)};
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!std::isfinite(tables[n].values[i])) {
      detail::fail(ErrorKind::kNonFinite, "terminal value not finite at t=",
                   n, ", i=", i);
    }
  }

  // Kx(k, i) = k_x(x_k, x'_i); the recursion evaluates the embedding at
  // every successor for every candidate in one product per step.
  const Matrix kx = gram(est.kernel_x(), sample.states(), sample.successors());
  const Eigen::Index p = grid.size();

  std::vector<Vector> successors;
  if (cost.stage) {
    successors.reserve(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
      successors.emplace_back(sample.successors().row(i).transpose());
    }
  }

  std::vector<Vector> weights(n);
  for (std::size_t t = n; t-- > 0;) {
    weights[t] = est.inverse() * tables[t + 1].values;
    Matrix row_block = kx.transpose() *
                       (weights[t].asDiagonal() * features.matrix());  // M x P
    if (cost.stage) {
      for (Eigen::Index j = 0; j < p; ++j) {
        const Vector u = grid.candidate(j);
        for (Eigen::Index i = 0; i < m; ++i) {
          row_block(i, j) =
              cost.stage(t, successors[static_cast<std::size_t>(i)], u) +
              row_block(i, j);
        }
      }
    }
    Vector v(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      Eigen::Index best = 0;
      for (Eigen::Index j = 0; j < p; ++j) {
        if (!std::isfinite(row_block(i, j))) {
          detail::fail(ErrorKind::kNonFinite, "non-finite value at t=", t,
                       ", i=", i);
        }
        if (row_block(i, j) < row_block(i, best)) best = j;
      }
      v[i] = row_block(i, best);
    }
    tables[t] = {t, std::move(v)};
  }

  return {std::move(tables),
          DpPolicy(est, std::move(features), std::move(weights), cost)};
}

struct TrajectoryResult {
  std::vector<Vector> states;    // N + 1 entries unless truncated
  std::vector<Vector> controls;  // N entries unless truncated
  std::vector<double> costs;     // stage costs, then the terminal cost
  double total_cost = 0.0;
  bool truncated = false;
  std::string error;
};

/// Closed-loop simulation. `controller(t, x)` returns the control applied at
/// time t; `system_step(x, u, rng)` returns the successor. Costs are
/// recorded when `cost` is given.
template <typename StepFn, typename Controller>
TrajectoryResult rollout(StepFn&& system_step, Controller&& controller,
                         const Vector& x0, std::size_t n, Rng& rng,
                         const CostFunction* cost = nullptr) {
  if (n == 0) detail::fail(ErrorKind::kInvalidArgument, "horizon must be >= 1");
  TrajectoryResult out;
  out.states.reserve(n + 1);
  out.controls.reserve(n);
  out.states.push_back(x0);
  for (std::size_t t = 0; t < n; ++t) {
    const Vector& x = out.states.back();
    Vector u = controller(t, x);
    Vector next = system_step(x, u, rng);
    if (cost) {
      out.costs.push_back(cost->stage_at(t, x, u));
      out.total_cost += out.costs.back();
    }
    out.controls.push_back(std::move(u));
    if (!next.allFinite()) {
      out.truncated = true;
      out.error = "non-finite state at t=" + std::to_string(t + 1);
      return out;
    }
    out.states.push_back(std::move(next));
  }
  if (cost && cost->terminal) {
    out.costs.push_back(cost->terminal(out.states.back()));
    out.total_cost += out.costs.back();
  }
  return out;
}

}  // namespace kcontrol
