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

// Benchmark pipelines shared by the command-line driver and the test suites:
// integrator vector fields and control-error sweeps, timing sweeps, and
// unicycle tracking with greedy or dynamic-programming policies.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "kcontrol/config.hpp"
#include "kcontrol/dp.hpp"
#include "kcontrol/embedding.hpp"
#include "kcontrol/oracle.hpp"
#include "kcontrol/policy.hpp"
#include "kcontrol/systems.hpp"

namespace kcontrol {

// Substream ids derived from the master seed.
inline constexpr std::uint64_t kSampleStream = 0;
inline constexpr std::uint64_t kSweepStream = 100;
inline constexpr std::uint64_t kBenchStream = 500;
inline constexpr std::uint64_t kEpisodeStream = 1000;

inline Matrix evaluation_points(const ExperimentConfig& c) {
  if (c.eval_points.empty()) return detail::lattice_points(c.eval_box, c.eval_counts);
  Matrix pts(static_cast<Eigen::Index>(c.eval_points.size()), c.system.state_dim());
  for (std::size_t r = 0; r < c.eval_points.size(); ++r) {
    for (std::size_t k = 0; k < c.eval_points[r].size(); ++k) {
      pts(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = c.eval_points[r][k];
    }
  }
  return pts;
}

inline ControlGrid control_grid(const ExperimentConfig& c) {
  return ControlGrid::lattice(c.grid_box, c.grid_counts);
}

inline SampleSet draw_sample(const ExperimentConfig& c, std::size_t m,
                             std::uint64_t seed) {
  Rng rng(seed);
  return generate_sample(c.system, c.ranges, static_cast<Eigen::Index>(m), rng);
}

inline EmbeddingEstimator fit_sample(const ExperimentConfig& c, SampleSet sample) {
  const auto m = static_cast<std::size_t>(sample.size());
  return fit(std::move(sample), KernelSpec::gaussian(c.sigma_x),
             KernelSpec::gaussian(c.sigma_u), c.regularization(m));
}

/// Regulation cost c(x) = |x|_2.
inline double norm_cost(const Vector& x) { return x.norm(); }

// ---------------------------------------------------------------------------
// Double integrator vector field and control error.

struct VectorFieldRow {
  Vector x;
  Vector u_kernel;
  Vector next_kernel;  // noise-free successor under u_kernel
  Vector u_oracle;
  Vector next_oracle;
  double sq_error;
};

inline void require_integrator(const ExperimentConfig& c) {
  if (c.system.kind() != SystemKind::kDoubleIntegrator) {
    detail::fail(ErrorKind::kConfig,
                 "the closed-form oracle is only available for the double integrator");
  }
}

inline std::vector<VectorFieldRow> vector_field(const ExperimentConfig& c,
                                                const EmbeddingEstimator& est,
                                                const Matrix& points) {
  require_integrator(c);
  detail::require_same_dim(est.sample().state_dim(), c.system.state_dim(),
                           "estimator state");
  detail::require_same_dim(est.sample().control_dim(), c.system.control_dim(),
                           "estimator control");
  const ControlGrid grid = control_grid(c);
  const GreedyPolicy policy(est, evaluate_at_successors(est.sample(), norm_cost), grid);
  const SystemSpec clean = c.system.without_noise();
  const Vector zero = Vector::Zero(c.system.state_dim());
  const Interval bounds = c.grid_box.front();

  std::vector<VectorFieldRow> rows;
  rows.reserve(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    const Vector x = points.row(r).transpose();
    const Decision d = policy.decide(x);
    Vector u_oracle(1);
    u_oracle[0] = optimal_control_integrator(x, c.system.sampling_time(), bounds);
    rows.push_back({x, d.control, step_with(clean, x, d.control, zero), u_oracle,
                    step_with(clean, x, u_oracle, zero),
                    (d.control - u_oracle).squaredNorm()});
  }
  return rows;
}

struct ErrorStats {
  double max;
  double mean;
};

inline ErrorStats control_error(const std::vector<VectorFieldRow>& rows) {
  ErrorStats s{0.0, 0.0};
  for (const auto& r : rows) {
    s.max = std::max(s.max, r.sq_error);
    s.mean += r.sq_error;
  }
  if (!rows.empty()) s.mean /= static_cast<double>(rows.size());
  return s;
}

struct SweepRow {
  std::size_t sample_size;
  ErrorStats error;
};

/// For each sample size k-th in the list, draws a fresh sample from substream
/// kSweepStream + k, fits, and scores the greedy controls against the oracle.
inline std::vector<SweepRow> error_sweep(const ExperimentConfig& c,
                                         const std::vector<std::size_t>& sizes,
                                         std::uint64_t seed) {
  require_integrator(c);
  const Matrix points = evaluation_points(c);
  std::vector<SweepRow> rows;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const auto est = fit_sample(c, draw_sample(c, sizes[k], derive_seed(seed, kSweepStream + k)));
    rows.push_back({sizes[k], control_error(vector_field(c, est, points))});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Timing.

struct TimingStats {
  double mean;
  double stddev;
  double min;  // best of the repetitions
};

inline TimingStats timing_stats(const std::vector<double>& samples) {
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  if (samples.size() > 1) var /= static_cast<double>(samples.size() - 1);
  return {mean, std::sqrt(var), *std::min_element(samples.begin(), samples.end())};
}

struct BenchRow {
  std::size_t axis_value;
  TimingStats fit;      // Gram assembly, factorization and inverse
  TimingStats prepare;  // c^T W and control features for the grid
  TimingStats query;    // R greedy decisions
};

namespace detail {

template <typename F>
double seconds(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

inline Matrix uniform_points(const Box& box, std::size_t count, Rng& rng) {
  Matrix pts(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(box.size()));
  for (Eigen::Index r = 0; r < pts.rows(); ++r) draw_uniform_row(box, rng, pts.row(r));
  return pts;
}

inline BenchRow bench_once(const ExperimentConfig& c, std::size_t axis_value,
                           const SampleSet& sample, const Matrix& points,
                           std::size_t repetitions) {
  const ControlGrid grid = control_grid(c);
  const Vector costs = evaluate_at_successors(sample, norm_cost);
  std::vector<double> fit_t, prep_t, query_t;
  double sink = 0.0;
  for (std::size_t rep = 0; rep <= repetitions; ++rep) {  // rep 0 is warmup
    std::optional<EmbeddingEstimator> est;
    std::optional<GreedyPolicy> policy;
    const double tf = seconds([&] { est.emplace(fit_sample(c, sample)); });
    const double tp = seconds([&] { policy.emplace(*est, costs, grid); });
    // Untimed warm-up decision.
    sink += policy->decide(points.row(0).transpose()).value;
    const double tq = seconds([&] {
      for (Eigen::Index r = 0; r < points.rows(); ++r) {
        sink += policy->decide(points.row(r).transpose()).value;
      }
    });
    if (rep == 0) continue;
    fit_t.push_back(tf);
    prep_t.push_back(tp);
    query_t.push_back(tq);
  }
  // Keeps the query loop observable.
  if (!std::isfinite(sink)) fail(ErrorKind::kNonFinite, "benchmark produced non-finite values");
  return {axis_value, timing_stats(fit_t), timing_stats(prep_t), timing_stats(query_t)};
}

}  // namespace detail

/// Fit and query timing as a function of the sample size M.
inline std::vector<BenchRow> bench_sample_sizes(const ExperimentConfig& c,
                                                const std::vector<std::size_t>& sizes,
                                                std::uint64_t seed) {
  const Matrix points = evaluation_points(c);
  std::vector<BenchRow> rows;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const SampleSet sample = draw_sample(c, sizes[k], derive_seed(seed, kBenchStream + k));
    rows.push_back(detail::bench_once(c, sizes[k], sample, points, c.bench_repetitions));
  }
  return rows;
}

/// Fit and query timing as a function of the number R of evaluation points,
/// drawn uniformly from the evaluation box; M is the configured sample size.
inline std::vector<BenchRow> bench_eval_counts(const ExperimentConfig& c,
                                               const std::vector<std::size_t>& counts,
                                               std::uint64_t seed) {
  const SampleSet sample = draw_sample(c, c.sample_size, derive_seed(seed, kBenchStream));
  std::vector<BenchRow> rows;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    Rng rng(derive_seed(seed, kBenchStream + 1 + k));
    const Matrix points = detail::uniform_points(c.eval_box, counts[k], rng);
    rows.push_back(detail::bench_once(c, counts[k], sample, points, c.bench_repetitions));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Unicycle tracking.

enum class TrackingMode { kGreedy, kDp };

inline std::string_view to_string(TrackingMode mode) {
  return mode == TrackingMode::kGreedy ? "greedy" : "dp";
}

inline double position_error(const Vector& x, const Vector& target) {
  return (x.head(2) - target.head(2)).squaredNorm();
}

struct TrackingProblem {
  SystemSpec system;
  EmbeddingEstimator estimator;
  ControlGrid grid;
  std::vector<Vector> targets;  // N + 1 points
  CostFunction cost;            // g_t = position error to targets[t]
  Vector x0;
  std::size_t horizon;
};

inline Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline TrackingProblem make_tracking_problem(const ExperimentConfig& c,
                                             std::uint64_t seed) {
  if (c.system.state_dim() < 2) {
    detail::fail(ErrorKind::kConfig, "tracking needs a planar position state");
  }
  auto est = fit_sample(c, draw_sample(c, c.sample_size, derive_seed(seed, kSampleStream)));
  auto targets = target_trajectory(to_vector(c.target_start), to_vector(c.target_end),
                                   c.horizon);
  CostFunction cost;
  cost.terminal = [goal = targets.back()](const Vector& x) { return position_error(x, goal); };
  cost.stage = [targets](std::size_t t, const Vector& x, const Vector&) {
    return position_error(x, targets[t]);
  };
  return {c.system, std::move(est), control_grid(c), std::move(targets), std::move(cost),
          to_vector(c.x0), c.horizon};
}

using Controller = std::function<Vector(std::size_t, const Vector&)>;

/// Greedy: at time t pick the control minimizing the predicted position
/// error to targets[t + 1]. DP: the backward-recursion policy.
inline Controller tracking_controller(const TrackingProblem& p, TrackingMode mode) {
  if (mode == TrackingMode::kDp) {
    DpSolution sol = backward_recursion(p.estimator, p.cost, p.grid, p.horizon);
    return [policy = std::move(sol.policy)](std::size_t t, const Vector& x) {
      return policy.decide(t, x).control;
    };
  }
  std::vector<GreedyPolicy> steps;
  steps.reserve(p.horizon);
  for (std::size_t t = 0; t < p.horizon; ++t) {
    const Vector& goal = p.targets[t + 1];
    steps.emplace_back(p.estimator,
                       evaluate_at_successors(p.estimator.sample(),
                                              [&](const Vector& y) { return position_error(y, goal); }),
                       p.grid);
  }
  return [steps = std::move(steps)](std::size_t t, const Vector& x) {
    return steps[t].decide(x).control;
  };
}

struct TrackingRun {
  std::vector<TrajectoryResult> episodes;
  double mean_total_cost;
  double solve_seconds;  // policy synthesis, excluding the fit
  double rollout_seconds;
};

/// Rolls out `episodes` closed-loop trajectories; episode e uses noise
/// substream kEpisodeStream + e, so both modes see the same disturbances.
inline TrackingRun run_tracking(const TrackingProblem& p, TrackingMode mode,
                                std::size_t episodes, std::uint64_t seed) {
  TrackingRun run{{}, 0.0, 0.0, 0.0};
  Controller controller;
  run.solve_seconds = detail::seconds([&] { controller = tracking_controller(p, mode); });
  const auto system_step = [&](const Vector& x, const Vector& u, Rng& rng) {
    return wrap_heading(p.system, step(p.system, x, u, rng));
  };
  run.rollout_seconds = detail::seconds([&] {
    for (std::size_t e = 0; e < episodes; ++e) {
      Rng rng(derive_seed(seed, kEpisodeStream + e));
      run.episodes.push_back(rollout(system_step, controller, p.x0, p.horizon, rng, &p.cost));
    }
  });
  for (const auto& ep : run.episodes) run.mean_total_cost += ep.total_cost;
  run.mean_total_cost /= static_cast<double>(episodes);
  return run;
}

}  // namespace kcontrol
