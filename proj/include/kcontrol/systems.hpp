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
#include <random>
#include <vector>

#include "kcontrol/core.hpp"
#include "kcontrol/embedding.hpp"

namespace kcontrol {

enum class DisturbanceFamily { kNone, kGaussian, kBeta, kExponential };

/// Additive process noise, drawn i.i.d. per state component.
///
///   Gaussian:    N(0, scale)           (scale is the variance)
///   Beta:        scale * Beta(a, b)
///   Exponential: scale * Exp(rate)
class DisturbanceSpec {
 public:
  static DisturbanceSpec none() { return DisturbanceSpec(DisturbanceFamily::kNone, 0, 0, 0); }

  static DisturbanceSpec gaussian(double variance) {
    require_positive(variance, "gaussian variance");
    return DisturbanceSpec(DisturbanceFamily::kGaussian, variance, 0, 0);
  }

  static DisturbanceSpec beta(double shape_a, double shape_b, double scale) {
    require_positive(shape_a, "beta shape a");
    require_positive(shape_b, "beta shape b");
    require_positive(scale, "beta scale");
    return DisturbanceSpec(DisturbanceFamily::kBeta, scale, shape_a, shape_b);
  }

  static DisturbanceSpec exponential(double rate, double scale) {
    require_positive(rate, "exponential rate");
    require_positive(scale, "exponential scale");
    return DisturbanceSpec(DisturbanceFamily::kExponential, scale, rate, 0);
  }

  DisturbanceFamily family() const noexcept { return family_; }
  double scale() const noexcept { return scale_; }
  double shape_a() const noexcept { return p1_; }
  double shape_b() const noexcept { return p2_; }
  double rate() const noexcept { return p1_; }

  friend bool operator==(const DisturbanceSpec&, const DisturbanceSpec&) = default;

 private:
  DisturbanceSpec(DisturbanceFamily family, double scale, double p1, double p2)
      : family_(family), scale_(scale), p1_(p1), p2_(p2) {}

  static void require_positive(double v, std::string_view what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      detail::fail(ErrorKind::kInvalidArgument, what,
                   " must be positive and finite, got ", v);
    }
  }

  DisturbanceFamily family_;
  double scale_;
  double p1_;
  double p2_;
};

inline Vector draw_disturbance(const DisturbanceSpec& spec, Eigen::Index dim,
                               Rng& rng) {
  Vector w = Vector::Zero(dim);
  switch (spec.family()) {
    case DisturbanceFamily::kNone:
      break;
    case DisturbanceFamily::kGaussian: {
      std::normal_distribution<double> normal(0.0, std::sqrt(spec.scale()));
      for (Eigen::Index k = 0; k < dim; ++k) w[k] = normal(rng);
      break;
    }
    case DisturbanceFamily::kBeta: {
      // Beta(a, b) = X / (X + Y) with X ~ Gamma(a), Y ~ Gamma(b).
      std::gamma_distribution<double> ga(spec.shape_a(), 1.0);
      std::gamma_distribution<double> gb(spec.shape_b(), 1.0);
      for (Eigen::Index k = 0; k < dim; ++k) {
        const double x = ga(rng);
        const double y = gb(rng);
        w[k] = spec.scale() * (x / (x + y));
      }
      break;
    }
    case DisturbanceFamily::kExponential: {
      std::exponential_distribution<double> expo(spec.rate());
      for (Eigen::Index k = 0; k < dim; ++k) w[k] = spec.scale() * expo(rng);
      break;
    }
  }
  return w;
}

enum class SystemKind { kDoubleIntegrator, kNonholonomic };

/// Benchmark plant: the discrete double integrator
///   x' = [[1, Ts], [0, 1]] x + [Ts^2 / 2, Ts]^T u + w
/// or the unicycle with a minimum forward speed, stepped by forward Euler
///   x' = x + Ts [(u1 + Vmin) sin x3 + w1, (u1 + Vmin) cos x3 + w2, u2 + w3].
class SystemSpec {
 public:
  static SystemSpec double_integrator(
      double sampling_time = 1.0,
      DisturbanceSpec disturbance = DisturbanceSpec::gaussian(0.01)) {
    return SystemSpec(SystemKind::kDoubleIntegrator, sampling_time, 0.0,
                      disturbance);
  }

  static SystemSpec nonholonomic(
      double sampling_time = 0.2, double v_min = 0.1,
      DisturbanceSpec disturbance = DisturbanceSpec::gaussian(0.1)) {
    return SystemSpec(SystemKind::kNonholonomic, sampling_time, v_min,
                      disturbance);
  }

  SystemKind kind() const noexcept { return kind_; }
  double sampling_time() const noexcept { return sampling_time_; }
  double v_min() const noexcept { return v_min_; }
  const DisturbanceSpec& disturbance() const noexcept { return disturbance_; }
  Eigen::Index state_dim() const noexcept {
    return kind_ == SystemKind::kDoubleIntegrator ? 2 : 3;
  }
  Eigen::Index control_dim() const noexcept {
    return kind_ == SystemKind::kDoubleIntegrator ? 1 : 2;
  }

  SystemSpec without_noise() const {
    return SystemSpec(kind_, sampling_time_, v_min_, DisturbanceSpec::none());
  }

  friend bool operator==(const SystemSpec&, const SystemSpec&) = default;

 private:
  SystemSpec(SystemKind kind, double sampling_time, double v_min,
             DisturbanceSpec disturbance)
      : kind_(kind),
        sampling_time_(sampling_time),
        v_min_(v_min),
        disturbance_(disturbance) {
    if (!(sampling_time > 0.0) || !std::isfinite(sampling_time)) {
      detail::fail(ErrorKind::kInvalidArgument,
                   "sampling time must be positive, got ", sampling_time);
    }
    if (!(v_min >= 0.0) || !std::isfinite(v_min)) {
      detail::fail(ErrorKind::kInvalidArgument,
                   "minimum velocity must be >= 0, got ", v_min);
    }
  }

  SystemKind kind_;
  double sampling_time_;
  double v_min_;
  DisturbanceSpec disturbance_;
};

/// Deterministic part of the dynamics plus an explicit disturbance vector.
inline Vector step_with(const SystemSpec& spec, const Eigen::Ref<const Vector>& x,
                        const Eigen::Ref<const Vector>& u,
                        const Eigen::Ref<const Vector>& w) {
  detail::require_same_dim(x.size(), spec.state_dim(), "system state");
  detail::require_same_dim(u.size(), spec.control_dim(), "system control");
  detail::require_same_dim(w.size(), spec.state_dim(), "disturbance");
  const double ts = spec.sampling_time();
  Vector next(spec.state_dim());
  if (spec.kind() == SystemKind::kDoubleIntegrator) {
    next[0] = x[0] + ts * x[1] + 0.5 * ts * ts * u[0] + w[0];
    next[1] = x[1] + ts * u[0] + w[1];
  } else {
    const double speed = u[0] + spec.v_min();
    next[0] = x[0] + ts * (speed * std::sin(x[2]) + w[0]);
    next[1] = x[1] + ts * (speed * std::cos(x[2]) + w[1]);
    next[2] = x[2] + ts * (u[1] + w[2]);
  }
  return next;
}

inline Vector step(const SystemSpec& spec, const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& u, Rng& rng) {
  return step_with(spec, x, u,
                   draw_disturbance(spec.disturbance(), spec.state_dim(), rng));
}

/// Maps the vehicle heading into [-pi, pi); motion is unchanged.
/// Integrator states are returned as is.
inline Vector wrap_heading(const SystemSpec& spec, Vector x) {
  if (spec.kind() != SystemKind::kNonholonomic) return x;
  detail::require_same_dim(x.size(), spec.state_dim(), "system state");
  constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
  x[2] -= kTwoPi * std::floor((x[2] + 0.5 * kTwoPi) / kTwoPi);
  return x;
}

struct SamplingRanges {
  Box state_box;
  Box control_box;

  friend bool operator==(const SamplingRanges&, const SamplingRanges&) = default;
};

inline SamplingRanges integrator_ranges() {
  return {{{-1.0, 1.0}, {-1.0, 1.0}}, {{-1.1, 1.1}}};
}

inline SamplingRanges vehicle_ranges() {
  return {{{-1.1, 1.1}, {-1.1, 1.1}, {-6.0, 6.0}}, {{-0.1, 1.2}, {-10.1, 10.1}}};
}

namespace detail {

template <typename Row>
void draw_uniform_row(const Box& box, Rng& rng, Row&& out) {
  for (std::size_t k = 0; k < box.size(); ++k) {
    std::uniform_real_distribution<double> uni(box[k].lo, box[k].hi);
    out[static_cast<Eigen::Index>(k)] = uni(rng);
  }
}

}  // namespace detail

/// Draws M triples: x_i and u_i uniform over their boxes, x'_i = step(x_i, u_i).
/// Per triple the rng is consumed in the order state, control, disturbance.
inline SampleSet generate_sample(const SystemSpec& spec,
                                 const SamplingRanges& ranges, Eigen::Index m,
                                 Rng& rng) {
  if (m < 1) detail::fail(ErrorKind::kInvalidArgument, "sample size must be >= 1");
  detail::require_same_dim(static_cast<Eigen::Index>(ranges.state_box.size()),
                           spec.state_dim(), "state box");
  detail::require_same_dim(static_cast<Eigen::Index>(ranges.control_box.size()),
                           spec.control_dim(), "control box");
  for (const auto& iv : ranges.state_box) {
    if (!(iv.lo < iv.hi)) detail::fail(ErrorKind::kInvalidArgument, "state box needs lo < hi");
  }
  for (const auto& iv : ranges.control_box) {
    if (!(iv.lo < iv.hi)) detail::fail(ErrorKind::kInvalidArgument, "control box needs lo < hi");
  }

  Matrix states(m, spec.state_dim());
  Matrix controls(m, spec.control_dim());
  Matrix successors(m, spec.state_dim());
  for (Eigen::Index i = 0; i < m; ++i) {
    detail::draw_uniform_row(ranges.state_box, rng, states.row(i));
    detail::draw_uniform_row(ranges.control_box, rng, controls.row(i));
    successors.row(i) =
        step(spec, states.row(i).transpose(), controls.row(i).transpose(), rng)
            .transpose();
  }
  return SampleSet(std::move(states), std::move(controls), std::move(successors));
}

/// N + 1 points on the segment from `from` to `to`, endpoints exact.
inline std::vector<Vector> target_trajectory(const Eigen::Ref<const Vector>& from,
                                             const Eigen::Ref<const Vector>& to,
                                             std::size_t n) {
  detail::require_same_dim(from.size(), to.size(), "trajectory endpoints");
  if (n == 0) detail::fail(ErrorKind::kInvalidArgument, "horizon must be >= 1");
  std::vector<Vector> points;
  points.reserve(n + 1);
  for (std::size_t t = 0; t <= n; ++t) {
    const double s = static_cast<double>(t) / static_cast<double>(n);
    points.emplace_back(t == n ? Vector(to) : Vector(from + s * (to - from)));
  }
  return points;
}

}  // namespace kcontrol
