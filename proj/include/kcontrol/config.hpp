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
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kcontrol/core.hpp"
#include "kcontrol/systems.hpp"

namespace kcontrol {

/// Everything an experiment run depends on besides the output location.
struct ExperimentConfig {
  SystemSpec system = SystemSpec::double_integrator();
  SamplingRanges ranges = integrator_ranges();
  std::size_t sample_size = 1600;

  Box grid_box = {{-1.0, 1.0}};
  std::vector<std::size_t> grid_counts = {100};

  // Evaluation points: explicit list when non-empty, else a lattice.
  Box eval_box = {{-1.0, 1.0}, {-1.0, 1.0}};
  std::vector<std::size_t> eval_counts = {5, 5};
  std::vector<std::vector<double>> eval_points;

  double sigma_x = 1.0;
  double sigma_u = 1.0;
  std::optional<double> lambda;  // defaults to 1 / M^2

  std::size_t horizon = 20;
  std::optional<std::uint64_t> seed;
  std::string output;

  std::vector<std::size_t> sweep_sample_sizes = {100, 200, 400, 800, 1600, 3200};

  std::vector<std::size_t> bench_sample_sizes = {250, 500, 1000, 2000};
  std::vector<std::size_t> bench_eval_counts = {10, 20, 30, 40, 51};
  std::size_t bench_repetitions = 5;

  std::vector<double> x0 = {-0.8, 0.0, std::numbers::pi};
  std::vector<double> target_start = {-1.0, -1.0, std::numbers::pi / 4};
  std::vector<double> target_end = {1.0, 1.0, std::numbers::pi / 4};
  std::size_t episodes = 1;

  double regularization(std::size_t m) const {
    return lambda ? *lambda : default_regularization(static_cast<Eigen::Index>(m));
  }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Double integrator regulation setup with the given disturbance.
inline ExperimentConfig integrator_config(
    DisturbanceSpec disturbance = DisturbanceSpec::gaussian(0.01)) {
  ExperimentConfig c;
  c.system = SystemSpec::double_integrator(1.0, disturbance);
  return c;
}

/// Unicycle tracking setup: sigma 3, 11 x 21 control lattice on
/// [0, 1] x [-10, 10], horizon 20.
inline ExperimentConfig vehicle_config() {
  ExperimentConfig c;
  c.system = SystemSpec::nonholonomic();
  c.ranges = vehicle_ranges();
  c.grid_box = {{0.0, 1.0}, {-10.0, 10.0}};
  c.grid_counts = {11, 21};
  c.eval_box = {{-1.0, 1.0}, {-1.0, 1.0}, {-std::numbers::pi, std::numbers::pi}};
  c.eval_counts = {3, 3, 3};
  c.sigma_x = 3.0;
  c.sigma_u = 3.0;
  return c;
}

namespace detail {

inline nlohmann::json box_to_json(const Box& box) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& iv : box) j.push_back({iv.lo, iv.hi});
  return j;
}

inline Box box_from_json(const nlohmann::json& j) {
  Box box;
  for (const auto& iv : j) {
    if (!iv.is_array() || iv.size() != 2) {
      fail(ErrorKind::kConfig, "box axes must be [lo, hi] pairs");
    }
    box.push_back({iv[0].get<double>(), iv[1].get<double>()});
  }
  return box;
}

inline nlohmann::json disturbance_to_json(const DisturbanceSpec& d) {
  switch (d.family()) {
    case DisturbanceFamily::kNone: return {{"family", "none"}};
    case DisturbanceFamily::kGaussian:
      return {{"family", "gaussian"}, {"variance", d.scale()}};
    case DisturbanceFamily::kBeta:
      return {{"family", "beta"}, {"alpha", d.shape_a()}, {"beta", d.shape_b()},
              {"scale", d.scale()}};
    case DisturbanceFamily::kExponential:
      return {{"family", "exponential"}, {"rate", d.rate()}, {"scale", d.scale()}};
  }
  return {};
}

inline DisturbanceSpec disturbance_from_json(const nlohmann::json& j) {
  const auto family = j.at("family").get<std::string>();
  if (family == "none") return DisturbanceSpec::none();
  if (family == "gaussian") return DisturbanceSpec::gaussian(j.at("variance").get<double>());
  if (family == "beta") {
    return DisturbanceSpec::beta(j.at("alpha").get<double>(), j.at("beta").get<double>(),
                                 j.at("scale").get<double>());
  }
  if (family == "exponential") {
    return DisturbanceSpec::exponential(j.at("rate").get<double>(),
                                        j.at("scale").get<double>());
  }
  fail(ErrorKind::kConfig, "unknown disturbance family '", family, "'");
}

}  // namespace detail

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["system"] = {
      {"kind", c.system.kind() == SystemKind::kDoubleIntegrator ? "double_integrator"
                                                                : "nonholonomic"},
      {"sampling_time", c.system.sampling_time()},
      {"v_min", c.system.v_min()},
      {"disturbance", detail::disturbance_to_json(c.system.disturbance())}};
  j["sampling"] = {{"state_box", detail::box_to_json(c.ranges.state_box)},
                   {"control_box", detail::box_to_json(c.ranges.control_box)}};
  j["sample_size"] = c.sample_size;
  j["grid"] = {{"box", detail::box_to_json(c.grid_box)}, {"counts", c.grid_counts}};
  j["evaluation"] = {{"box", detail::box_to_json(c.eval_box)},
                     {"counts", c.eval_counts},
                     {"points", c.eval_points}};
  j["kernel"] = {{"sigma_x", c.sigma_x}, {"sigma_u", c.sigma_u},
                 {"lambda", c.lambda ? nlohmann::json(*c.lambda) : nlohmann::json()}};
  j["horizon"] = c.horizon;
  j["seed"] = c.seed ? nlohmann::json(*c.seed) : nlohmann::json();
  j["output"] = c.output;
  j["error_sweep"] = {{"sample_sizes", c.sweep_sample_sizes}};
  j["bench"] = {{"sample_sizes", c.bench_sample_sizes},
                {"eval_counts", c.bench_eval_counts},
                {"repetitions", c.bench_repetitions}};
  j["tracking"] = {{"x0", c.x0},
                   {"target_start", c.target_start},
                   {"target_end", c.target_end},
                   {"episodes", c.episodes}};
  return j;
}

inline void validate_config(const ExperimentConfig& c) {
  auto bad = [](auto&&... args) { detail::fail(ErrorKind::kConfig, args...); };
  if (c.ranges.state_box.size() != static_cast<std::size_t>(c.system.state_dim())) {
    bad("state box has ", c.ranges.state_box.size(), " axes, system needs ",
        c.system.state_dim());
  }
  if (c.ranges.control_box.size() != static_cast<std::size_t>(c.system.control_dim())) {
    bad("control box has ", c.ranges.control_box.size(), " axes, system needs ",
        c.system.control_dim());
  }
  if (c.grid_box.size() != static_cast<std::size_t>(c.system.control_dim()) ||
      c.grid_counts.size() != c.grid_box.size()) {
    bad("control grid must have one axis and count per control dimension");
  }
  if (c.eval_points.empty()) {
    if (c.eval_box.size() != static_cast<std::size_t>(c.system.state_dim()) ||
        c.eval_counts.size() != c.eval_box.size()) {
      bad("evaluation lattice must have one axis and count per state dimension");
    }
  }
  for (auto n : c.grid_counts) {
    if (n == 0) bad("control grid counts must be >= 1");
  }
  for (auto n : c.eval_counts) {
    if (n == 0) bad("evaluation lattice counts must be >= 1");
  }
  for (const Box* box : {&c.ranges.state_box, &c.ranges.control_box, &c.grid_box, &c.eval_box}) {
    for (const auto& iv : *box) {
      if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.lo > iv.hi) {
        bad("box bounds must be finite with lo <= hi");
      }
    }
  }
  for (const auto& p : c.eval_points) {
    if (p.size() != static_cast<std::size_t>(c.system.state_dim())) {
      bad("evaluation point dimension must match the state");
    }
  }
  if (c.sample_size == 0) bad("sample_size must be >= 1");
  if (!(c.sigma_x > 0.0) || !(c.sigma_u > 0.0)) bad("kernel bandwidths must be > 0");
  if (c.lambda && !(*c.lambda > 0.0)) bad("lambda must be > 0");
  if (c.horizon == 0) bad("horizon must be >= 1");
  if (c.bench_repetitions < 5) bad("bench repetitions must be >= 5");
  if (c.episodes == 0) bad("episodes must be >= 1");
  const auto n = static_cast<std::size_t>(c.system.state_dim());
  if (c.system.kind() == SystemKind::kNonholonomic &&
      (c.x0.size() != n || c.target_start.size() != n || c.target_end.size() != n)) {
    bad("tracking vectors must have ", n, " entries");
  }
}

/// Missing fields keep the values of `base`; naming a different system kind
/// starts from that kind's preset instead.
inline ExperimentConfig config_from_json(const nlohmann::json& j,
                                         ExperimentConfig base = {}) {
  ExperimentConfig c = std::move(base);
  try {
    if (j.contains("system")) {
      const auto& s = j.at("system");
      const std::string base_kind =
          c.system.kind() == SystemKind::kDoubleIntegrator ? "double_integrator"
                                                           : "nonholonomic";
      const auto kind = s.value("kind", base_kind);
      // Switching plants starts from that plant's defaults.
      if (kind != base_kind) {
        if (kind == "double_integrator") c = integrator_config();
        if (kind == "nonholonomic") c = vehicle_config();
      }
      const double ts = s.value("sampling_time", c.system.sampling_time());
      const DisturbanceSpec dist = s.contains("disturbance")
                                       ? detail::disturbance_from_json(s.at("disturbance"))
                                       : c.system.disturbance();
      if (kind == "double_integrator") {
        c.system = SystemSpec::double_integrator(ts, dist);
      } else if (kind == "nonholonomic") {
        c.system = SystemSpec::nonholonomic(ts, s.value("v_min", c.system.v_min()), dist);
      } else {
        detail::fail(ErrorKind::kConfig, "unknown system kind '", kind, "'");
      }
    }
    if (j.contains("sampling")) {
      const auto& s = j.at("sampling");
      if (s.contains("state_box")) c.ranges.state_box = detail::box_from_json(s.at("state_box"));
      if (s.contains("control_box")) {
        c.ranges.control_box = detail::box_from_json(s.at("control_box"));
      }
    }
    c.sample_size = j.value("sample_size", c.sample_size);
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      if (g.contains("box")) c.grid_box = detail::box_from_json(g.at("box"));
      c.grid_counts = g.value("counts", c.grid_counts);
    }
    if (j.contains("evaluation")) {
      const auto& e = j.at("evaluation");
      if (e.contains("box")) c.eval_box = detail::box_from_json(e.at("box"));
      c.eval_counts = e.value("counts", c.eval_counts);
      c.eval_points = e.value("points", c.eval_points);
    }
    if (j.contains("kernel")) {
      const auto& k = j.at("kernel");
      c.sigma_x = k.value("sigma_x", c.sigma_x);
      c.sigma_u = k.value("sigma_u", c.sigma_u);
      if (k.contains("lambda")) {
        c.lambda = k.at("lambda").is_null() ? std::nullopt
                                            : std::optional<double>(k.at("lambda").get<double>());
      }
    }
    c.horizon = j.value("horizon", c.horizon);
    if (j.contains("seed")) {
      c.seed = j.at("seed").is_null()
                   ? std::nullopt
                   : std::optional<std::uint64_t>(j.at("seed").get<std::uint64_t>());
    }
    c.output = j.value("output", c.output);
    if (j.contains("error_sweep")) {
      c.sweep_sample_sizes = j.at("error_sweep").value("sample_sizes", c.sweep_sample_sizes);
    }
    if (j.contains("bench")) {
      const auto& b = j.at("bench");
      c.bench_sample_sizes = b.value("sample_sizes", c.bench_sample_sizes);
      c.bench_eval_counts = b.value("eval_counts", c.bench_eval_counts);
      c.bench_repetitions = b.value("repetitions", c.bench_repetitions);
    }
    if (j.contains("tracking")) {
      const auto& t = j.at("tracking");
      c.x0 = t.value("x0", c.x0);
      c.target_start = t.value("target_start", c.target_start);
      c.target_end = t.value("target_end", c.target_end);
      c.episodes = t.value("episodes", c.episodes);
    }
  } catch (const nlohmann::json::exception& e) {
    detail::fail(ErrorKind::kConfig, "malformed config: ", e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfig) throw;
    detail::fail(ErrorKind::kConfig, e.what());
  }
  validate_config(c);
  return c;
}

inline ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {}) {
  std::ifstream is(path);
  if (!is) detail::fail(ErrorKind::kConfig, "cannot open config '", path, "'");
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    detail::fail(ErrorKind::kConfig, "cannot parse config '", path, "': ", e.what());
  }
  return config_from_json(j, std::move(base));
}

/// FNV-1a over the canonical JSON, output path excluded.
inline std::uint64_t config_hash(const ExperimentConfig& c) {
  nlohmann::json j = config_to_json(c);
  j.erase("output");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace kcontrol
