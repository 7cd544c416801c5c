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

// kcontrol: command-line driver for the kernel-embedding control experiments.
//
//   kcontrol sample        --seed 7 --out sample.csv
//   kcontrol vector-field  --seed 7 [--sample s.csv | --estimator e.json]
//   kcontrol error-sweep   --seed 7
//   kcontrol bench         --sweep M|R --seed 7
//   kcontrol track         --mode greedy|dp --seed 7 [--values v.csv]
//
// On failure a single line "error: <category>: <message>" goes to stderr and
// the exit status is nonzero.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "kcontrol/commands.hpp"
#include "kcontrol/config.hpp"
#include "kcontrol/dp.hpp"
#include "kcontrol/experiments.hpp"
#include "kcontrol/io.hpp"

namespace {

using kcontrol::ErrorKind;
using kcontrol::ExperimentConfig;

constexpr int kExitUsage = 2;
constexpr int kExitFailure = 1;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string mode = "greedy";
  std::string sweep = "M";
  std::string sample_path;
  std::string estimator_path;
  std::string save_estimator;
  std::string values_path;
  std::optional<std::size_t> episodes;
};

ExperimentConfig resolve_config(const Options& o, ExperimentConfig base) {
  ExperimentConfig c = o.config_path.empty()
                           ? std::move(base)
                           : kcontrol::load_config(o.config_path, std::move(base));
  if (o.seed) c.seed = o.seed;
  if (!o.out.empty()) c.output = o.out;
  if (o.episodes) c.episodes = *o.episodes;
  kcontrol::validate_config(c);
  return c;
}

std::uint64_t require_seed(const ExperimentConfig& c) {
  if (!c.seed) {
    kcontrol::detail::fail(ErrorKind::kConfig,
                           "a seed is required (--seed or \"seed\" in the config)");
  }
  return *c.seed;
}

// Writes `text` to the configured output path, or stdout when none is set.
void emit(const ExperimentConfig& c, const std::string& text) {
  if (c.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(c.output);
  if (!os) kcontrol::detail::fail(ErrorKind::kIo, "cannot open '", c.output, "' for writing");
  os << text;
  if (!os) kcontrol::detail::fail(ErrorKind::kIo, "write to '", c.output, "' failed");
}

void run_sample(const Options& o) {
  const auto c = resolve_config(o, kcontrol::integrator_config());
  std::ostringstream os;
  kcontrol::sample_command(c, require_seed(c), os);
  emit(c, os.str());
}

void run_vector_field(const Options& o) {
  const auto c = resolve_config(o, kcontrol::integrator_config());
  kcontrol::require_integrator(c);
  std::optional<kcontrol::EmbeddingEstimator> est;
  std::uint64_t seed = c.seed.value_or(0);
  if (!o.estimator_path.empty()) {
    est.emplace(kcontrol::load_estimator(o.estimator_path));
  } else if (!o.sample_path.empty()) {
    est.emplace(kcontrol::fit_sample(c, kcontrol::load_sample_csv(o.sample_path)));
  } else {
    seed = require_seed(c);
    est.emplace(kcontrol::fit_sample(
        c, kcontrol::draw_sample(c, c.sample_size,
                                 kcontrol::derive_seed(seed, kcontrol::kSampleStream))));
  }
  if (!o.save_estimator.empty()) kcontrol::save_estimator(o.save_estimator, *est);
  const auto rows = kcontrol::vector_field(c, *est, kcontrol::evaluation_points(c));
  std::ostringstream os;
  kcontrol::write_vector_field_csv(os, rows, kcontrol::provenance(c, seed));
  emit(c, os.str());
  const auto stats = kcontrol::control_error(rows);
  std::cerr << "summary points=" << rows.size() << " max_sq_error="
            << kcontrol::format_double(stats.max)
            << " mean_sq_error=" << kcontrol::format_double(stats.mean) << '\n';
}

void run_error_sweep(const Options& o) {
  const auto c = resolve_config(o, kcontrol::integrator_config());
  std::ostringstream os;
  kcontrol::error_sweep_command(c, require_seed(c), os);
  emit(c, os.str());
}

void run_bench(const Options& o) {
  const auto c = resolve_config(o, kcontrol::integrator_config());
  const auto axis =
      o.sweep == "R" ? kcontrol::BenchAxis::kEvalCount : kcontrol::BenchAxis::kSampleSize;
  std::ostringstream os;
  kcontrol::bench_command(c, axis, require_seed(c), os);
  emit(c, os.str());
}

void run_track(const Options& o) {
  const auto c = resolve_config(o, kcontrol::vehicle_config());
  const auto seed = require_seed(c);
  const auto mode = o.mode == "dp" ? kcontrol::TrackingMode::kDp : kcontrol::TrackingMode::kGreedy;
  if (!o.values_path.empty() && mode != kcontrol::TrackingMode::kDp) {
    kcontrol::detail::fail(ErrorKind::kInvalidArgument, "--values needs --mode dp");
  }
  const auto problem = kcontrol::make_tracking_problem(c, seed);
  const auto run = kcontrol::run_tracking(problem, mode, c.episodes, seed);
  std::ostringstream os;
  kcontrol::write_tracking_csv(os, problem, run, kcontrol::provenance(c, seed));
  emit(c, os.str());

  if (!o.values_path.empty()) {
    const auto sol = kcontrol::backward_recursion(problem.estimator, problem.cost,
                                                  problem.grid, problem.horizon);
    std::ofstream vs(o.values_path);
    if (!vs) kcontrol::detail::fail(ErrorKind::kIo, "cannot open '", o.values_path, "'");
    kcontrol::write_value_tables_csv(vs, problem.estimator.sample(), sol.values,
                                     kcontrol::provenance(c, seed));
  }
  std::size_t truncated = 0;
  for (const auto& ep : run.episodes) truncated += ep.truncated ? 1 : 0;
  std::cerr << "summary mode=" << kcontrol::to_string(mode) << " episodes=" << run.episodes.size()
            << " truncated=" << truncated
            << " mean_total_cost=" << kcontrol::format_double(run.mean_total_cost)
            << " solve_seconds=" << run.solve_seconds
            << " rollout_seconds=" << run.rollout_seconds << '\n';
}

std::string one_line(std::string msg) {
  for (auto& ch : msg) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  return msg;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "master seed (overrides the config)");
  cmd->add_option("--out", o.out, "output CSV path (default: stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel-embedding stochastic optimal control experiments"};
  app.require_subcommand(1);
  Options o;

  auto* sample = app.add_subcommand("sample", "draw a transition sample");
  add_common(sample, o);

  auto* field = app.add_subcommand("vector-field", "kernel vs closed-form integrator controls");
  add_common(field, o);
  field->add_option("--sample", o.sample_path, "fit on this sample CSV")
      ->check(CLI::ExistingFile);
  field->add_option("--estimator", o.estimator_path, "reuse a saved estimator snapshot")
      ->check(CLI::ExistingFile);
  field->add_option("--save-estimator", o.save_estimator, "write the fitted estimator");

  auto* sweep = app.add_subcommand("error-sweep", "control error against sample size");
  add_common(sweep, o);

  auto* bench = app.add_subcommand("bench", "timing against M or R");
  add_common(bench, o);
  bench->add_option("--sweep", o.sweep, "axis to sweep")
      ->check(CLI::IsMember({"M", "R"}));

  auto* track = app.add_subcommand("track", "unicycle target tracking");
  add_common(track, o);
  track->add_option("--mode", o.mode, "policy")->check(CLI::IsMember({"greedy", "dp"}));
  track->add_option("--episodes", o.episodes, "closed-loop repetitions");
  track->add_option("--values", o.values_path, "write DP value tables (dp mode)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << one_line(e.what()) << '\n';
    return kExitUsage;
  }

  try {
    if (sample->parsed()) run_sample(o);
    if (field->parsed()) run_vector_field(o);
    if (sweep->parsed()) run_error_sweep(o);
    if (bench->parsed()) run_bench(o);
    if (track->parsed()) run_track(o);
  } catch (const kcontrol::Error& e) {
    std::cerr << "error: " << kcontrol::to_string(e.kind()) << ": " << one_line(e.what()) << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << one_line(e.what()) << '\n';
    return kExitFailure;
  }
  return 0;
}
