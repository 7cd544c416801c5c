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

// CSV emitters behind the kcontrol command-line driver. Every table starts
// with a "# config_hash=<hex> seed=<n>" comment line and a header row.

#pragma once

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "kcontrol/config.hpp"
#include "kcontrol/experiments.hpp"
#include "kcontrol/io.hpp"

namespace kcontrol {

inline std::string provenance(const ExperimentConfig& c, std::uint64_t seed) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "config_hash=%016" PRIx64 " seed=%" PRIu64,
                config_hash(c), seed);
  return buf;
}

namespace detail {

inline void write_columns(std::ostream& os, std::string_view prefix, Eigen::Index n) {
  for (Eigen::Index k = 0; k < n; ++k) os << ',' << prefix << k + 1;
}

inline void write_values(std::ostream& os, const Vector& v) {
  for (Eigen::Index k = 0; k < v.size(); ++k) os << ',' << format_double(v[k]);
}

}  // namespace detail

/// `sample`: M transitions drawn from the configured plant.
inline SampleSet sample_command(const ExperimentConfig& c, std::uint64_t seed,
                                std::ostream& os) {
  SampleSet sample = draw_sample(c, c.sample_size, derive_seed(seed, kSampleStream));
  write_sample_csv(os, sample, provenance(c, seed));
  return sample;
}

/// `vector-field`: one row per evaluation point,
/// r,x1..xn,u_kernel1..,next_kernel1..,u_oracle1..,next_oracle1..,sq_error
inline void write_vector_field_csv(std::ostream& os, const std::vector<VectorFieldRow>& rows,
                                   const std::string& comment) {
  detail::write_comment(os, comment);
  if (rows.empty()) {
    os << "r\n";
    return;
  }
  const auto n = rows.front().x.size();
  const auto m = rows.front().u_kernel.size();
  os << 'r';
  detail::write_columns(os, "x", n);
  detail::write_columns(os, "u_kernel", m);
  detail::write_columns(os, "next_kernel", n);
  detail::write_columns(os, "u_oracle", m);
  detail::write_columns(os, "next_oracle", n);
  os << ",sq_error\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    os << r;
    detail::write_values(os, row.x);
    detail::write_values(os, row.u_kernel);
    detail::write_values(os, row.next_kernel);
    detail::write_values(os, row.u_oracle);
    detail::write_values(os, row.next_oracle);
    os << ',' << format_double(row.sq_error) << '\n';
  }
}

/// `error-sweep`: sample_size,max_sq_error,mean_sq_error
inline std::vector<SweepRow> error_sweep_command(const ExperimentConfig& c, std::uint64_t seed,
                                                 std::ostream& os) {
  auto rows = error_sweep(c, c.sweep_sample_sizes, seed);
  detail::write_comment(os, provenance(c, seed));
  os << "sample_size,max_sq_error,mean_sq_error\n";
  for (const auto& r : rows) {
    os << r.sample_size << ',' << format_double(r.error.max) << ','
       << format_double(r.error.mean) << '\n';
  }
  return rows;
}

enum class BenchAxis { kSampleSize, kEvalCount };

/// `bench`: axis column (M or R) followed by mean/stddev seconds of the fit,
/// prepare and query phases.
inline std::vector<BenchRow> bench_command(const ExperimentConfig& c, BenchAxis axis,
                                           std::uint64_t seed, std::ostream& os) {
  auto rows = axis == BenchAxis::kSampleSize
                  ? bench_sample_sizes(c, c.bench_sample_sizes, seed)
                  : bench_eval_counts(c, c.bench_eval_counts, seed);
  detail::write_comment(os, provenance(c, seed));
  os << (axis == BenchAxis::kSampleSize ? "M" : "R")
     << ",fit_mean_s,fit_std_s,prepare_mean_s,prepare_std_s,query_mean_s,query_std_s\n";
  for (const auto& r : rows) {
    os << r.axis_value;
    for (const auto& s : {r.fit, r.prepare, r.query}) {
      os << ',' << format_double(s.mean) << ',' << format_double(s.stddev);
    }
    os << '\n';
  }
  return rows;
}

/// `track`: episode,t,x1..xn,target1,target2,u1..um,cost. The row at t = N
/// has empty control fields and carries the terminal cost.
inline void write_tracking_csv(std::ostream& os, const TrackingProblem& p,
                               const TrackingRun& run, const std::string& comment) {
  detail::write_comment(os, comment);
  const auto n = p.system.state_dim();
  const auto m = p.system.control_dim();
  os << "episode,t";
  detail::write_columns(os, "x", n);
  os << ",target1,target2";
  detail::write_columns(os, "u", m);
  os << ",cost\n";
  for (std::size_t e = 0; e < run.episodes.size(); ++e) {
    const auto& ep = run.episodes[e];
    for (std::size_t t = 0; t < ep.states.size(); ++t) {
      os << e << ',' << t;
      detail::write_values(os, ep.states[t]);
      os << ',' << format_double(p.targets[t][0]) << ',' << format_double(p.targets[t][1]);
      if (t < ep.controls.size()) {
        detail::write_values(os, ep.controls[t]);
      } else {
        for (Eigen::Index k = 0; k < m; ++k) os << ',';
      }
      os << ',';
      if (t < ep.costs.size()) os << format_double(ep.costs[t]);
      os << '\n';
    }
  }
}

}  // namespace kcontrol
