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

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "kcontrol/core.hpp"
#include "kcontrol/dp.hpp"
#include "kcontrol/embedding.hpp"
#include "kcontrol/kernels.hpp"

namespace kcontrol {

inline constexpr std::string_view kEstimatorSchema = "kcontrol.estimator/1";

/// 17 significant digits; parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
    text.remove_prefix(1);
  }
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' ||
                           text.back() == '\r')) {
    text.remove_suffix(1);
  }
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    detail::fail(ErrorKind::kIo, "cannot parse number '", text, "'");
  }
  return v;
}

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline void write_comment(std::ostream& os, std::string_view comment) {
  if (comment.empty()) return;
  std::size_t start = 0;
  while (start <= comment.size()) {
    const auto nl = comment.find('\n', start);
    const auto line = comment.substr(start, nl == std::string_view::npos
                                                ? std::string_view::npos
                                                : nl - start);
    os << "# " << line << '\n';
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
}

inline bool skippable(std::string_view line) {
  return line.empty() || line.front() == '#' || line == "\r";
}

}  // namespace detail

/// Header x1..xn,u1..um,xp1..xpn, then one transition per row. `comment`
/// lines are written first, each prefixed with "# ".
inline void write_sample_csv(std::ostream& os, const SampleSet& sample,
                             std::string_view comment = {}) {
  detail::write_comment(os, comment);
  const auto n = sample.state_dim();
  const auto m = sample.control_dim();
  std::string header;
  for (Eigen::Index k = 0; k < n; ++k) header += "x" + std::to_string(k + 1) + ",";
  for (Eigen::Index k = 0; k < m; ++k) header += "u" + std::to_string(k + 1) + ",";
  for (Eigen::Index k = 0; k < n; ++k) {
    header += "xp" + std::to_string(k + 1);
    if (k + 1 < n) header += ",";
  }
  os << header << '\n';
  for (Eigen::Index i = 0; i < sample.size(); ++i) {
    std::string row;
    for (Eigen::Index k = 0; k < n; ++k) row += format_double(sample.states()(i, k)) + ",";
    for (Eigen::Index k = 0; k < m; ++k) row += format_double(sample.controls()(i, k)) + ",";
    for (Eigen::Index k = 0; k < n; ++k) {
      row += format_double(sample.successors()(i, k));
      if (k + 1 < n) row += ",";
    }
    os << row << '\n';
  }
}

inline SampleSet read_sample_csv(std::istream& is) {
  std::string line;
  while (std::getline(is, line) && detail::skippable(line)) {
  }
  if (line.empty() || line.front() == '#') {
    detail::fail(ErrorKind::kIo, "sample CSV has no header row");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto names = detail::split_csv(line);

  // Columns must be exactly x1..xn, u1..um, xp1..xpn in that order.
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  std::size_t c = 0;
  auto expect = [&](std::string_view prefix, Eigen::Index& count) {
    while (c < names.size() &&
           names[c] == std::string(prefix) + std::to_string(count + 1)) {
      ++count;
      ++c;
    }
  };
  expect("x", n);
  expect("u", m);
  Eigen::Index np = 0;
  expect("xp", np);
  if (c != names.size() || n < 1 || m < 1 || np != n) {
    detail::fail(ErrorKind::kIo, "sample CSV header must be x1..xn,u1..um,",
                 "xp1..xpn; got '", line, "'");
  }

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (detail::skippable(line)) continue;
    const auto fields = detail::split_csv(line);
    if (fields.size() != names.size()) {
      detail::fail(ErrorKind::kIo, "sample CSV row ", line_no, " has ",
                   fields.size(), " fields, expected ", names.size());
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (auto f : fields) row.push_back(parse_double(f));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) detail::fail(ErrorKind::kIo, "sample CSV has no rows");

  const auto count = static_cast<Eigen::Index>(rows.size());
  Matrix states(count, n), controls(count, m), successors(count, n);
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < n; ++k) states(i, k) = r[static_cast<std::size_t>(k)];
    for (Eigen::Index k = 0; k < m; ++k) controls(i, k) = r[static_cast<std::size_t>(n + k)];
    for (Eigen::Index k = 0; k < n; ++k) {
      successors(i, k) = r[static_cast<std::size_t>(n + m + k)];
    }
  }
  return SampleSet(std::move(states), std::move(controls), std::move(successors));
}

inline void save_sample_csv(const std::string& path, const SampleSet& sample,
                            std::string_view comment = {}) {
  std::ofstream os(path);
  if (!os) detail::fail(ErrorKind::kIo, "cannot open '", path, "' for writing");
  write_sample_csv(os, sample, comment);
  if (!os) detail::fail(ErrorKind::kIo, "write to '", path, "' failed");
}

inline SampleSet load_sample_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) detail::fail(ErrorKind::kIo, "cannot open '", path, "'");
  return read_sample_csv(is);
}

namespace detail {

inline nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const nlohmann::json& j, std::string_view what) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    fail(ErrorKind::kIo, "snapshot field '", what, "' must be a non-empty 2-D array");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      fail(ErrorKind::kIo, "snapshot field '", what, "' is ragged at row ", i);
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
  }
  return m;
}

}  // namespace detail

/// Snapshot holding the sample, kernel bandwidths, lambda and W.
inline nlohmann::json estimator_to_json(const EmbeddingEstimator& est) {
  return {
      {"schema", kEstimatorSchema},
      {"kernel_x", {{"family", "gaussian"}, {"bandwidth", est.kernel_x().bandwidth()}}},
      {"kernel_u", {{"family", "gaussian"}, {"bandwidth", est.kernel_u().bandwidth()}}},
      {"lambda", est.lambda()},
      {"states", detail::matrix_to_json(est.sample().states())},
      {"controls", detail::matrix_to_json(est.sample().controls())},
      {"successors", detail::matrix_to_json(est.sample().successors())},
      {"inverse", detail::matrix_to_json(est.inverse())},
  };
}

inline EmbeddingEstimator estimator_from_json(const nlohmann::json& j) {
  try {
    if (!j.contains("schema") || j.at("schema").get<std::string>() != kEstimatorSchema) {
      detail::fail(ErrorKind::kIo, "estimator snapshot schema must be '",
                   kEstimatorSchema, "'");
    }
    auto kernel = [](const nlohmann::json& k) {
      if (k.at("family").get<std::string>() != "gaussian") {
        detail::fail(ErrorKind::kIo, "unsupported kernel family");
      }
      return KernelSpec::gaussian(k.at("bandwidth").get<double>());
    };
    SampleSet sample(detail::matrix_from_json(j.at("states"), "states"),
                     detail::matrix_from_json(j.at("controls"), "controls"),
                     detail::matrix_from_json(j.at("successors"), "successors"));
    return EmbeddingEstimator(std::move(sample), kernel(j.at("kernel_x")),
                              kernel(j.at("kernel_u")), j.at("lambda").get<double>(),
                              detail::matrix_from_json(j.at("inverse"), "inverse"));
  } catch (const nlohmann::json::exception& e) {
    detail::fail(ErrorKind::kIo, "malformed estimator snapshot: ", e.what());
  }
}

inline void save_estimator(const std::string& path, const EmbeddingEstimator& est) {
  std::ofstream os(path);
  if (!os) detail::fail(ErrorKind::kIo, "cannot open '", path, "' for writing");
  os << estimator_to_json(est).dump() << '\n';
  if (!os) detail::fail(ErrorKind::kIo, "write to '", path, "' failed");
}

inline EmbeddingEstimator load_estimator(const std::string& path) {
  std::ifstream is(path);
  if (!is) detail::fail(ErrorKind::kIo, "cannot open '", path, "'");
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    detail::fail(ErrorKind::kIo, "cannot parse '", path, "': ", e.what());
  }
  return estimator_from_json(j);
}

/// Columns t,i,xp1..xpn,value; one row per (table, successor).
inline void write_value_tables_csv(std::ostream& os, const SampleSet& sample,
                                   const std::vector<ValueTable>& tables,
                                   std::string_view comment = {}) {
  detail::write_comment(os, comment);
  os << "t,i";
  for (Eigen::Index k = 0; k < sample.state_dim(); ++k) os << ",xp" << k + 1;
  os << ",value\n";
  for (const auto& table : tables) {
    detail::require_same_dim(table.values.size(), sample.size(), "value table");
    for (Eigen::Index i = 0; i < sample.size(); ++i) {
      os << table.t << ',' << i;
      for (Eigen::Index k = 0; k < sample.state_dim(); ++k) {
        os << ',' << format_double(sample.successors()(i, k));
      }
      os << ',' << format_double(table.values[i]) << '\n';
    }
  }
}

}  // namespace kcontrol
