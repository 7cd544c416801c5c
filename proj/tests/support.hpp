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

// Independent reference computations shared by the unit and acceptance
// tests. Nothing here calls into the code paths it is used to check.

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <vector>

#include "kcontrol/core.hpp"
#include "kcontrol/embedding.hpp"

namespace kcontrol::testing {

inline Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo,
                             double hi, Rng& rng) {
  std::uniform_real_distribution<double> uni(lo, hi);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = uni(rng);
  }
  return m;
}

inline double naive_gaussian(const Vector& a, const Vector& b, double sigma) {
  double sq = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) sq += (a[k] - b[k]) * (a[k] - b[k]);
  return std::exp(-sq / (2.0 * sigma * sigma));
}

// x' = 0.5 x + u + w, w ~ N(0, 0.01); x, u uniform on [-1, 1].
inline SampleSet linear_gaussian_sample(Eigen::Index m, Rng& rng) {
  Matrix x = uniform_matrix(m, 1, -1.0, 1.0, rng);
  Matrix u = uniform_matrix(m, 1, -1.0, 1.0, rng);
  std::normal_distribution<double> noise(0.0, 0.1);
  Matrix xp(m, 1);
  for (Eigen::Index i = 0; i < m; ++i) xp(i, 0) = 0.5 * x(i, 0) + u(i, 0) + noise(rng);
  return SampleSet(std::move(x), std::move(u), std::move(xp));
}

struct VertexMin {
  std::size_t index;
  double value;
};

// Minimizes C^T alpha over the probability simplex by visiting every vertex
// e_j; a linear objective attains its minimum over a polytope at a vertex.
// The first vertex found with the minimal value is reported.
inline VertexMin enumerate_simplex_vertices(const std::vector<double>& c) {
  VertexMin best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t j = 0; j < c.size(); ++j) {
    std::vector<double> alpha(c.size(), 0.0);
    alpha[j] = 1.0;
    double value = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) value += c[k] * alpha[k];
    if (value < best.value) best = {j, value};
  }
  return best;
}

}  // namespace kcontrol::testing
