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

#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace kcontrol {

using Vector = Eigen::VectorXd;
// Point sets are stored one point per row.
using Matrix = Eigen::MatrixXd;

using Rng = std::mt19937_64;

struct Interval {
  double lo;
  double hi;

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Axis-aligned box, one interval per coordinate.
using Box = std::vector<Interval>;

enum class ErrorKind {
  kInvalidArgument,
  kDimensionMismatch,
  kFactorization,
  kNonFinite,
  kCombinatorialLimit,
  kIo,
  kConfig,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid_argument";
    case ErrorKind::kDimensionMismatch: return "dimension_mismatch";
    case ErrorKind::kFactorization: return "factorization";
    case ErrorKind::kNonFinite: return "non_finite";
    case ErrorKind::kCombinatorialLimit: return "combinatorial_limit";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kConfig: return "config";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

namespace detail {

template <typename... Args>
[[noreturn]] void fail(ErrorKind kind, Args&&... args) {
  std::ostringstream oss;
  (oss << ... << std::forward<Args>(args));
  throw Error(kind, oss.str());
}

inline void require_same_dim(Eigen::Index a, Eigen::Index b,
                             std::string_view what) {
  if (a != b) {
    fail(ErrorKind::kDimensionMismatch, what, ": dimension ", a, " vs ", b);
  }
}

}  // namespace detail

// splitmix64 finalizer; maps (master seed, stream id) to an independent seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace kcontrol
