// Copyright 2026 The msirl Authors
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

#ifndef MSIRL_COMMON_HPP
#define MSIRL_COMMON_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace msirl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;                     // column-major
using SpMatRow = Eigen::SparseMatrix<double, Eigen::RowMajor>; // row-stochastic operators
using Triplet = Eigen::Triplet<double>;
using Index = Eigen::Index;

// -------------------------------------------------------------------------
// Error taxonomy. Exit-code mapping lives in the CLI: ConfigError -> 2,
// NumericError (and subclasses) -> 3, IoError -> 4.

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid arguments, malformed configs, violated preconditions.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Numeric-domain failures: non-finite values, singular matrices.
class NumericError : public Error {
public:
  using Error::Error;
};

/// Iteration budget exhausted before reaching tolerance.
class ConvergenceError : public NumericError {
public:
  ConvergenceError(const std::string& msg, int iterations, double residual)
      : NumericError(msg), iterations(iterations), residual(residual) {}
  int iterations;
  double residual;
};

/// Structural defects: reducible chains, unreachable rooms.
class StructureError : public NumericError {
public:
  using NumericError::NumericError;
};

/// Simulation left the finite domain; carries the last finite state.
class DivergedError : public NumericError {
public:
  DivergedError(const std::string& msg, double t, Vec last_state)
      : NumericError(msg), t(t), last_state(std::move(last_state)) {}
  double t;
  Vec last_state;
};

class IoError : public Error {
public:
  using Error::Error;
};

// -------------------------------------------------------------------------
// Deterministic random primitives. std::mt19937_64 output is fixed by the
// standard; the mappings below avoid the implementation-defined
// std::*_distribution adapters so streams are identical across platforms.

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller; consumes exactly two engine draws.
inline double standard_normal(Rng& rng) {
  const double u1 = 1.0 - uniform01(rng); // (0, 1]
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline Vec normal_vector(Rng& rng, Index n) {
  Vec out(n);
  for (Index i = 0; i < n; ++i) out[i] = standard_normal(rng);
  return out;
}

// -------------------------------------------------------------------------
// Neumaier compensated summation. Used where a sum must be insensitive to
// accumulation order (row normalizers compared across state permutations).
class CompensatedSum {
public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// -------------------------------------------------------------------------
// Worker-thread budget: MSIRL_THREADS caps parallelism, 0 or unset = auto.
int thread_budget();

/// Runs fn(begin, end) over disjoint chunks of [0, n). Chunk boundaries do
/// not depend on the thread budget observed at runtime being honored, only
/// results written per-index stay deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

} // namespace msirl

#endif // MSIRL_COMMON_HPP
