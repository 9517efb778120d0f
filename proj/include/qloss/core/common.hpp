// Copyright 2026 The qloss Authors
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

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qloss {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

// Numerical tolerances shared by the whole library. Statistical tolerances
// are stated next to the tests that use them.
namespace tol {
inline constexpr double kAlgebraic = 1e-10;   // unitarity, hermiticity, fidelities
inline constexpr double kTrace = 1e-12;       // trace bookkeeping, branch sums
inline constexpr double kPsd = 1e-9;          // smallest admissible eigenvalue is -kPsd
inline constexpr double kNormDrift = 1e-8;    // pure-state norm over long programs
}  // namespace tol

/// Base of every error raised by qloss.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wrong per-ion dimension, wrong matrix shape or out-of-range ion.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A caller broke an operation's precondition (e.g. a non-unitary "gate").
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Hide/unhide bookkeeping went out of sync.
class StateMachineError : public Error {
 public:
  using Error::Error;
};

/// Protocol step invoked in the wrong branch or with an invalid register.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Expectation or probability requested on a zero-trace operator.
class UndefinedExpectation : public Error {
 public:
  using Error::Error;
};

/// A 0/0 mixing rate in the imperfection model.
class DegenerateRate : public Error {
 public:
  using Error::Error;
};

/// An internal consistency check failed. Never expected to fire.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// Largest absolute entry of a matrix.
inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Kronecker product, `a` as the more significant factor.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline bool is_unitary(const Matrix& u, double tolerance = tol::kAlgebraic) {
  if (u.rows() != u.cols()) return false;
  const Matrix id = Matrix::Identity(u.rows(), u.cols());
  return max_abs(u.adjoint() * u - id) < tolerance;
}

}  // namespace qloss
