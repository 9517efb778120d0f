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

// Brute-force reference constructions used by the tests. Nothing here calls
// into the library's own tensor machinery: operators are built as explicit
// Kronecker products and exponentials of dense generators.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using C = std::complex<double>;
using M = Eigen::MatrixXcd;
using V = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline const C kI{0.0, 1.0};

inline M kron(const M& a, const M& b) {
  M out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline M kron_all(const std::vector<M>& ms) {
  M out = M::Identity(1, 1);
  for (const auto& m : ms) out = kron(out, m);
  return out;
}

/// Operator `op` on ion `ion` of an n-ion register, identity elsewhere.
inline M on_ion(int n, int dims, int ion, const M& op) {
  std::vector<M> parts(n, M::Identity(dims, dims));
  parts[ion] = op;
  return kron_all(parts);
}

inline M outer(int dims, int a, int b) {
  M m = M::Zero(dims, dims);
  m(a, b) = 1.0;
  return m;
}

/// Pauli letters on {|0>,|1>} padded with zeros.
inline M xbar(int dims) { return outer(dims, 0, 1) + outer(dims, 1, 0); }
inline M ybar(int dims) { return -kI * outer(dims, 0, 1) + kI * outer(dims, 1, 0); }
inline M zbar(int dims) { return outer(dims, 0, 0) - outer(dims, 1, 1); }
inline M letter(char c, int dims) {
  switch (c) {
    case 'X': return xbar(dims);
    case 'Y': return ybar(dims);
    case 'Z': return zbar(dims);
    default: return M::Identity(dims, dims);
  }
}

/// Dense embedded Pauli word ("XIZ..."), identity letters are full identities.
inline M word(const std::string& w, int dims) {
  std::vector<M> parts;
  for (char c : w) parts.push_back(letter(c, dims));
  return kron_all(parts);
}

inline V ket(int dims, const std::vector<int>& levels) {
  V v = V::Zero(1);
  v(0) = 1.0;
  for (int l : levels) {
    V e = V::Zero(dims);
    e(l) = 1.0;
    V next(v.size() * dims);
    for (int i = 0; i < v.size(); ++i) next.segment(i * dims, dims) = v(i) * e;
    v = next;
  }
  return v;
}

/// exp(-i generator) via Eigen's matrix exponential.
inline M expm_minus_i(const M& generator) {
  const M a = (-kI * generator).eval();
  return a.exp();
}

/// MS generator (theta/2) * sum_{j<l in support} Xbar_j Xbar_l on n ions.
inline M ms_generator(int n, int dims, const std::vector<int>& support, double theta) {
  const int size = static_cast<int>(std::pow(dims, n));
  M g = M::Zero(size, size);
  for (std::size_t a = 0; a < support.size(); ++a)
    for (std::size_t b = a + 1; b < support.size(); ++b)
      g += on_ion(n, dims, support[a], xbar(dims)) * on_ion(n, dims, support[b], xbar(dims));
  return 0.5 * theta * g;
}

inline M random_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  M a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = C(n(rng), n(rng));
  Eigen::HouseholderQR<M> qr(a);
  return qr.householderQ();
}

inline V random_vector(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  V v(d);
  for (int i = 0; i < d; ++i) v(i) = C(n(rng), n(rng));
  return v.normalized();
}

/// Random density matrix of rank `rank`.
inline M random_density(int d, int rank, std::mt19937_64& rng) {
  M r = M::Zero(d, d);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  for (int k = 0; k < rank; ++k) {
    V v = random_vector(d, rng);
    r += u(rng) * v * v.adjoint();
  }
  return r / r.trace().real();
}

inline double max_abs(const M& m) { return m.cwiseAbs().maxCoeff(); }

/// |<a|b>|^2 for normalised vectors.
inline double overlap(const V& a, const V& b) { return std::norm(a.dot(b)); }

}  // namespace oracle
