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

#include "qloss/core/common.hpp"
#include "qloss/core/pauli.hpp"
#include "qloss/core/state.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace qloss {

// Register layout of the 1+4 ion experiment: code qubits 1..4 live on ions
// 0..3 and the ancilla on ion 4. Loss is induced on code qubit 1 (ion 0).
inline constexpr int kRegisterIons = 5;
inline constexpr int kAncilla = 4;
inline constexpr int kLossIon = 0;

struct NamedPauli {
  std::string name;
  PauliString op;
};

/// Stabilizer code: commuting generators and the logicals T^X, T^Y, T^Z.
struct CodeDefinition {
  std::string name;
  std::vector<int> qubits;
  std::vector<NamedPauli> stabilizers;
  NamedPauli tx;
  NamedPauli ty;
  NamedPauli tz;

  /// Generators commute pairwise and with every logical; T^X and T^Z
  /// anticommute.
  bool is_consistent() const {
    for (std::size_t a = 0; a < stabilizers.size(); ++a) {
      for (std::size_t b = a + 1; b < stabilizers.size(); ++b) {
        if (!stabilizers[a].op.commutes_with(stabilizers[b].op)) return false;
      }
      for (const auto* l : {&tx, &ty, &tz}) {
        if (!stabilizers[a].op.commutes_with(l->op)) return false;
      }
    }
    return !tx.op.commutes_with(tz.op);
  }

  /// Generators followed by T^X, T^Y, T^Z.
  std::vector<NamedPauli> observables() const {
    std::vector<NamedPauli> out = stabilizers;
    out.push_back(tx);
    out.push_back(ty);
    out.push_back(tz);
    return out;
  }
};

/// T^Y = i T^X T^Z.
inline PauliString logical_y(const PauliString& tx, const PauliString& tz) { return (tx * tz).times_i(1); }

/// {Z1Z2, Z1Z3, X1X2X3X4} on ions 0..3 with T^X = X4, T^Z = Z1Z4.
inline CodeDefinition four_qubit_code(int width = kRegisterIons) {
  CodeDefinition c;
  c.name = "four-qubit";
  c.qubits = {0, 1, 2, 3};
  c.stabilizers = {{"S1X", PauliString::uniform(width, 'X', {0, 1, 2, 3})},
                   {"S1Z", PauliString::uniform(width, 'Z', {0, 1})},
                   {"S2Z", PauliString::uniform(width, 'Z', {0, 2})}};
  c.tx = {"TX", PauliString::uniform(width, 'X', {3})};
  c.tz = {"TZ", PauliString::uniform(width, 'Z', {0, 3})};
  c.ty = {"TY", logical_y(c.tx.op, c.tz.op)};
  return c;
}

/// {Z2Z3, X2X3X4} on ions 1..3 with T^X = X4, T^Z = Z2Z4.
inline CodeDefinition three_qubit_code(int width = kRegisterIons) {
  CodeDefinition c;
  c.name = "three-qubit";
  c.qubits = {1, 2, 3};
  c.stabilizers = {{"S1X", PauliString::uniform(width, 'X', {1, 2, 3})},
                   {"S1Z", PauliString::uniform(width, 'Z', {1, 2})}};
  c.tx = {"TX", PauliString::uniform(width, 'X', {3})};
  c.tz = {"TZ", PauliString::uniform(width, 'Z', {1, 3})};
  c.ty = {"TY", logical_y(c.tx.op, c.tz.op)};
  return c;
}

namespace detail {

inline void check_commuting(const std::vector<NamedPauli>& gens) {
  for (std::size_t a = 0; a < gens.size(); ++a)
    for (std::size_t b = a + 1; b < gens.size(); ++b)
      if (!gens[a].op.commutes_with(gens[b].op)) {
        throw ContractViolation("generators " + gens[a].name + " and " + gens[b].name + " do not commute");
      }
}

}  // namespace detail

/// Tr(rho P_CS) / Tr(rho) with P_CS = prod_g (1 + g)/2 over the generators
/// (embedded, so leaked population lies outside the code space).
inline double code_space_population(const DensityOperator& rho, const CodeDefinition& code) {
  detail::check_commuting(code.stabilizers);
  const double tr = rho.trace();
  if (std::abs(tr) <= tol::kTrace) throw UndefinedExpectation("code-space population of a zero-trace operator");
  Matrix m = rho.matrix();
  for (const auto& g : code.stabilizers) m = 0.5 * (m + apply_pauli_rows(g.op, rho.layout(), m));
  return m.trace().real() / tr;
}

inline double code_space_population(const PureState& psi, const CodeDefinition& code) {
  detail::check_commuting(code.stabilizers);
  const double n2 = psi.amplitudes().squaredNorm();
  if (n2 <= tol::kTrace) throw UndefinedExpectation("code-space population of the zero vector");
  Vector v = psi.amplitudes();
  for (const auto& g : code.stabilizers) v = 0.5 * (v + apply_pauli_rows(g.op, psi.layout(), v));
  return psi.amplitudes().dot(v).real() / n2;
}

/// <t|rho|t> / Tr(rho) for a normalised pure target.
inline double fidelity_with_pure(const DensityOperator& rho, const PureState& target) {
  if (!(rho.layout() == target.layout())) throw DimensionError("fidelity: layouts differ");
  const double tr = rho.trace();
  if (std::abs(tr) <= tol::kTrace) throw UndefinedExpectation("fidelity of a zero-trace operator");
  const Vector& t = target.amplitudes();
  return t.dot(rho.matrix() * t).real() / tr;
}

}  // namespace qloss
