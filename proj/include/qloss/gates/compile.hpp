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
#include "qloss/core/levels.hpp"
#include "qloss/core/pauli.hpp"
#include "qloss/core/state.hpp"
#include "qloss/gates/gate_op.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <tuple>
#include <vector>

namespace qloss {

namespace gates {

inline void check_dims(int dims) {
  if (dims != 2 && dims != 3 && dims != 5) throw DimensionError("gates need dims 2, 3 or 5");
}

/// Projector onto {|0>,|1>} of one ion.
inline Matrix computational_projector(int dims) {
  Matrix p = Matrix::Zero(dims, dims);
  p(0, 0) = 1.0;
  p(1, 1) = 1.0;
  return p;
}

/// exp(-i theta/2 s) for a truncated Pauli s: rotation on {|0>,|1>}, identity
/// on every other level.
inline Matrix single_rotation(char letter, double theta, int dims) {
  check_dims(dims);
  const Matrix pc = computational_projector(dims);
  return Matrix::Identity(dims, dims) - pc + std::cos(theta / 2) * pc -
         kI * std::sin(theta / 2) * embedded_letter(letter, dims);
}

/// |1><1| + cos(phi/2)(|0><0| + |2><2|) + sin(phi/2)(|0><2| - |2><0|).
inline Matrix loss_rotation_matrix(double phi, int dims) {
  check_dims(dims);
  if (dims < 3) throw DimensionError("loss rotation needs the |2> level");
  Matrix m = Matrix::Identity(dims, dims);
  const double c = std::cos(phi / 2);
  const double s = std::sin(phi / 2);
  m(0, 0) = c;
  m(2, 2) = c;
  m(0, 2) = s;
  m(2, 0) = -s;
  return m;
}

/// Swap of |from> and |to>, identity elsewhere.
inline Matrix swap_pulse(Level from, Level to, int dims) {
  check_dims(dims);
  Matrix m = Matrix::Identity(dims, dims);
  const int a = level_index(from);
  const int b = level_index(to);
  if (a >= dims || b >= dims) throw DimensionError("swap pulse needs the hiding levels (dims 5)");
  m(a, a) = 0.0;
  m(b, b) = 0.0;
  m(a, b) = 1.0;
  m(b, a) = 1.0;
  return m;
}

/// Hiding swap |0> <-> |H0>, |1> <-> |H1>. It is its own inverse. With
/// dims 3 hiding is a bookkeeping mask, so the matrix is the identity.
inline Matrix hide_matrix(int dims) {
  check_dims(dims);
  if (dims < 5) return Matrix::Identity(dims, dims);
  return swap_pulse(Level::k0, Level::kH0, dims) * swap_pulse(Level::k1, Level::kH1, dims);
}

/// exp(-i theta/2 Xbar (x) Xbar) on two ions. Xbar Xbar squares to the
/// projector onto both ions being computational, so the exponential is exact.
inline Matrix ms_pair_matrix(double theta, int dims) {
  check_dims(dims);
  const Matrix pc = computational_projector(dims);
  const Matrix xx = kron(embedded_letter('X', dims), embedded_letter('X', dims));
  const Matrix pcc = kron(pc, pc);
  const auto n = static_cast<Eigen::Index>(dims) * dims;
  return Matrix::Identity(n, n) - pcc + std::cos(theta / 2) * pcc - kI * std::sin(theta / 2) * xx;
}

}  // namespace gates

/// A local unitary together with the ions it acts on.
struct Factor {
  Matrix matrix;
  std::vector<int> support;
};

/// Commuting factors of at most two ions each whose product is the gate.
inline std::vector<Factor> factors(const GateOp& op, int dims) {
  std::vector<Factor> out;
  const auto& s = op.support();
  switch (op.kind()) {
    case GateKind::kMsX: {
      const Matrix pair = gates::ms_pair_matrix(op.angle(), dims);
      for (std::size_t a = 0; a < s.size(); ++a) {
        for (std::size_t b = a + 1; b < s.size(); ++b) out.push_back({pair, {s[a], s[b]}});
      }
      break;
    }
    case GateKind::kCollectiveRX:
    case GateKind::kCollectiveRY: {
      const Matrix r = gates::single_rotation(op.kind() == GateKind::kCollectiveRX ? 'X' : 'Y', op.angle(), dims);
      for (int ion : s) out.push_back({r, {ion}});
      break;
    }
    case GateKind::kAddressedZ:
      out.push_back({gates::single_rotation('Z', op.angle(), dims), s});
      break;
    case GateKind::kLossRot:
      out.push_back({gates::loss_rotation_matrix(op.angle(), dims), s});
      break;
    case GateKind::kHide:
    case GateKind::kUnhide:
      out.push_back({gates::hide_matrix(dims), s});
      break;
  }
  return out;
}

namespace detail {

using CompileKey = std::tuple<int, std::uint64_t, std::size_t, int>;

inline std::mutex& compile_cache_mutex() {
  static std::mutex m;
  return m;
}

inline std::map<CompileKey, std::shared_ptr<const Matrix>>& compile_cache() {
  static std::map<CompileKey, std::shared_ptr<const Matrix>> cache;
  return cache;
}

inline Matrix build_compiled(const GateOp& op, int dims) {
  const int k = static_cast<int>(op.support().size());
  const Layout local(k, dims);
  std::vector<int> positions(static_cast<std::size_t>(k));
  std::iota(positions.begin(), positions.end(), 0);
  const GateOp relabelled(op.kind(), op.angle(), positions);
  const auto n = static_cast<Eigen::Index>(local.size());
  Matrix m = Matrix::Identity(n, n);
  for (const auto& f : factors(relabelled, dims)) apply_rows(m, f.matrix, local, f.support);
  return m;
}

}  // namespace detail

/// Full matrix of `op` on its support (support order = tensor order).
/// Cached per (kind, angle, support size, dims); safe to call concurrently.
inline std::shared_ptr<const Matrix> compile(const GateOp& op, int dims) {
  gates::check_dims(dims);
  const detail::CompileKey key{static_cast<int>(op.kind()), std::bit_cast<std::uint64_t>(op.angle()),
                               op.support().size(), dims};
  std::lock_guard<std::mutex> lock(detail::compile_cache_mutex());
  auto& cache = detail::compile_cache();
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto m = std::make_shared<const Matrix>(detail::build_compiled(op, dims));
  cache.emplace(key, m);
  return m;
}

}  // namespace qloss
