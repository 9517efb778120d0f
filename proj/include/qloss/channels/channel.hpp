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

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qloss {

/// Completely positive map given by Kraus operators (output_dim x input_dim).
/// Trace-decreasing maps are allowed.
class Channel {
 public:
  explicit Channel(std::vector<Matrix> kraus) : kraus_(std::move(kraus)) {
    if (kraus_.empty()) throw DimensionError("channel needs at least one Kraus operator");
    out_ = static_cast<int>(kraus_.front().rows());
    in_ = static_cast<int>(kraus_.front().cols());
    for (const auto& k : kraus_) {
      if (k.rows() != out_ || k.cols() != in_) throw DimensionError("Kraus operators differ in shape");
    }
    if (min_slack() < -tol::kPsd) throw ContractViolation("channel increases trace");
  }

  static Channel identity(int dim) { return Channel({Matrix::Identity(dim, dim)}); }

  const std::vector<Matrix>& kraus() const { return kraus_; }
  int input_dim() const { return in_; }
  int output_dim() const { return out_; }

  /// sum_k K^dagger K.
  Matrix completeness() const {
    Matrix s = Matrix::Zero(in_, in_);
    for (const auto& k : kraus_) s += k.adjoint() * k;
    return s;
  }

  bool is_trace_preserving(double tolerance = tol::kAlgebraic) const {
    return max_abs(completeness() - Matrix::Identity(in_, in_)) < tolerance;
  }

  Matrix operator()(const Matrix& rho) const {
    if (rho.rows() != in_ || rho.cols() != in_) throw DimensionError("channel input has wrong shape");
    Matrix out = Matrix::Zero(out_, out_);
    for (const auto& k : kraus_) out += k * rho * k.adjoint();
    return out;
  }

  /// Sequential composition: `after` applied to the output of this.
  Channel then(const Channel& after) const {
    if (after.in_ != out_) throw DimensionError("channel composition shape mismatch");
    std::vector<Matrix> ks;
    for (const auto& b : after.kraus_)
      for (const auto& a : kraus_) ks.push_back(b * a);
    return Channel(std::move(ks));
  }

 private:
  // Smallest eigenvalue of 1 - sum K^dagger K.
  double min_slack() const {
    const Matrix s = Matrix::Identity(in_, in_) - completeness();
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s + s.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  std::vector<Matrix> kraus_;
  int in_ = 0;
  int out_ = 0;
};

/// Branch maps of the detection unit acting on the code ion (dims 3).
/// E0 (ancilla reads 0): |1><1| + cos(phi/2)|0><0|.
/// E1 (ancilla reads 1): sin(phi/2)|2><0|.
inline std::pair<Channel, Channel> branch_maps(double phi) {
  Matrix e0 = Matrix::Zero(3, 3);
  e0(1, 1) = 1.0;
  e0(0, 0) = std::cos(phi / 2);
  Matrix e1 = Matrix::Zero(3, 3);
  e1(2, 0) = std::sin(phi / 2);
  return {Channel({e0}), Channel({e1})};
}

/// Restricts a map on a `dims`-level ion to a qubit map: the input is the
/// span of {|0>,|1>}, and the output is read out with |2> and |H0> counted
/// as |1> and |H1> counted as |0> (the bright/dark assignment).
inline Channel restrict_to_qubit(const Channel& ch) {
  const int dims = ch.input_dim();
  if (dims != ch.output_dim() || dims < 2) throw DimensionError("restrict_to_qubit needs a square channel");
  Matrix embed = Matrix::Zero(dims, 2);
  embed(0, 0) = 1.0;
  embed(1, 1) = 1.0;
  std::vector<Matrix> folds;
  Matrix keep = Matrix::Zero(2, dims);
  keep(0, 0) = 1.0;
  keep(1, 1) = 1.0;
  folds.push_back(keep);
  const std::pair<int, int> moves[] = {{2, 1}, {3, 1}, {4, 0}};
  for (const auto& [from, to] : moves) {
    if (from >= dims) continue;
    Matrix f = Matrix::Zero(2, dims);
    f(to, from) = 1.0;
    folds.push_back(f);
  }
  std::vector<Matrix> ks;
  for (const auto& k : ch.kraus()) {
    for (const auto& f : folds) {
      Matrix r = f * k * embed;
      if (max_abs(r) > 0.0) ks.push_back(std::move(r));
    }
  }
  if (ks.empty()) ks.push_back(Matrix::Zero(2, 2));
  return Channel(std::move(ks));
}

/// rho -> sum_k K rho K^dagger with each K acting on `support`.
inline DensityOperator apply_channel(const DensityOperator& rho, const Channel& ch, std::span<const int> support) {
  if (ch.input_dim() != ch.output_dim()) throw DimensionError("apply_channel needs square Kraus operators");
  DensityOperator out = DensityOperator::zero(rho.layout());
  for (const auto& k : ch.kraus()) {
    DensityOperator term = rho;
    term.apply_operator(k, support);
    out += term;
  }
  return out;
}

inline DensityOperator apply_channel(const DensityOperator& rho, const Channel& ch, std::initializer_list<int> support) {
  return apply_channel(rho, ch, std::span<const int>(support.begin(), support.size()));
}

/// Full single-qubit depolarisation of one ion's computational subspace:
/// Kraus {Ic/2, X/2, Y/2, Z/2, P_leak}. Population outside {|0>,|1>} is
/// left in place.
inline Channel depolarizing_channel(int dims) {
  std::vector<Matrix> ks;
  for (char c : {'I', 'X', 'Y', 'Z'}) {
    Matrix k = c == 'I' ? Matrix(Matrix::Zero(dims, dims)) : embedded_letter(c, dims);
    if (c == 'I') {
      k(0, 0) = 1.0;
      k(1, 1) = 1.0;
    }
    ks.push_back(0.5 * k);
  }
  if (dims > 2) {
    Matrix leak = Matrix::Zero(dims, dims);
    for (int l = 2; l < dims; ++l) leak(l, l) = 1.0;
    ks.push_back(leak);
  }
  return Channel(std::move(ks));
}

inline DensityOperator depolarize_one(const DensityOperator& rho, int qubit) {
  const int support[] = {qubit};
  rho.layout().check_support(support);
  return apply_channel(rho, depolarizing_channel(rho.dims()), support);
}

enum class NoiseMode { kOff, kDepolarizingPerQubit };

/// Imperfection model of the QND step.
struct NoiseModel {
  double p_qnd = 0.0;
  NoiseMode mode = NoiseMode::kOff;
  bool also_no_loss = false;  // apply to the no-loss branch as well

  void validate() const {
    if (!(p_qnd >= 0.0 && p_qnd <= 1.0)) throw ContractViolation("p_qnd must lie in [0, 1]");
  }
  bool active() const { return mode != NoiseMode::kOff; }

  static NoiseModel off() { return {}; }
  static NoiseModel depolarizing(double p_qnd) {
    NoiseModel m{p_qnd, NoiseMode::kDepolarizingPerQubit, false};
    m.validate();
    return m;
  }
};

/// p = p_qnd / (p_qnd + sin^2(phi/2) / 2).
inline double mixing_probability(double p_qnd, double phi) {
  const double denom = p_qnd + 0.5 * std::pow(std::sin(phi / 2), 2);
  if (denom <= 0.0) throw DegenerateRate("mixing probability is 0/0 at p_qnd = 0 and phi = 0");
  return p_qnd / denom;
}

/// rho -> (p/n) sum_k M_k(rho) + (1 - p) rho over the n target ions.
inline DensityOperator qnd_noise_mixture(const DensityOperator& rho, double phi, const NoiseModel& model,
                                         const std::vector<int>& targets) {
  model.validate();
  if (!model.active()) return rho;
  if (targets.empty()) throw ContractViolation("noise mixture needs target ions");
  const double p = mixing_probability(model.p_qnd, phi);
  DensityOperator out = rho;
  out *= 1.0 - p;
  for (int k : targets) {
    DensityOperator term = depolarize_one(rho, k);
    term *= p / static_cast<double>(targets.size());
    out += term;
  }
  return out;
}

}  // namespace qloss
