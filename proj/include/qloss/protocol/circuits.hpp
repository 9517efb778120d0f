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
#include "qloss/core/random.hpp"
#include "qloss/core/state.hpp"
#include "qloss/gates/compile.hpp"
#include "qloss/gates/gate_op.hpp"
#include "qloss/gates/register.hpp"
#include "qloss/protocol/code.hpp"
#include "qloss/protocol/frame.hpp"

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace qloss {

/// Logical preparation cos(alpha/2)|0_L> + i sin(alpha/2)|1_L>.
struct PrepSpec {
  double alpha = 0.0;
};

/// Relative phase arg(a_1111 / a_0000) left by MS^X(pi/2) on |0000>.
inline double ms_encoding_phase() {
  static const double phase = [] {
    const Layout layout(4, 3);
    Vector amps = Vector::Zero(static_cast<Eigen::Index>(layout.size()));
    amps(0) = 1.0;
    Register<PureState> reg(PureState(layout, amps));
    reg.apply(ms_gate(kPi / 2, {0, 1, 2, 3}));
    const Level ones[] = {Level::k1, Level::k1, Level::k1, Level::k1};
    const Level zeros[] = {Level::k0, Level::k0, Level::k0, Level::k0};
    return std::arg(reg.state().amplitude(ones) / reg.state().amplitude(zeros));
  }();
  return phase;
}

/// Toolbox program preparing the logical state on ions 0..3 from |0000>:
/// MS^X(pi/2), a Z phase fix on ion 3, then exp(i alpha X_4 / 2) written as
/// R^Y(-pi/2) R^Z_3(-alpha) R^Y(pi/2) with collective Y rotations.
inline std::vector<GateOp> encoding_program(double alpha) {
  const std::vector<int> code = {0, 1, 2, 3};
  return {ms_gate(kPi / 2, code),
          addressed_z(-ms_encoding_phase(), 3),
          collective_rotation(Axis::kY, -kPi / 2, code),
          addressed_z(-alpha, 3),
          collective_rotation(Axis::kY, kPi / 2, code)};
}

/// Five-ion register with the encoded logical state and the ancilla in |0>.
inline PureState encode(double alpha, int dims = 3) {
  Register<PureState> reg(make_state(kRegisterIons, dims, {Level::k0, Level::k0, Level::k0, Level::k0, Level::k0}));
  reg.apply(encoding_program(alpha));
  return reg.state();
}

inline PureState encode(const PrepSpec& prep, int dims = 3) { return encode(prep.alpha, dims); }

namespace detail {

inline PureState four_ion_state(int dims, const std::vector<std::pair<std::array<Level, 4>, Complex>>& terms) {
  const Layout layout(4, dims);
  Vector amps = Vector::Zero(static_cast<Eigen::Index>(layout.size()));
  for (const auto& [kets, c] : terms) amps(static_cast<Eigen::Index>(layout.index_of(kets))) += c;
  return PureState(layout, amps);
}

}  // namespace detail

/// cos(alpha/2)|0_L> + i sin(alpha/2)|1_L> on the four code ions.
inline PureState four_qubit_target(double alpha, int dims = 3) {
  using L = Level;
  const Complex c0 = std::cos(alpha / 2) / std::sqrt(2.0);
  const Complex c1 = kI * std::sin(alpha / 2) / std::sqrt(2.0);
  return detail::four_ion_state(dims, {{{L::k0, L::k0, L::k0, L::k0}, c0},
                                       {{L::k1, L::k1, L::k1, L::k1}, c0},
                                       {{L::k0, L::k0, L::k0, L::k1}, c1},
                                       {{L::k1, L::k1, L::k1, L::k0}, c1}});
}

/// Ion 0 in |2> and the three-qubit logical state on ions 1..3.
inline PureState three_qubit_target(double alpha, int dims = 3) {
  using L = Level;
  const Complex c0 = std::cos(alpha / 2) / std::sqrt(2.0);
  const Complex c1 = kI * std::sin(alpha / 2) / std::sqrt(2.0);
  return detail::four_ion_state(dims, {{{L::k2, L::k0, L::k0, L::k0}, c0},
                                       {{L::k2, L::k1, L::k1, L::k1}, c0},
                                       {{L::k2, L::k0, L::k0, L::k1}, c1},
                                       {{L::k2, L::k1, L::k1, L::k0}, c1}});
}

/// Detection unit probing `code_ion`: every other ion except the ancilla is
/// hidden, MS^X(pi) and R^X(pi) run on the whole register, then the
/// spectators are unhidden.
inline std::vector<GateOp> detection_program(int ion_count, int code_ion = kLossIon, int ancilla = kAncilla) {
  if (code_ion == ancilla) throw ContractViolation("code ion and ancilla must differ");
  std::vector<int> all;
  std::vector<int> spectators;
  for (int i = 0; i < ion_count; ++i) {
    all.push_back(i);
    if (i != code_ion && i != ancilla) spectators.push_back(i);
  }
  std::vector<GateOp> prog;
  for (int s : spectators) prog.push_back(hide(s));
  prog.push_back(ms_gate(kPi, all));
  prog.push_back(collective_rotation(Axis::kX, kPi, all));
  for (int s : spectators) prog.push_back(unhide(s));
  return prog;
}

namespace detail {

template <class State>
double population_outside(const State& s, int ion, const LevelSet& levels) {
  std::vector<LevelSet> parts(2);
  for (int l = 0; l < s.dims(); ++l) {
    const auto level = static_cast<Level>(l);
    bool in = false;
    for (Level x : levels) in = in || x == level;
    parts[in ? 0 : 1].push_back(level);
  }
  const auto probs = outcome_probabilities(s, ion, parts);
  return probs[1] / (probs[0] + probs[1]);
}

template <class State>
void check_ancilla_ready(const State& s, int ancilla) {
  if (population_outside(s, ancilla, {Level::k0}) > tol::kAlgebraic) {
    throw ProtocolError("ancilla is not in |0> before detection");
  }
}

template <class State>
void check_ancilla_readable(const State& s, int ancilla) {
  if (population_outside(s, ancilla, {Level::k0, Level::k1}) > tol::kAlgebraic) {
    throw ProtocolError("ancilla has population outside {|0>, |1>} before readout");
  }
}

}  // namespace detail

/// Runs the detection unitary (no readout) on a copy of `state`.
template <class State>
State detection_circuit(State state, int code_ion = kLossIon, int ancilla = kAncilla) {
  detail::check_ancilla_ready(state, ancilla);
  Register<State> reg(std::move(state));
  reg.apply(detection_program(reg.state().ion_count(), code_ion, ancilla));
  detail::check_ancilla_readable(reg.state(), ancilla);
  return std::move(reg.state());
}

struct DetectionResult {
  bool loss = false;
  int ancilla_outcome = 0;  // 1 = dark = loss
  PureState state;
  double probability = 0.0;
};

/// Reads the ancilla of a state that has been through detection_circuit.
inline DetectionResult read_detection(const PureState& post_circuit, Rng& rng, int ancilla = kAncilla) {
  detail::check_ancilla_readable(post_circuit, ancilla);
  auto m = measure_projective(post_circuit, ancilla, bright_dark_partition(post_circuit.dims()), rng);
  return {m.outcome == 1, m.outcome, std::move(m.state), m.probability};
}

/// Detection unit followed by the ancilla readout.
inline DetectionResult qnd_detect(const PureState& state, Rng& rng, int code_ion = kLossIon, int ancilla = kAncilla) {
  return read_detection(detection_circuit(state, code_ion, ancilla), rng, ancilla);
}

/// Unnormalised branch operators {no loss, loss} of the detection unit.
inline std::pair<DensityOperator, DensityOperator> detection_branches(const DensityOperator& rho,
                                                                      int code_ion = kLossIon,
                                                                      int ancilla = kAncilla) {
  const DensityOperator post = detection_circuit(rho, code_ion, ancilla);
  const auto parts = bright_dark_partition(rho.dims());
  return {project(post, ancilla, parts[0]), project(post, ancilla, parts[1])};
}

/// Pure-state counterpart of detection_branches: unnormalised amplitudes of
/// the no-loss and loss branches.
inline std::pair<PureState, PureState> detection_branches(const PureState& psi, int code_ion = kLossIon,
                                                          int ancilla = kAncilla) {
  const PureState post = detection_circuit(psi, code_ion, ancilla);
  const auto parts = bright_dark_partition(psi.dims());
  const int a[] = {ancilla};
  std::pair<PureState, PureState> out{post, post};
  out.first.apply_operator(detail::level_projector(psi.dims(), parts[0]), a);
  out.second.apply_operator(detail::level_projector(psi.dims(), parts[1]), a);
  return out;
}

/// Probes every code ion in turn with the same ancilla, resetting it after a
/// dark readout. Returns the per-ion outcomes and the final state.
inline std::pair<std::vector<int>, PureState> sequential_probe(PureState state, const std::vector<int>& code_ions,
                                                               Rng& rng, int ancilla = kAncilla) {
  std::vector<int> outcomes;
  for (int ion : code_ions) {
    auto r = qnd_detect(state, rng, ion, ancilla);
    outcomes.push_back(r.ancilla_outcome);
    state = std::move(r.state);
    if (r.loss) {
      const int a[] = {ancilla};
      state.apply(gates::single_rotation('X', kPi, state.dims()), a);
    }
  }
  return {outcomes, std::move(state)};
}

enum class StabilizerMode { kExact, kToolbox };

inline std::string to_string(StabilizerMode m) { return m == StabilizerMode::kExact ? "exact" : "toolbox"; }

/// X2X3X4 on ions 1..3.
inline PauliString shrunk_stabilizer(int width = kRegisterIons) { return PauliString::uniform(width, 'X', {1, 2, 3}); }

/// Toolbox measurement of X2X3X4 with the ancilla (dark after detection):
/// reset and prepare |+>, three CNOTs built from MS_{a,j}(-pi/2) in the
/// R^Y(pi/2) frame with Z and X phase fixes, then rotate for an X readout.
inline std::vector<GateOp> shrunk_stabilizer_program(int ancilla = kAncilla) {
  std::vector<GateOp> prog = {collective_rotation(Axis::kX, kPi, {ancilla}),
                              collective_rotation(Axis::kY, kPi / 2, {ancilla}),
                              collective_rotation(Axis::kY, kPi / 2, {ancilla})};
  for (int j : {1, 2, 3}) prog.push_back(ms_gate(-kPi / 2, {ancilla, j}));
  prog.push_back(collective_rotation(Axis::kY, -kPi / 2, {ancilla}));
  prog.push_back(addressed_z(3 * kPi / 2, ancilla));
  prog.push_back(collective_rotation(Axis::kX, kPi / 2, {1, 2, 3}));
  prog.push_back(collective_rotation(Axis::kY, -kPi / 2, {ancilla}));
  return prog;
}

struct StabilizerResult {
  int outcome = 1;  // +1 or -1
  PureState state;
  double probability = 0.0;
};

namespace detail {

template <class State>
void check_loss_branch(const State& s, int ancilla) {
  if (population_outside(s, kLossIon, {Level::k2}) > tol::kAlgebraic) {
    throw ProtocolError("shrunk-stabilizer measurement outside the loss branch");
  }
  if (population_outside(s, ancilla, {Level::k1}) > tol::kAlgebraic) {
    throw ProtocolError("ancilla is not in the dark post-detection state");
  }
}

}  // namespace detail

/// Projects onto the +-1 eigenspace of X2X3X4. Both modes leave the ancilla
/// in |0> after +1 and in |1> after -1.
inline StabilizerResult measure_shrunk_stabilizer(const PureState& state, StabilizerMode mode, Rng& rng,
                                                  int ancilla = kAncilla) {
  detail::check_loss_branch(state, ancilla);
  if (mode == StabilizerMode::kToolbox) {
    Register<PureState> reg(state);
    reg.apply(shrunk_stabilizer_program(ancilla));
    auto m = measure_projective(reg.state(), ancilla, bright_dark_partition(state.dims()), rng);
    return {m.outcome == 0 ? 1 : -1, std::move(m.state), m.probability};
  }
  PureState reset = state;
  const int a[] = {ancilla};
  const Matrix flip = gates::single_rotation('X', kPi, state.dims());
  reset.apply(flip, a);
  const Vector pv = apply_pauli(shrunk_stabilizer(state.ion_count()), reset);
  const Vector plus = 0.5 * (reset.amplitudes() + pv);
  const Vector minus = 0.5 * (reset.amplitudes() - pv);
  const double probs[] = {plus.squaredNorm(), minus.squaredNorm()};
  const int k = sample_index(rng, probs);
  PureState out(state.layout(), (k == 0 ? plus : minus) / std::sqrt(probs[k]));
  if (k == 1) out.apply(flip, a);
  return {k == 0 ? 1 : -1, std::move(out), probs[k]};
}

/// Both outcome branches of the exact measurement on a normalised loss-branch
/// state, unnormalised, with the -1 frame fix applied. Their projectors sum to
/// shrunk_stabilizer_channel.
inline std::array<PureState, 2> shrunk_stabilizer_outcomes(const PureState& state, int ancilla = kAncilla) {
  detail::check_loss_branch(state, ancilla);
  PureState reset = state;
  const int a[] = {ancilla};
  const int f[] = {kFrameIon};
  const Matrix flip = gates::single_rotation('X', kPi, state.dims());
  reset.apply(flip, a);
  const Vector pv = apply_pauli(shrunk_stabilizer(state.ion_count()), reset);
  std::array<PureState, 2> out{PureState(state.layout(), 0.5 * (reset.amplitudes() + pv)),
                               PureState(state.layout(), 0.5 * (reset.amplitudes() - pv))};
  out[1].apply(flip, a);
  out[1].apply(pauli_unitary('Z', state.dims()), f);
  return out;
}

/// Analytic counterpart: sum over outcomes of the projected operator with the
/// -1 frame fix applied, ancilla left as in measure_shrunk_stabilizer.
inline DensityOperator shrunk_stabilizer_channel(const DensityOperator& rho, int ancilla = kAncilla) {
  detail::check_loss_branch(rho, ancilla);
  const Layout& layout = rho.layout();
  const PauliString p = shrunk_stabilizer(rho.ion_count());
  const int a[] = {ancilla};
  const int f[] = {kFrameIon};
  const Matrix flip = gates::single_rotation('X', kPi, rho.dims());
  DensityOperator reset = rho;
  reset.apply(flip, a);
  const Matrix pm = apply_pauli_rows(p, layout, reset.matrix());
  DensityOperator out = DensityOperator::zero(layout);
  for (int sign : {1, -1}) {
    const Matrix half = 0.5 * (reset.matrix() + static_cast<double>(sign) * pm);
    const Matrix proj_left_adj = half.adjoint();
    const Matrix both = 0.5 * (proj_left_adj + static_cast<double>(sign) * apply_pauli_rows(p, layout, proj_left_adj));
    DensityOperator branch(layout, both.adjoint());
    if (sign == -1) {
      branch.apply(flip, a);
      branch.apply(pauli_unitary('Z', rho.dims()), f);
    }
    out += branch;
  }
  return out;
}

}  // namespace qloss
