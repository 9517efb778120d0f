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

#include "qloss/channels/choi.hpp"
#include "qloss/core/common.hpp"
#include "qloss/core/levels.hpp"
#include "qloss/core/random.hpp"
#include "qloss/core/state.hpp"
#include "qloss/gates/compile.hpp"
#include "qloss/gates/gate_op.hpp"
#include "qloss/gates/register.hpp"
#include "qloss/protocol/circuits.hpp"
#include "qloss/tomography/state_tomography.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace qloss {

/// Two-ion register used for process tomography: code ion and ancilla.
inline constexpr int kProcessQubit = 0;
inline constexpr int kProcessAncilla = 1;

/// Maps the prepared two-ion state (qubit input, ancilla |0>) to the state
/// before the ancilla readout.
using ProcessUnderTest = std::function<PureState(const PureState&)>;

/// Loss rotation by phi followed by the detection unit.
inline ProcessUnderTest detection_process(double phi) {
  return [phi](const PureState& in) {
    Register<PureState> reg(in);
    reg.apply(loss_rotation(phi, kProcessQubit));
    return detection_circuit(reg.state(), kProcessQubit, kProcessAncilla);
  };
}

/// Input states |0>, |1>, |+>, |+i>.
inline const std::array<std::string, 4>& process_input_names() {
  static const std::array<std::string, 4> names = {"0", "1", "+", "+i"};
  return names;
}

inline PureState process_input(int k, int dims = 3) {
  const Layout layout(2, dims);
  Vector amps = Vector::Zero(static_cast<Eigen::Index>(layout.size()));
  const auto at = [&](int q) { return static_cast<Eigen::Index>(q * dims); };
  const double h = 1.0 / std::sqrt(2.0);
  switch (k) {
    case 0: amps(at(0)) = 1.0; break;
    case 1: amps(at(1)) = 1.0; break;
    case 2: amps(at(0)) = h; amps(at(1)) = h; break;
    case 3: amps(at(0)) = h; amps(at(1)) = kI * h; break;
    default: throw ContractViolation("process input index out of range");
  }
  return PureState(layout, amps);
}

struct ProcessOptions {
  int shots = 0;  // per input and basis; 0 selects exact probabilities
  std::uint64_t seed = 0;
};

struct ProcessTomographyResult {
  ChoiMatrix choi;
  int branch = 0;
  std::array<double, 4> branch_fraction{};  // per input
  std::array<bool, 4> empty_input{};        // branch never seen for that input
};

namespace detail {

// Joint (branch, bit) probabilities for one input and one basis, index
// 2 * branch + bit. In the loss branch a return pulse |2> -> |1> precedes
// the qubit readout.
inline std::array<double, 4> process_joint(const PureState& post, char basis) {
  const int dims = post.dims();
  const auto parts = bright_dark_partition(dims);
  std::array<double, 4> out{};
  for (int branch = 0; branch < 2; ++branch) {
    const DensityOperator br = project(DensityOperator::from_pure(post), kProcessAncilla, parts[static_cast<std::size_t>(branch)]);
    const double pb = br.trace();
    if (pb <= tol::kTrace) continue;
    DensityOperator q = br;
    const int site[] = {kProcessQubit};
    if (branch == 1) q.apply(gates::swap_pulse(Level::k2, Level::k1, dims), site);
    if (basis != 'Z') q.apply(basis_rotation(basis, dims), site);
    const auto probs = outcome_probabilities(q, kProcessQubit, parts);
    out[static_cast<std::size_t>(2 * branch)] = probs[0];
    out[static_cast<std::size_t>(2 * branch + 1)] = probs[1];
  }
  return out;
}

}  // namespace detail

/// Generalised single-qubit process tomography post-selected on the ancilla
/// outcome `branch`. Outputs are scaled by the branch fraction, so the
/// reconstruction is trace non-increasing. Throws when the branch is empty
/// for every input.
inline ProcessTomographyResult process_tomography(const ProcessUnderTest& process, int branch,
                                                  const ProcessOptions& opt, int dims = 3) {
  if (branch != 0 && branch != 1) throw ContractViolation("post-selection branch must be 0 or 1");
  if (opt.shots < 0) throw ContractViolation("shots must be non-negative");
  ProcessTomographyResult res;
  res.branch = branch;
  std::array<Matrix, 4> outputs;
  const char bases[] = {'X', 'Y', 'Z'};
  for (int k = 0; k < 4; ++k) {
    const PureState post = process(process_input(k, dims));
    std::array<double, 3> expect{};
    double fraction = 0.0;
    for (int b = 0; b < 3; ++b) {
      auto joint = detail::process_joint(post, bases[b]);
      if (opt.shots > 0) {
        Rng rng(derive_seed(opt.seed, {static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(b)}));
        const auto counts = draw_multinomial(std::vector<double>(joint.begin(), joint.end()), opt.shots, rng);
        for (std::size_t o = 0; o < 4; ++o) joint[o] = counts[o] / opt.shots;
      }
      const double plus = joint[static_cast<std::size_t>(2 * branch)];
      const double minus = joint[static_cast<std::size_t>(2 * branch + 1)];
      expect[static_cast<std::size_t>(b)] = plus - minus;
      fraction += (plus + minus) / 3.0;
    }
    res.branch_fraction[static_cast<std::size_t>(k)] = fraction;
    res.empty_input[static_cast<std::size_t>(k)] = fraction <= tol::kTrace;
    Matrix rho = fraction * Matrix::Identity(2, 2);
    for (int b = 0; b < 3; ++b) rho += expect[static_cast<std::size_t>(b)] * embedded_letter(bases[b], 2);
    outputs[static_cast<std::size_t>(k)] = 0.5 * rho;
  }
  bool all_empty = true;
  for (bool e : res.empty_input) all_empty = all_empty && e;
  if (all_empty) throw UndefinedExpectation("post-selected branch is empty for every input");

  const Matrix& e0 = outputs[0];
  const Matrix& e1 = outputs[1];
  const Matrix e01 = outputs[2] + kI * outputs[3] - 0.5 * Complex(1.0, 1.0) * (e0 + e1);
  res.choi = choi_from_unit_outputs({{e0, e01}, {Matrix(e01.adjoint()), e1}});
  return res;
}

inline ProcessTomographyResult process_tomography(double phi, int branch, const ProcessOptions& opt) {
  return process_tomography(detection_process(phi), branch, opt);
}

}  // namespace qloss
