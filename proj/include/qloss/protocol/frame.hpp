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

#include "qloss/core/pauli.hpp"
#include "qloss/core/state.hpp"
#include "qloss/protocol/code.hpp"

#include <map>
#include <string>

namespace qloss {

/// Classical Pauli correction tracked instead of applied. The frame-adjusted
/// value of an observable O is sign(O) * <O>, where sign(O) = -1 iff O
/// anticommutes with the correction.
class PauliFrame {
 public:
  explicit PauliFrame(int width = kRegisterIons) : correction_(width) {}

  const PauliString& correction() const { return correction_; }
  bool is_identity() const { return correction_.weight() == 0; }

  int sign(const PauliString& observable) const { return correction_.commutes_with(observable) ? 1 : -1; }

  std::map<std::string, int> signs(const CodeDefinition& code) const {
    std::map<std::string, int> out;
    for (const auto& o : code.observables()) out[o.name] = sign(o.op);
    return out;
  }

  void multiply(const PauliString& p) { correction_ = correction_ * p; }

  bool operator==(const PauliFrame& other) const { return correction_.same_operator(other.correction_); }

 private:
  PauliString correction_;
};

/// Ion carrying the frame fix Z2 after a -1 shrunk-stabilizer outcome.
inline constexpr int kFrameIon = 1;

/// A -1 outcome multiplies the frame by Z2, which anticommutes only with
/// X2X3X4 among the three-qubit generators and logicals.
inline PauliFrame frame_update(PauliFrame frame, int outcome) {
  if (outcome != 1 && outcome != -1) throw ContractViolation("stabilizer outcome must be +1 or -1");
  if (outcome == -1) {
    frame.multiply(PauliString::from_sites(frame.correction().width(), {{kFrameIon, 'Z'}}));
  }
  return frame;
}

/// Pauli letter as a unitary on one ion: the 2x2 Pauli on {|0>,|1>}, the
/// identity on every other level.
inline Matrix pauli_unitary(char letter, int dims) {
  Matrix u = embedded_letter(letter, dims);
  if (letter != 'I') {
    for (int l = 2; l < dims; ++l) u(l, l) = 1.0;
  }
  return u;
}

/// Applies the frame correction to a state (used to compare with targets).
template <class State>
void apply_frame(State& state, const PauliFrame& frame) {
  for (const auto& [site, letter] : frame.correction().terms()) {
    const int support[] = {site};
    state.apply(pauli_unitary(letter, state.dims()), support);
  }
}

}  // namespace qloss
