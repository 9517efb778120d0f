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

#include "qloss/core/state.hpp"
#include "qloss/gates/compile.hpp"
#include "qloss/gates/gate_op.hpp"

#include <string>
#include <utility>
#include <vector>

namespace qloss {

/// A state plus hide/unhide bookkeeping.
///
/// With dims 5 hiding is explicit: HIDE/UNHIDE apply the swap into the
/// hiding levels and every gate acts on its full support. With dims 3 hiding
/// is ideal: HIDE/UNHIDE only toggle a mask, and collective gates (MS and
/// collective rotations) skip hidden ions.
template <class State>
class Register {
 public:
  explicit Register(State state)
      : state_(std::move(state)), hidden_(static_cast<std::size_t>(state_.ion_count()), false) {}

  const State& state() const { return state_; }
  State& state() { return state_; }
  int dims() const { return state_.dims(); }
  bool explicit_hiding() const { return state_.dims() >= 5; }
  bool hidden(int ion) const { return hidden_.at(static_cast<std::size_t>(ion)); }

  void apply(const GateOp& op) {
    state_.layout().check_support(op.support());
    switch (op.kind()) {
      case GateKind::kHide:
      case GateKind::kUnhide: {
        const int ion = op.support().front();
        const bool want_hidden = op.kind() == GateKind::kHide;
        if (hidden(ion) == want_hidden) {
          throw StateMachineError(std::string(want_hidden ? "hide of hidden" : "unhide of visible") +
                                  " ion " + std::to_string(ion));
        }
        if (explicit_hiding()) apply_factors(op);
        hidden_[static_cast<std::size_t>(ion)] = want_hidden;
        return;
      }
      case GateKind::kMsX:
      case GateKind::kCollectiveRX:
      case GateKind::kCollectiveRY: {
        if (explicit_hiding()) {
          apply_factors(op);
          return;
        }
        std::vector<int> visible;
        for (int ion : op.support()) {
          if (!hidden(ion)) visible.push_back(ion);
        }
        if (visible.empty() || (op.kind() == GateKind::kMsX && visible.size() < 2)) return;
        apply_factors(GateOp(op.kind(), op.angle(), std::move(visible)));
        return;
      }
      default:
        if (!explicit_hiding() && hidden(op.support().front())) {
          throw StateMachineError("addressed gate on a hidden ion");
        }
        apply_factors(op);
    }
  }

  void apply(const std::vector<GateOp>& program) {
    for (const auto& op : program) apply(op);
  }

  /// Applies a raw local unitary, bypassing the hiding logic.
  void apply_local(const Matrix& u, std::span<const int> support) { state_.apply(u, support); }

 private:
  void apply_factors(const GateOp& op) {
    for (const auto& f : factors(op, state_.dims())) state_.apply(f.matrix, f.support);
  }

  State state_;
  std::vector<bool> hidden_;
};

}  // namespace qloss
