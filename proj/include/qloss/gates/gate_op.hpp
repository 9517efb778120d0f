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

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qloss {

enum class GateKind {
  kMsX,           // exp(-i theta/2 sum_{j<l} X_j X_l), truncated X
  kCollectiveRX,  // exp(-i theta/2 sum_j X_j)
  kCollectiveRY,  // exp(-i theta/2 sum_j Y_j)
  kAddressedZ,    // exp(-i theta/2 Z_j)
  kLossRot,       // |0> <-> |2> rotation by phi
  kHide,          // |0> -> |H0>, |1> -> |H1>
  kUnhide,
};

inline std::string_view kind_name(GateKind k) {
  switch (k) {
    case GateKind::kMsX: return "MS_X";
    case GateKind::kCollectiveRX: return "COLLECTIVE_RX";
    case GateKind::kCollectiveRY: return "COLLECTIVE_RY";
    case GateKind::kAddressedZ: return "ADDRESSED_Z";
    case GateKind::kLossRot: return "LOSS_ROT";
    case GateKind::kHide: return "HIDE";
    case GateKind::kUnhide: return "UNHIDE";
  }
  return "?";
}

inline GateKind kind_from_name(std::string_view s) {
  for (GateKind k : {GateKind::kMsX, GateKind::kCollectiveRX, GateKind::kCollectiveRY, GateKind::kAddressedZ,
                     GateKind::kLossRot, GateKind::kHide, GateKind::kUnhide}) {
    if (kind_name(k) == s) return k;
  }
  throw ContractViolation("unknown gate kind '" + std::string(s) + "'");
}

/// Symbolic gate. Angles are radians and never reduced modulo 4 pi.
class GateOp {
 public:
  GateOp(GateKind kind, double angle, std::vector<int> support)
      : kind_(kind), angle_(angle), support_(std::move(support)) {
    for (std::size_t a = 0; a < support_.size(); ++a) {
      if (support_[a] < 0) throw DimensionError("negative ion index");
      for (std::size_t b = a + 1; b < support_.size(); ++b) {
        if (support_[a] == support_[b]) throw DimensionError("duplicate ion in gate support");
      }
    }
    switch (kind_) {
      case GateKind::kMsX:
        if (support_.size() < 2) throw ContractViolation("MS gate needs at least two ions");
        break;
      case GateKind::kCollectiveRX:
      case GateKind::kCollectiveRY:
        if (support_.empty()) throw ContractViolation("rotation needs at least one ion");
        break;
      default:
        if (support_.size() != 1) throw ContractViolation(std::string(kind_name(kind_)) + " acts on exactly one ion");
    }
  }

  GateKind kind() const { return kind_; }
  double angle() const { return angle_; }
  const std::vector<int>& support() const { return support_; }

  bool operator==(const GateOp&) const = default;

 private:
  GateKind kind_;
  double angle_;
  std::vector<int> support_;
};

inline GateOp loss_rotation(double phi, int ion) { return GateOp(GateKind::kLossRot, phi, {ion}); }
inline GateOp ms_gate(double theta, std::vector<int> support) { return GateOp(GateKind::kMsX, theta, std::move(support)); }
inline GateOp addressed_z(double theta, int ion) { return GateOp(GateKind::kAddressedZ, theta, {ion}); }
inline GateOp hide(int ion) { return GateOp(GateKind::kHide, 0.0, {ion}); }
inline GateOp unhide(int ion) { return GateOp(GateKind::kUnhide, 0.0, {ion}); }

enum class Axis { kX, kY };

inline GateOp collective_rotation(Axis axis, double theta, std::vector<int> support) {
  return GateOp(axis == Axis::kX ? GateKind::kCollectiveRX : GateKind::kCollectiveRY, theta, std::move(support));
}

/// Angle in units of pi, 12 significant digits.
inline std::string format_pi_units(double radians) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", radians / kPi);
  return buf;
}

/// One gate per line: `KIND angle ion[,ion...]`, angle in units of pi.
inline std::string format_program(const std::vector<GateOp>& program) {
  std::string out;
  for (const auto& op : program) {
    out += kind_name(op.kind());
    out += ' ';
    out += format_pi_units(op.angle());
    out += ' ';
    for (std::size_t i = 0; i < op.support().size(); ++i) {
      if (i > 0) out += ',';
      out += std::to_string(op.support()[i]);
    }
    out += '\n';
  }
  return out;
}

inline std::vector<GateOp> parse_program(std::string_view text) {
  std::vector<GateOp> program;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string kind, angle, ions, extra;
    if (!(fields >> kind >> angle >> ions) || (fields >> extra)) {
      throw ContractViolation("program line " + std::to_string(line_no) + ": expected `KIND angle ions`");
    }
    double units = 0.0;
    try {
      std::size_t used = 0;
      units = std::stod(angle, &used);
      if (used != angle.size()) throw std::invalid_argument(angle);
    } catch (const std::exception&) {
      throw ContractViolation("program line " + std::to_string(line_no) + ": bad angle '" + angle + "'");
    }
    std::vector<int> support;
    std::istringstream ion_list(ions);
    std::string tok;
    while (std::getline(ion_list, tok, ',')) {
      try {
        std::size_t used = 0;
        support.push_back(std::stoi(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ContractViolation("program line " + std::to_string(line_no) + ": bad ion '" + tok + "'");
      }
    }
    program.emplace_back(kind_from_name(kind), units * kPi, std::move(support));
  }
  return program;
}

}  // namespace qloss
