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
#include "qloss/core/random.hpp"
#include "qloss/core/state.hpp"
#include "qloss/gates/compile.hpp"
#include "qloss/gates/gate_op.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qloss {

/// 2-ion register: code ion and ancilla only. 5-ion register: three extra
/// ions in |+> that are hidden with explicit swap pulses during detection.
enum class SweepRegister { kTwoIon, kFiveIon };

inline std::string to_string(SweepRegister r) { return r == SweepRegister::kTwoIon ? "2" : "5"; }

struct SweepOptions {
  int shots = 200;
  std::uint64_t seed = 0;
  SweepRegister reg = SweepRegister::kTwoIon;
  double addressing_error = 0.0;  // failure probability of each hide pulse
};

/// Rates are fractions of all shots. With shots = 0 they are exact.
struct SweepRow {
  double phi = 0.0;
  int shots = 0;
  double direct_loss = 0.0;    // code ion found in |2>
  double detected_loss = 0.0;  // ancilla dark
  double false_positive = 0.0;
  double false_negative = 0.0;

  double efficiency() const { return 1.0 - false_positive - false_negative; }
};

/// Loss induced on a |0>-prepared ion: sin^2(phi/2).
inline double induced_loss(double phi) { return std::pow(std::sin(phi / 2), 2); }

namespace detail {

inline constexpr int kSweepSpectators = 3;
inline constexpr int kSweepPulses = 2 * kSweepSpectators;

// Joint probabilities indexed by 2 * detected + lost.
using JointTable = std::array<double, 4>;

// `failed` bit k marks hide pulse k (spectator k / 2, pulse 0->H0 for even k
// and 1->H1 for odd k) as not applied.
inline JointTable sweep_joint(double phi, SweepRegister reg, unsigned failed) {
  const bool five = reg == SweepRegister::kFiveIon;
  const int n = five ? 5 : 2;
  const int dims = five ? 5 : 3;
  const int ancilla = n - 1;
  const Layout layout(n, dims);
  Vector amps = Vector::Zero(static_cast<Eigen::Index>(layout.size()));
  amps(0) = 1.0;
  PureState psi(layout, amps);
  const int q[] = {0};
  psi.apply(gates::loss_rotation_matrix(phi, dims), q);
  std::vector<int> spectators;
  for (int s = 1; s < ancilla; ++s) spectators.push_back(s);
  for (int s : spectators) {
    const int site[] = {s};
    psi.apply(gates::single_rotation('Y', kPi / 2, dims), site);
  }
  auto hide_pulses = [&](bool with_errors) {
    for (std::size_t k = 0; k < spectators.size(); ++k) {
      const int site[] = {spectators[k]};
      for (int p = 0; p < 2; ++p) {
        const unsigned bit = 1u << (2 * k + static_cast<unsigned>(p));
        if (with_errors && (failed & bit)) continue;
        psi.apply(p == 0 ? gates::swap_pulse(Level::k0, Level::kH0, dims) : gates::swap_pulse(Level::k1, Level::kH1, dims),
                  site);
      }
    }
  };
  hide_pulses(true);
  std::vector<int> all;
  for (int i = 0; i < n; ++i) all.push_back(i);
  for (const auto& f : factors(ms_gate(kPi, all), dims)) psi.apply(f.matrix, f.support);
  for (const auto& f : factors(collective_rotation(Axis::kX, kPi, all), dims)) psi.apply(f.matrix, f.support);
  hide_pulses(false);

  JointTable t{};
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const double w = std::norm(psi.amplitudes()(static_cast<Eigen::Index>(i)));
    const int detected = is_bright_index(layout.digit(i, ancilla)) ? 0 : 1;
    const int lost = layout.digit(i, 0) == 2 ? 1 : 0;
    t[static_cast<std::size_t>(2 * detected + lost)] += w;
  }
  return t;
}

inline int pulse_count(SweepRegister reg) { return reg == SweepRegister::kFiveIon ? kSweepPulses : 0; }

inline SweepRow row_from_joint(double phi, int shots, const JointTable& t) {
  SweepRow r;
  r.phi = phi;
  r.shots = shots;
  r.direct_loss = t[1] + t[3];
  r.detected_loss = t[2] + t[3];
  r.false_positive = t[2];
  r.false_negative = t[1];
  return r;
}

inline std::vector<JointTable> pattern_tables(double phi, SweepRegister reg) {
  std::vector<JointTable> tables;
  for (unsigned pattern = 0; pattern < (1u << pulse_count(reg)); ++pattern) {
    tables.push_back(sweep_joint(phi, reg, pattern));
  }
  return tables;
}

inline SweepRow mix_tables(double phi, const std::vector<JointTable>& tables, int pulses, double eps) {
  JointTable total{};
  for (unsigned pattern = 0; pattern < tables.size(); ++pattern) {
    const int f = __builtin_popcount(pattern);
    const double w = std::pow(eps, f) * std::pow(1.0 - eps, pulses - f);
    for (std::size_t k = 0; k < 4; ++k) total[k] += w * tables[pattern][k];
  }
  return row_from_joint(phi, 0, total);
}

inline void check_error_rate(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw ContractViolation("addressing error must lie in [0, 1]");
}

}  // namespace detail

/// Exact rates, enumerating every hide-failure pattern.
inline SweepRow detection_exact(double phi, SweepRegister reg, double addressing_error) {
  detail::check_error_rate(addressing_error);
  return detail::mix_tables(phi, detail::pattern_tables(phi, reg), detail::pulse_count(reg), addressing_error);
}

/// Sampled sweep. Shot s at grid point i is seeded with
/// derive_seed(seed, {i, s}); it draws the hide failures, then the joint
/// (ancilla, code ion) readout.
inline std::vector<SweepRow> detection_sweep(const std::vector<double>& phis, const SweepOptions& opt) {
  if (opt.shots < 1) throw ContractViolation("shots must be at least 1");
  if (!(opt.addressing_error >= 0.0 && opt.addressing_error <= 1.0)) {
    throw ContractViolation("addressing error must lie in [0, 1]");
  }
  const int pulses = detail::pulse_count(opt.reg);
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < phis.size(); ++i) {
    std::map<unsigned, detail::JointTable> cache;
    std::array<int, 4> counts{};
    for (int s = 0; s < opt.shots; ++s) {
      Rng rng(derive_seed(opt.seed, {static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(s)}));
      unsigned pattern = 0;
      for (int k = 0; k < pulses; ++k) {
        if (bernoulli(rng, opt.addressing_error)) pattern |= 1u << k;
      }
      auto it = cache.find(pattern);
      if (it == cache.end()) it = cache.emplace(pattern, detail::sweep_joint(phis[i], opt.reg, pattern)).first;
      ++counts[static_cast<std::size_t>(sample_index(rng, it->second))];
    }
    detail::JointTable freq{};
    for (std::size_t k = 0; k < 4; ++k) freq[k] = static_cast<double>(counts[k]) / opt.shots;
    rows.push_back(detail::row_from_joint(phis[i], opt.shots, freq));
  }
  return rows;
}

/// Grid-averaged exact efficiency of the 5-ion register as a function of
/// the per-pulse addressing error.
class EfficiencyCurve {
 public:
  explicit EfficiencyCurve(const std::vector<double>& phis, SweepRegister reg = SweepRegister::kFiveIon)
      : phis_(phis), pulses_(detail::pulse_count(reg)) {
    if (phis.empty()) throw ContractViolation("empty phi grid");
    for (double phi : phis) tables_.push_back(detail::pattern_tables(phi, reg));
  }

  double operator()(double addressing_error) const {
    detail::check_error_rate(addressing_error);
    double acc = 0.0;
    for (std::size_t i = 0; i < phis_.size(); ++i) {
      acc += detail::mix_tables(phis_[i], tables_[i], pulses_, addressing_error).efficiency();
    }
    return acc / static_cast<double>(phis_.size());
  }

 private:
  std::vector<double> phis_;
  int pulses_;
  std::vector<std::vector<detail::JointTable>> tables_;
};

inline double mean_efficiency(const std::vector<double>& phis, SweepRegister reg, double addressing_error) {
  return EfficiencyCurve(phis, reg)(addressing_error);
}

/// Per-pulse addressing error giving the requested grid-averaged 5-ion
/// efficiency, by bisection on [0, 0.5].
inline double calibrate_addressing_error(double target_efficiency, const std::vector<double>& phis) {
  const EfficiencyCurve curve(phis);
  double lo = 0.0;
  double hi = 0.5;
  if (curve(lo) < target_efficiency || curve(hi) > target_efficiency) {
    throw ContractViolation("target efficiency is not bracketed by addressing errors in [0, 0.5]");
  }
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (curve(mid) > target_efficiency) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace qloss
