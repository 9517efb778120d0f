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

// Acceptance checks AC1..AC11. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails. argv[1] is the qloss CLI binary.

#include "../unit/oracles.hpp"
#include "qloss/channels/channel.hpp"
#include "qloss/channels/choi.hpp"
#include "qloss/lattice/lattice.hpp"
#include "qloss/lattice/percolation.hpp"
#include "qloss/protocol/circuits.hpp"
#include "qloss/protocol/code.hpp"
#include "qloss/protocol/detection_sweep.hpp"
#include "qloss/protocol/frame.hpp"
#include "qloss/protocol/run.hpp"
#include "qloss/tomography/process_tomography.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace qloss;
using oracle::M;
using oracle::V;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double s15_law(double phi) { return 4 * std::cos(phi / 2) / (3 + std::cos(phi)); }

Verdict ac1() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double phi = kPi * k / 49.0;
    worst = std::max(worst, std::abs(analytic_protocol({kPi / 2}, phi).no_loss.value("S1X") - s15_law(phi)));
  }
  double worst_small = 0.0;
  for (int k = 1; k <= 10; ++k) {
    const double phi = 0.01 * k;
    const double v = analytic_protocol({kPi / 2}, phi).no_loss.value("S1X");
    worst_small = std::max(worst_small, std::abs(v - (1 - std::pow(phi, 4) / 128)));
  }
  const double t = seconds_since(t0);
  return {worst < 1e-10 && worst_small < 1e-6 && t < 1.0,
          "max law error " + num(worst) + ", expansion error " + num(worst_small) + ", " + num(t) + " s"};
}

// Dense 5-ion qutrit oracle of loss rotation plus ideal detection unit.
constexpr int kD = 3;

V logical_oracle(double alpha) {
  V v = V::Zero(243);
  const oracle::C c0 = std::cos(alpha / 2);
  const oracle::C c1 = oracle::kI * std::sin(alpha / 2);
  v += c0 * oracle::ket(kD, {0, 0, 0, 0, 0});
  v += c0 * oracle::ket(kD, {1, 1, 1, 1, 0});
  v += c1 * oracle::ket(kD, {0, 0, 0, 1, 0});
  v += c1 * oracle::ket(kD, {1, 1, 1, 0, 0});
  return v / v.norm();
}

M loss_oracle(double phi) {
  M g = M::Zero(3, 3);
  g(0, 2) = oracle::kI * 0.5;
  g(2, 0) = -oracle::kI * 0.5;
  return oracle::on_ion(5, kD, 0, oracle::expm_minus_i(phi * g));
}

M detection_oracle() {
  const M ms = oracle::expm_minus_i(oracle::ms_generator(5, kD, {0, 4}, kPi));
  const M rx = oracle::expm_minus_i(0.5 * kPi * (oracle::on_ion(5, kD, 0, oracle::xbar(kD)) +
                                                 oracle::on_ion(5, kD, 4, oracle::xbar(kD))));
  return rx * ms;
}

Verdict ac2() {
  double worst = 0.0;
  for (double alpha : {0.0, kPi}) {
    for (int k = 0; k <= 20; ++k) {
      const double phi = kPi * k / 20;
      const auto br = detection_branches(DensityOperator::from_pure(prepared_state(alpha, phi)));
      worst = std::max(worst, std::abs(br.second.trace() - 0.5 * std::pow(std::sin(phi / 2), 2)));
    }
  }
  M dark = M::Zero(3, 3);
  dark(1, 1) = 1.0;
  dark(2, 2) = 1.0;
  const M dark5 = oracle::on_ion(5, kD, 4, dark);
  const M u = detection_oracle();
  double worst_plus_i = 0.0;
  double sample = 0.0;
  for (double phi : {0.1 * kPi, 0.3 * kPi, 0.5 * kPi, 0.9 * kPi, kPi}) {
    const V out = u * loss_oracle(phi) * logical_oracle(kPi / 2);
    const double p_oracle = (dark5 * out).squaredNorm();
    const auto br = detection_branches(DensityOperator::from_pure(prepared_state(kPi / 2, phi)));
    worst_plus_i = std::max(worst_plus_i, std::abs(br.second.trace() - p_oracle));
    if (phi == 0.5 * kPi) sample = p_oracle;
  }
  return {worst < 1e-12 && worst_plus_i < 1e-12,
          "basis-state error " + num(worst) + ", +i_L vs brute force " + num(worst_plus_i) +
              " (p_L(0.5pi) = " + num(sample) + ", not sin^2(phi/2)/4)"};
}

Verdict ac3() {
  double worst = 0.0;
  double worst_trace = 0.0;
  for (double u : {0.10, 0.30, 0.53, 0.81}) {
    const double phi = u * kPi;
    const double c = std::cos(phi / 2);
    const double s = std::sin(phi / 2);
    M phi0 = M::Zero(4, 4);
    phi0(0, 0) = c * c / 2;
    phi0(0, 3) = c / 2;
    phi0(3, 0) = c / 2;
    phi0(3, 3) = 0.5;
    M phi1 = M::Zero(4, 4);
    phi1(2, 2) = s * s / 2;
    const auto r0 = process_tomography(phi, 0, {});
    const auto r1 = process_tomography(phi, 1, {});
    worst = std::max({worst, oracle::max_abs(r0.choi.matrix - phi0), oracle::max_abs(r1.choi.matrix - phi1)});
    worst_trace = std::max(worst_trace, std::abs((r0.choi.matrix + r1.choi.matrix).trace().real() - 1.0));
  }
  return {worst < 1e-9 && worst_trace < 1e-12,
          "max Choi entry error " + num(worst) + ", trace error " + num(worst_trace)};
}

PureState loss_branch_state(double alpha, double phi) {
  const PureState pre = detection_circuit(prepared_state(alpha, phi));
  for (std::uint64_t s = 0;; ++s) {
    Rng r(s);
    auto d = read_detection(pre, r);
    if (d.loss) return d.state;
  }
}

Verdict ac4() {
  const CodeDefinition code = three_qubit_code();
  double worst_f = 0.0;
  double worst_s = 0.0;
  int outcomes_seen = 0;
  for (int a = 0; a < 8; ++a) {
    const double alpha = 2 * kPi * a / 8;
    for (double phi : {0.1 * kPi, 0.2 * kPi, 0.5 * kPi}) {
      const PureState lost = loss_branch_state(alpha, phi);
      bool seen[2] = {false, false};
      for (std::uint64_t k = 0; k < 64 && !(seen[0] && seen[1]); ++k) {
        Rng r(k);
        auto res = measure_shrunk_stabilizer(lost, StabilizerMode::kToolbox, r);
        const int idx = res.outcome == 1 ? 0 : 1;
        if (seen[idx]) continue;
        seen[idx] = true;
        ++outcomes_seen;
        apply_frame(res.state, frame_update(PauliFrame(), res.outcome));
        worst_f = std::max(worst_f, 1.0 - detail::code_fidelity(res.state, three_qubit_target(alpha)));
        for (const auto& g : code.stabilizers) worst_s = std::max(worst_s, std::abs(1.0 - expectation(res.state, g.op)));
      }
      const auto an = analytic_protocol({alpha}, phi);
      worst_f = std::max(worst_f, 1.0 - an.loss.value("fidelity"));
    }
  }
  return {worst_f <= 1e-10 && worst_s <= 1e-10 && outcomes_seen == 48,
          "max infidelity " + num(worst_f) + ", max |1 - S| " + num(worst_s) + ", outcome branches " +
              std::to_string(outcomes_seen) + "/48"};
}

Verdict ac5() {
  double worst = 0.0;
  for (int a = 0; a < 8; ++a) {
    for (int k = 0; k < 50; ++k) {
      const double phi = kPi * k / 49.0;
      const auto r = analytic_protocol({2 * kPi * a / 8}, phi);
      if (!r.no_loss.populated()) continue;
      worst = std::max({worst, std::abs(1 - r.no_loss.value("S1Z")), std::abs(1 - r.no_loss.value("S2Z"))});
    }
  }
  return {worst < 1e-10, "max |1 - S_Z| " + num(worst)};
}

Verdict ac6() {
  std::vector<double> phis;
  for (int k = 0; k < 21; ++k) phis.push_back(kPi * k / 20);
  double worst_z = 0.0;
  bool ok = true;
  double worst_rate = 0.0;
  for (auto reg : {SweepRegister::kTwoIon, SweepRegister::kFiveIon}) {
    const auto rows = detection_sweep(phis, {200, 2026, reg, 0.0});
    for (const auto& row : rows) {
      const double p = std::pow(std::sin(row.phi / 2), 2);
      const double sigma = std::sqrt(p * (1 - p) / 200);
      const double dev = std::abs(row.detected_loss - p);
      if (sigma == 0.0) {
        ok = ok && dev == 0.0;
      } else {
        ok = ok && dev <= 4 * sigma;
        worst_z = std::max(worst_z, dev / sigma);
      }
    }
    for (double phi : phis) {
      const auto ex = detection_exact(phi, reg, 0.0);
      worst_rate = std::max({worst_rate, ex.false_positive, ex.false_negative});
    }
  }
  ok = ok && worst_rate < 1e-12;
  return {ok, "max deviation " + num(worst_z) + " sigma, max exact FP/FN " + num(worst_rate)};
}

Verdict ac7() {
  const double pq = 0.033;
  const auto noise = NoiseModel::depolarizing(pq);
  std::vector<double> pcs;
  for (double u : {0.1, 0.2, 0.5}) pcs.push_back(analytic_protocol({kPi}, u * kPi, noise).loss.value("P_CS"));
  const bool increasing = pcs[0] < pcs[1] && pcs[1] < pcs[2];
  double worst = 0.0;
  for (int k = 1; k <= 20; ++k) {
    const double phi = kPi * k / 20;
    const double expect = pq / (pq + 0.5 * std::pow(std::sin(phi / 2), 2));
    worst = std::max(worst, std::abs(mixing_probability(pq, phi) - expect));
  }
  const double p_pi = mixing_probability(pq, kPi);
  return {increasing && worst < 1e-12 && std::abs(p_pi - 0.0619) < 5e-5,
          "P_CS " + num(pcs[0]) + " < " + num(pcs[1]) + " < " + num(pcs[2]) + ", p(pi) = " + num(p_pi) +
              ", formula error " + num(worst)};
}

Verdict ac8() {
  const auto t0 = Clock::now();
  const LossLattice r = reform_stabilizers(apply_losses(minimal_instance(), std::vector<int>{0}));
  const LogicalResult lr = find_logical(r);
  const bool ok = r.z_generators == std::vector<Support>{{1, 2}} && r.x_generators == std::vector<Support>{{1, 2, 3}} &&
                  lr.tz && *lr.tz == Support{1, 3};
  const double t = seconds_since(t0);
  return {ok && t < 0.1, "Z {q2 q3}, X {q2 q3 q4}, T^Z {q2 q4} " + std::string(ok ? "reproduced" : "mismatch") +
                             ", " + num(t) + " s"};
}

Verdict ac9() {
  const auto t0 = Clock::now();
  std::vector<double> ps;
  for (int i = 0; i <= 20; ++i) ps.push_back(0.40 + 0.01 * i);
  const auto r = percolation_threshold({16, 32}, ps, {2000, 2026, Boundary::kPlanar});
  const double t = seconds_since(t0);
  if (!r.threshold) return {false, "no crossing found"};
  return {*r.threshold >= 0.48 && *r.threshold <= 0.52 && t < 120.0,
          "crossing " + num(*r.threshold) + ", " + num(t) + " s"};
}

Verdict ac10() {
  const auto t0 = Clock::now();
  bool ok = true;
  double worst = 0.0;
  int checked = 0;
  const std::vector<std::pair<double, double>> pairs = {{kPi / 2, 0.5 * kPi}, {kPi, 0.3 * kPi}, {0.7, 0.9 * kPi}};
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    ProtocolOptions opt;
    opt.shots = 10000;
    opt.seed = derive_seed(2026, {i});
    const auto res = run_protocol({pairs[i].first}, pairs[i].second, opt);
    for (const auto& a : compare_with_analytic(res)) {
      ok = ok && a.within(4.0);
      if (a.sigma > 0) worst = std::max(worst, std::abs(a.sampled - a.analytic) / a.sigma);
      ++checked;
    }
  }
  const double t = seconds_since(t0);
  return {ok && t < 60.0, std::to_string(checked) + " observables, max deviation " + num(worst) + " sigma, " +
                              num(t) + " s"};
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

Verdict ac11(const std::string& cli) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "qloss_acceptance";
  fs::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> cmds = {
      {"detect-sweep", "--phi-grid 0:pi:21 --shots 200 --register 5 --seed 11"},
      {"protocol", "--alpha +i_L --phi-grid 0.1pi,0.5pi --shots 50 --noise pqnd=0.033 --seed 11"},
      {"choi", "--phi-grid 0.10pi,0.53pi,0.81pi --shots 200 --iterations 5 --seed 11"},
      {"percolation", "--L 8,16 --p 0.45:0.55:3 --samples 200 --seed 11"},
      {"stabilizer-sweep", "--shots 100 --seed 11"}};
  bool ok = true;
  std::string bad;
  for (const auto& [name, flags] : cmds) {
    std::string outs[2];
    for (int run = 0; run < 2; ++run) {
      const std::string base = (dir / (name + "_" + std::to_string(run))).string();
      std::string cmd = "\"" + cli + "\" " + name + " " + flags + " --output \"" + base + ".out\"";
      if (name == "protocol") cmd += " --table \"" + base + ".csv\"";
      if (std::system(cmd.c_str()) != 0) {
        ok = false;
        bad += " " + name + "(exit)";
      }
      outs[run] = slurp(base + ".out") + (name == "protocol" ? slurp(base + ".csv") : "");
    }
    if (outs[0].empty() || outs[0] != outs[1]) {
      ok = false;
      bad += " " + name;
    }
  }
  return {ok, ok ? "5 subcommands byte-identical across runs" : "differs:" + bad};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: qloss_acceptance <path-to-qloss-cli>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const std::vector<std::pair<std::string, std::function<Verdict()>>> checks = {
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4},   {"AC5", ac5},
      {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9},   {"AC10", ac10},
      {"AC11", [&] { return ac11(cli); }}};
  int failures = 0;
  for (const auto& [name, check] : checks) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::cout << name << ' ' << (v.pass ? "PASS" : "FAIL") << ' ' << v.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
