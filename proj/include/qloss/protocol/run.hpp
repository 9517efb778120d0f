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

#include "qloss/channels/channel.hpp"
#include "qloss/core/common.hpp"
#include "qloss/core/random.hpp"
#include "qloss/core/state.hpp"
#include "qloss/gates/gate_op.hpp"
#include "qloss/gates/register.hpp"
#include "qloss/protocol/circuits.hpp"
#include "qloss/protocol/code.hpp"
#include "qloss/protocol/frame.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qloss {

struct NamedValue {
  std::string name;
  double value = 0.0;
};

/// Branch-conditioned result of the analytic engine. `state` is normalised
/// and frame-corrected; `observables` is empty when the branch never occurs.
struct BranchSummary {
  std::string branch;
  double probability = 0.0;
  std::optional<DensityOperator> state;
  std::vector<NamedValue> observables;

  bool populated() const { return state.has_value(); }
  double value(const std::string& name) const {
    for (const auto& o : observables)
      if (o.name == name) return o.value;
    throw ContractViolation("no observable named " + name + " in the " + branch + " branch");
  }
};

struct AnalyticResult {
  double alpha = 0.0;
  double phi = 0.0;
  BranchSummary encoded;
  BranchSummary no_loss;
  BranchSummary loss;
};

/// One shot of the feed-forward protocol.
struct RunRecord {
  int shot = 0;
  double phi = 0.0;
  bool loss = false;
  int ancilla_outcome = 0;
  int stabilizer_outcome = 0;  // 0 in the no-loss branch
  PauliFrame frame;
  std::vector<NamedValue> expectations;
  std::vector<std::pair<std::string, int>> samples;
  std::uint64_t seed = 0;

  std::string branch() const { return loss ? "loss" : "no-loss"; }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["shot"] = shot;
    j["phi"] = phi;
    j["branch"] = branch();
    j["ancilla_outcome"] = ancilla_outcome;
    if (loss) j["stabilizer_outcome"] = stabilizer_outcome;
    j["frame"] = frame.correction().to_string();
    nlohmann::ordered_json e = nlohmann::ordered_json::object();
    for (const auto& o : expectations) e[o.name] = o.value;
    j["expectations"] = e;
    nlohmann::ordered_json s = nlohmann::ordered_json::object();
    for (const auto& [name, v] : samples) s[name] = v;
    j["samples"] = s;
    j["seed"] = seed;
    return j;
  }
};

struct ProtocolOptions {
  int shots = 1;
  std::uint64_t seed = 0;
  NoiseModel noise;
  StabilizerMode mode = StabilizerMode::kToolbox;
  int dims = 3;
};

struct ProtocolResult {
  AnalyticResult analytic;
  std::vector<RunRecord> records;
};

/// Shots per phi used in the experiment: 1000 at 0.1pi, 600 at 0.2pi, 200 at
/// 0.5pi. Other angles get 1000.
inline int paper_shots(double phi) {
  const double u = phi / kPi;
  if (std::abs(u - 0.2) < 1e-9) return 600;
  if (std::abs(u - 0.5) < 1e-9) return 200;
  return 1000;
}

/// Noise targets of each branch: the surviving code ions.
inline std::vector<int> noise_targets(bool loss_branch) {
  return loss_branch ? std::vector<int>{1, 2, 3} : std::vector<int>{0, 1, 2, 3};
}

/// Encoded state after the controlled loss rotation on ion 0.
inline PureState prepared_state(double alpha, double phi, int dims = 3) {
  Register<PureState> reg(encode(alpha, dims));
  reg.apply(loss_rotation(phi, kLossIon));
  return reg.state();
}

namespace detail {

inline const std::vector<int>& code_ions() {
  static const std::vector<int> ions = {0, 1, 2, 3};
  return ions;
}

inline std::vector<NamedValue> branch_observables(const DensityOperator& rho, const CodeDefinition& code,
                                                  const PureState& target) {
  std::vector<NamedValue> out;
  out.push_back({"P_CS", code_space_population(rho, code)});
  for (const auto& o : code.observables()) out.push_back({o.name, expectation(rho, o.op)});
  out.push_back({"fidelity", fidelity_with_pure(partial_trace(rho, code_ions()), target)});
  return out;
}

inline BranchSummary summarize(std::string name, const DensityOperator& unnormalized, const CodeDefinition& code,
                               const PureState& target) {
  BranchSummary s;
  s.branch = std::move(name);
  s.probability = unnormalized.trace();
  if (s.probability > tol::kTrace) {
    s.state = unnormalized.normalized();
    s.observables = branch_observables(*s.state, code, target);
  }
  return s;
}

// Fidelity of the code ions (0..3) with `target`, tracing out the ancilla
// (the last ion).
inline double code_fidelity(const PureState& psi, const PureState& target) {
  const int dims = psi.dims();
  const Vector& t = target.amplitudes();
  double f = 0.0;
  for (int a = 0; a < dims; ++a) {
    Complex acc = 0.0;
    for (Eigen::Index c = 0; c < t.size(); ++c) acc += std::conj(t(c)) * psi.amplitudes()(c * dims + a);
    f += std::norm(acc);
  }
  return f / psi.amplitudes().squaredNorm();
}

inline BranchSummary summarize(std::string name, const PureState& unnormalized, const CodeDefinition& code,
                               const PureState& target) {
  BranchSummary s;
  s.branch = std::move(name);
  s.probability = unnormalized.amplitudes().squaredNorm();
  if (s.probability > tol::kTrace) {
    const PureState psi(unnormalized.layout(), unnormalized.amplitudes() / std::sqrt(s.probability));
    s.state = DensityOperator::from_pure(psi);
    s.observables.push_back({"P_CS", code_space_population(psi, code)});
    for (const auto& o : code.observables()) s.observables.push_back({o.name, expectation(psi, o.op)});
    s.observables.push_back({"fidelity", code_fidelity(psi, target)});
  }
  return s;
}

}  // namespace detail

/// Exact branch-conditioned density operators and observables.
inline AnalyticResult analytic_protocol(const PrepSpec& prep, double phi, const NoiseModel& noise = {}, int dims = 3) {
  noise.validate();
  AnalyticResult r;
  r.alpha = prep.alpha;
  r.phi = phi;
  const CodeDefinition four = four_qubit_code();
  const CodeDefinition three = three_qubit_code();
  const PureState target4 = four_qubit_target(prep.alpha, dims);
  const PureState target3 = three_qubit_target(prep.alpha, dims);

  r.encoded = detail::summarize("encoded", encode(prep.alpha, dims), four, target4);

  const auto [no_loss, loss] = detection_branches(prepared_state(prep.alpha, phi, dims));
  if (noise.also_no_loss && no_loss.amplitudes().squaredNorm() > tol::kTrace) {
    const DensityOperator kept =
        qnd_noise_mixture(DensityOperator::from_pure(no_loss), phi, noise, noise_targets(false));
    r.no_loss = detail::summarize("no-loss", kept, four, target4);
  } else {
    r.no_loss = detail::summarize("no-loss", no_loss, four, target4);
  }

  DensityOperator lost = DensityOperator::from_pure(loss);
  const double p_loss = loss.amplitudes().squaredNorm();
  if (p_loss > tol::kTrace) {
    const auto branches =
        shrunk_stabilizer_outcomes(PureState(loss.layout(), loss.amplitudes() / std::sqrt(p_loss)));
    lost = DensityOperator::from_pure(branches[0]);
    lost += DensityOperator::from_pure(branches[1]);
    lost *= p_loss;
    lost = qnd_noise_mixture(lost, phi, noise, noise_targets(true));
  }
  r.loss = detail::summarize("loss", lost, three, target3);
  return r;
}

/// Trajectory engine plus the analytic result for the same parameters. Shot
/// i draws from a generator seeded with derive_seed(seed, {i}).
inline ProtocolResult run_protocol(const PrepSpec& prep, double phi, const ProtocolOptions& opt) {
  if (opt.shots < 1) throw ContractViolation("shots must be at least 1");
  ProtocolResult out;
  out.analytic = analytic_protocol(prep, phi, opt.noise, opt.dims);

  const CodeDefinition four = four_qubit_code();
  const CodeDefinition three = three_qubit_code();
  const PureState target4 = four_qubit_target(prep.alpha, opt.dims);
  const PureState target3 = three_qubit_target(prep.alpha, opt.dims);
  const PureState pre = detection_circuit(prepared_state(prep.alpha, phi, opt.dims));
  const char letters[] = {'I', 'X', 'Y', 'Z'};

  out.records.reserve(static_cast<std::size_t>(opt.shots));
  for (int shot = 0; shot < opt.shots; ++shot) {
    RunRecord rec;
    rec.shot = shot;
    rec.phi = phi;
    rec.seed = derive_seed(opt.seed, {static_cast<std::uint64_t>(shot)});
    Rng rng(rec.seed);

    DetectionResult det = read_detection(pre, rng);
    rec.loss = det.loss;
    rec.ancilla_outcome = det.ancilla_outcome;
    PureState state = std::move(det.state);
    if (det.loss) {
      StabilizerResult sr = measure_shrunk_stabilizer(state, opt.mode, rng);
      rec.stabilizer_outcome = sr.outcome;
      rec.frame = frame_update(rec.frame, sr.outcome);
      state = std::move(sr.state);
      apply_frame(state, rec.frame);
    }
    if (opt.noise.active() && (det.loss || opt.noise.also_no_loss)) {
      if (bernoulli(rng, mixing_probability(opt.noise.p_qnd, phi))) {
        const auto targets = noise_targets(det.loss);
        const int site[] = {targets[static_cast<std::size_t>(rng() % targets.size())]};
        state.apply(pauli_unitary(letters[rng() % 4], state.dims()), site);
      }
    }

    const CodeDefinition& code = det.loss ? three : four;
    const double pcs = code_space_population(state, code);
    rec.expectations.push_back({"P_CS", pcs});
    rec.samples.emplace_back("P_CS", bernoulli(rng, pcs) ? 1 : 0);
    for (const auto& o : code.observables()) {
      const double e = expectation(state, o.op);
      rec.expectations.push_back({o.name, e});
      rec.samples.emplace_back(o.name, bernoulli(rng, 0.5 * (1.0 + e)) ? 1 : -1);
    }
    const double f = detail::code_fidelity(state, det.loss ? target3 : target4);
    rec.expectations.push_back({"fidelity", f});
    rec.samples.emplace_back("fidelity", bernoulli(rng, f) ? 1 : 0);
    out.records.push_back(std::move(rec));
  }
  return out;
}

/// Trajectory mean of one sampled quantity against its analytic value.
struct Agreement {
  std::string branch;
  std::string name;
  int count = 0;
  double sampled = 0.0;
  double analytic = 0.0;
  double sigma = 0.0;
  bool within(double n_sigma = 4.0) const {
    return std::abs(sampled - analytic) <= std::max(n_sigma * sigma, 1e-9);
  }
};

/// Branch frequency and every sampled observable, per populated branch.
/// +-1 samples have sigma sqrt((1 - m^2)/n); 0/1 samples sqrt(m(1 - m)/n).
inline std::vector<Agreement> compare_with_analytic(const ProtocolResult& result) {
  std::vector<Agreement> out;
  const int n = static_cast<int>(result.records.size());
  int losses = 0;
  for (const auto& r : result.records) losses += r.loss ? 1 : 0;
  const double pl = result.analytic.loss.probability;
  out.push_back({"all", "loss_frequency", n, static_cast<double>(losses) / n, pl, std::sqrt(pl * (1 - pl) / n)});

  for (const BranchSummary* b : {&result.analytic.no_loss, &result.analytic.loss}) {
    if (!b->populated()) continue;
    const bool loss_branch = b == &result.analytic.loss;
    for (const auto& ov : b->observables) {
      Agreement a{b->branch, ov.name, 0, 0.0, ov.value, 0.0};
      const bool binary = ov.name == "P_CS" || ov.name == "fidelity";
      double sum = 0.0;
      for (const auto& r : result.records) {
        if (r.loss != loss_branch) continue;
        for (const auto& [name, v] : r.samples) {
          if (name == ov.name) {
            sum += v;
            ++a.count;
          }
        }
      }
      if (a.count == 0) continue;
      a.sampled = sum / a.count;
      const double m = ov.value;
      a.sigma = std::sqrt(std::max(0.0, binary ? m * (1 - m) : 1 - m * m) / a.count);
      out.push_back(a);
    }
  }
  return out;
}

}  // namespace qloss
