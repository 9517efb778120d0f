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
#include "qloss/protocol/circuits.hpp"
#include "qloss/protocol/code.hpp"
#include "qloss/protocol/run.hpp"
#include "qloss/tomography/state_tomography.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace qloss {

/// One reported quantity with its resampled standard deviation.
struct AnalysisResult {
  std::string name;
  double value = 0.0;
  double std_dev = 0.0;
  int shots = 0;
};

/// kAnalytic reports exact branch values; kTomography reconstructs every
/// branch state from sampled Pauli settings and resamples error bars.
enum class ReportEngine { kAnalytic, kTomography };

struct ReportOptions {
  NoiseModel noise;
  ReportEngine engine = ReportEngine::kAnalytic;
  int shots = 0;  // per setting; 0 selects the per-phi presets
  std::uint64_t seed = 0;
  int iterations = 100;
};

struct ReportRow {
  std::string state;
  std::string section;  // encoding, no-loss or loss
  double phi = 0.0;
  double probability = 1.0;
  std::vector<AnalysisResult> values;  // P_CS, code observables, fidelity

  const AnalysisResult* find(const std::string& name) const {
    for (const auto& v : values)
      if (v.name == name) return &v;
    return nullptr;
  }
};

/// Logical inputs |0_L>, |1_L>, |+i_L>.
inline std::vector<std::pair<std::string, double>> default_preps() {
  return {{"0_L", 0.0}, {"1_L", kPi}, {"+i_L", kPi / 2}};
}

inline std::vector<double> default_phis() { return {0.1 * kPi, 0.2 * kPi, 0.5 * kPi}; }

namespace detail {

// Target on the tomographed qubits only (dims 2).
inline DensityOperator qubit_target(double alpha, bool loss_branch) {
  const int n = loss_branch ? 3 : 4;
  const Layout layout(n, 2);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(layout.size()));
  const Complex c0 = std::cos(alpha / 2) / std::sqrt(2.0);
  const Complex c1 = kI * std::sin(alpha / 2) / std::sqrt(2.0);
  const Eigen::Index all = v.size() - 1;
  v(0) += c0;
  v(all) += c0;
  v(1) += c1;
  v(all - 1) += c1;
  return DensityOperator::from_pure(PureState(layout, v));
}

inline std::vector<double> estimate_values(const DensityOperator& est, const CodeDefinition& code,
                                           const DensityOperator& target) {
  std::vector<double> out;
  out.push_back(code_space_population(est, code));
  for (const auto& o : code.observables()) out.push_back(expectation(est, o.op));
  out.push_back(fidelity(est, target, true));
  return out;
}

inline std::vector<std::string> value_names(const CodeDefinition& code) {
  std::vector<std::string> names = {"P_CS"};
  for (const auto& o : code.observables()) names.push_back(o.name);
  names.push_back("fidelity");
  return names;
}

inline ReportRow analyse_branch(const std::string& state, const std::string& section, double phi, double alpha,
                                const BranchSummary& b, const ReportOptions& opt, std::uint64_t seed) {
  ReportRow row{state, section, phi, b.probability, {}};
  if (!b.populated()) return row;
  const bool loss = section == "loss";
  const CodeDefinition full = loss ? three_qubit_code() : four_qubit_code();
  if (opt.engine == ReportEngine::kAnalytic) {
    for (const auto& v : b.observables) row.values.push_back({v.name, v.value, 0.0, 0});
    return row;
  }
  const std::vector<int> qubits = loss ? std::vector<int>{1, 2, 3} : std::vector<int>{0, 1, 2, 3};
  const CodeDefinition code = restrict_code(full, qubits);
  const DensityOperator target = qubit_target(alpha, loss);
  const int shots = opt.shots > 0 ? opt.shots : paper_shots(section == "encoding" ? 0.1 * kPi : phi);
  const CountsTable counts = measure_settings(*b.state, qubits, shots, seed);
  const Estimator est = [&](const CountsTable& t) { return estimate_values(linear_inversion(t), code, target); };
  const auto values = est(counts);
  const auto stds = resample_errors(counts, est, opt.iterations, derive_seed(seed, {1}));
  const auto names = value_names(code);
  for (std::size_t k = 0; k < names.size(); ++k) row.values.push_back({names[k], values[k], stds[k], shots});
  return row;
}

}  // namespace detail

/// Encoding, no-loss and loss sections for every logical input and phi.
inline std::vector<ReportRow> table_report(const std::vector<std::pair<std::string, double>>& preps,
                                           const std::vector<double>& phis, const ReportOptions& opt) {
  std::vector<ReportRow> rows;
  for (std::size_t s = 0; s < preps.size(); ++s) {
    const auto& [name, alpha] = preps[s];
    const std::uint64_t base = derive_seed(opt.seed, {static_cast<std::uint64_t>(s)});
    const AnalyticResult enc = analytic_protocol({alpha}, 0.0);
    rows.push_back(detail::analyse_branch(name, "encoding", 0.0, alpha, enc.encoded, opt, derive_seed(base, {0})));
    for (std::size_t i = 0; i < phis.size(); ++i) {
      const AnalyticResult r = analytic_protocol({alpha}, phis[i], opt.noise);
      rows.push_back(detail::analyse_branch(name, "no-loss", phis[i], alpha, r.no_loss, opt, derive_seed(base, {1, i})));
      rows.push_back(detail::analyse_branch(name, "loss", phis[i], alpha, r.loss, opt, derive_seed(base, {2, i})));
    }
  }
  return rows;
}

/// Fixed-precision number for reports ("%.12g").
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", std::abs(v) < 5e-16 ? 0.0 : v);
  return buf;
}

/// CSV with the table column order P_CS, S1X, S1Z, S2Z, TX, TY, TZ, each
/// followed by its standard deviation. Loss rows leave S2Z empty.
inline std::string report_csv(const std::vector<ReportRow>& rows) {
  static const char* const columns[] = {"P_CS", "S1X", "S1Z", "S2Z", "TX", "TY", "TZ", "fidelity"};
  std::ostringstream out;
  out << "state,section,phi_pi,probability,shots";
  for (const char* c : columns) out << ',' << c << ',' << c << "_std";
  out << '\n';
  for (const auto& r : rows) {
    out << r.state << ',' << r.section << ',' << (r.section == "encoding" ? "" : format_number(r.phi / kPi)) << ','
        << format_number(r.probability) << ',' << (r.values.empty() ? 0 : r.values.front().shots);
    for (const char* c : columns) {
      const AnalysisResult* v = r.find(c);
      if (v == nullptr) {
        out << ",,";
      } else {
        out << ',' << format_number(v->value) << ',' << format_number(v->std_dev);
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace qloss
