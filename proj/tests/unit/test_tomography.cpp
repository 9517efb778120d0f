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

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qloss/channels/choi.hpp"
#include "qloss/protocol/run.hpp"
#include "qloss/tomography/process_tomography.hpp"
#include "qloss/tomography/state_tomography.hpp"
#include "qloss/tomography/table_report.hpp"

#include <cmath>
#include <random>
#include <set>
#include <vector>

namespace {

using namespace qloss;
using oracle::M;
using oracle::V;

// 2-ion dims-3 register holding a computational 2-qubit state.
DensityOperator embed_two_qubits(const M& rho2) {
  M full = M::Zero(9, 9);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) full((a >> 1) * 3 + (a & 1), (b >> 1) * 3 + (b & 1)) = rho2(a, b);
  return DensityOperator(Layout(2, 3), full);
}

M projector(const V& v) { return v * v.adjoint(); }

TEST(Settings, EnumerateEachBasisStringOnce) {
  for (int n = 1; n <= 4; ++n) {
    const auto b = tomography_bases(n);
    EXPECT_EQ(b.size(), static_cast<std::size_t>(std::pow(3, n)));
    EXPECT_EQ(std::set<std::string>(b.begin(), b.end()).size(), b.size());
  }
}

TEST(StateTomography, ExactModeIsUnbiasedOnRandomStates) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 20; ++trial) {
    const M rho2 = oracle::random_density(4, 1 + trial % 4, gen);
    const DensityOperator est = state_tomography_exact(embed_two_qubits(rho2), {0, 1});
    EXPECT_LT(oracle::max_abs(est.matrix() - rho2), 1e-10);
  }
}

TEST(StateTomography, ExactModeReconstructsZeroLogical) {
  const DensityOperator rho = DensityOperator::from_pure(encode(0.0));
  const DensityOperator est = state_tomography_exact(rho, {0, 1, 2, 3});
  V ghz = V::Zero(16);
  ghz(0) = ghz(15) = 1 / std::sqrt(2.0);
  EXPECT_NEAR(fidelity(est.matrix(), projector(ghz)), 1.0, 1e-10);
}

TEST(StateTomography, ExactModeRecoversClosedFormStabilizer) {
  const auto r = analytic_protocol({kPi / 2}, 0.5 * kPi);
  const DensityOperator est = state_tomography_exact(*r.no_loss.state, {0, 1, 2, 3});
  EXPECT_NEAR(expectation(est, PauliString::parse("XXXX")), 4 * std::cos(kPi / 4) / 3, 1e-10);
}

TEST(StateTomography, LeakedPopulationReadsDark) {
  const DensityOperator leaked = DensityOperator::from_pure(make_state(2, 3, {Level::k2, Level::k0}));
  const auto p = setting_probabilities(leaked, {0, 1}, "ZZ");
  EXPECT_NEAR(p[2], 1.0, 1e-12);
}

TEST(StateTomography, SampledFidelityWithinResampledErrors) {
  const DensityOperator rho = DensityOperator::from_pure(encode(0.0));
  V ghz = V::Zero(16);
  ghz(0) = ghz(15) = 1 / std::sqrt(2.0);
  const M target = projector(ghz);
  const CountsTable counts = measure_settings(rho, {0, 1, 2, 3}, 100, 42);
  const Estimator est = [&](const CountsTable& t) {
    return std::vector<double>{fidelity(linear_inversion(t).matrix(), target, true)};
  };
  const double f = est(counts)[0];
  const double sd = resample_errors(counts, est, 100, 3)[0];
  EXPECT_GT(sd, 0.0);
  EXPECT_LE(std::abs(1.0 - f), 5 * sd);
}

TEST(StateTomography, ZeroShotsAreRejected) {
  const DensityOperator rho = DensityOperator::from_pure(encode(0.0));
  EXPECT_THROW(state_tomography(rho, {0, 1}, 0, 1), ContractViolation);
}

TEST(Resample, CoinMatchesBinomialWidth) {
  CountsTable t{{0}, {"Z"}, {{50, 50}}};
  const Estimator z = [](const CountsTable& c) { return std::vector<double>{pauli_estimates(c).at("Z")}; };
  const double sd = resample_errors(t, z, 2000, 5)[0];
  EXPECT_NEAR(sd, 2 * std::sqrt(0.25 / 100), 0.01);
}

TEST(Resample, VanishesForHugeCounts) {
  std::mt19937_64 gen(1);
  const DensityOperator rho = embed_two_qubits(oracle::random_density(4, 2, gen));
  CountsTable t = exact_settings(rho, {0, 1});
  for (auto& c : t.counts)
    for (auto& v : c) v = std::round(v * 1e8);
  const Estimator est = [](const CountsTable& c) {
    std::vector<double> out;
    for (const auto& [w, v] : pauli_estimates(c)) out.push_back(v);
    return out;
  };
  for (double sd : resample_errors(t, est)) EXPECT_LT(sd, 1e-3);
}

TEST(Resample, IsDeterministicInTheSeed) {
  CountsTable t{{0}, {"X", "Y", "Z"}, {{30, 70}, {55, 45}, {90, 10}}};
  const Estimator est = [](const CountsTable& c) {
    std::vector<double> out;
    for (const auto& [w, v] : pauli_estimates(c)) out.push_back(v);
    return out;
  };
  EXPECT_EQ(resample_errors(t, est, 100, 9), resample_errors(t, est, 100, 9));
  EXPECT_NE(resample_errors(t, est, 100, 9), resample_errors(t, est, 100, 10));
}

TEST(Resample, RejectsEmptySetting) {
  CountsTable t{{0}, {"Z"}, {{0, 0}}};
  const Estimator z = [](const CountsTable& c) { return std::vector<double>{pauli_estimates(c).at("Z")}; };
  EXPECT_THROW(resample_errors(t, z), ContractViolation);
}

TEST(Fidelity, BasicValues) {
  M a = M::Zero(2, 2);
  a(0, 0) = 1.0;
  M b = M::Zero(2, 2);
  b(1, 1) = 1.0;
  EXPECT_NEAR(fidelity(a, a), 1.0, 1e-12);
  EXPECT_NEAR(fidelity(a, b), 0.0, 1e-12);
  std::mt19937_64 gen(2);
  const M r = oracle::random_density(4, 3, gen);
  EXPECT_NEAR(fidelity(r, r), 1.0, 1e-9);
}

TEST(Fidelity, RejectsNonPsdUnlessClipped) {
  M bad = M::Zero(2, 2);
  bad(0, 0) = 1.2;
  bad(1, 1) = -0.2;
  M a = M::Zero(2, 2);
  a(0, 0) = 1.0;
  EXPECT_THROW(fidelity(bad, a), ContractViolation);
  EXPECT_NO_THROW(fidelity(bad, a, true));
}

TEST(CodeSpace, ExamplesAndBounds) {
  const CodeDefinition four = four_qubit_code(4);
  EXPECT_NEAR(code_space_population(DensityOperator(Layout(4, 2), M::Identity(16, 16) / 16.0), four), 1.0 / 8,
              1e-12);
  const auto rho0 = state_tomography_exact(DensityOperator::from_pure(encode(0.0)), {0, 1, 2, 3});
  EXPECT_NEAR(code_space_population(rho0, four), 1.0, 1e-10);
  std::mt19937_64 gen(4);
  for (int k = 0; k < 100; ++k) {
    const DensityOperator r(Layout(4, 2), oracle::random_density(16, 1 + k % 5, gen));
    const double p = code_space_population(r, four);
    EXPECT_GE(p, -1e-12);
    EXPECT_LE(p, 1 + 1e-12);
    bool all_plus = true;
    for (const auto& g : four.stabilizers) all_plus = all_plus && std::abs(expectation(r, g.op) - 1) < 1e-9;
    EXPECT_EQ(all_plus, std::abs(p - 1) < 1e-9);
  }
}

TEST(CodeSpace, RestrictedCodeKeepsOperators) {
  const CodeDefinition c = restrict_code(three_qubit_code(), {1, 2, 3});
  EXPECT_TRUE(c.stabilizers[0].op.same_operator(PauliString::parse("XXX")));
  EXPECT_TRUE(c.ty.op.same_operator(PauliString::parse("ZIY")));
}

TEST(ProcessTomography, ReproducesBranchChoiMatrices) {
  for (double u : {0.10, 0.30, 0.53, 0.81}) {
    const double phi = u * kPi;
    const auto r0 = process_tomography(phi, 0, {});
    const auto r1 = process_tomography(phi, 1, {});
    EXPECT_LT(max_abs(r0.choi.matrix - ideal_no_loss_choi(phi).matrix), 1e-9);
    EXPECT_LT(max_abs(r1.choi.matrix - ideal_loss_choi(phi).matrix), 1e-9);
    EXPECT_NEAR(r0.choi.trace() + r1.choi.trace(), 1.0, 1e-12);
    EXPECT_NEAR(process_fidelity(r0.choi, ideal_no_loss_choi(phi)), 1.0, 1e-9);
  }
}

TEST(ProcessTomography, CornerEntriesAtPointThreePi) {
  const double c = std::cos(0.15 * kPi);
  const M m = process_tomography(0.3 * kPi, 0, {}).choi.matrix;
  EXPECT_NEAR(m(0, 0).real(), c * c / 2, 1e-9);
  EXPECT_NEAR(m(0, 3).real(), c / 2, 1e-9);
  EXPECT_NEAR(m(3, 3).real(), 0.5, 1e-9);
}

TEST(ProcessTomography, LossChoiHasSingleEntry) {
  const M m = process_tomography(0.53 * kPi, 1, {}).choi.matrix;
  // |out in> = |1 0>, index 2.
  EXPECT_NEAR(m(2, 2).real(), std::pow(std::sin(0.265 * kPi), 2) / 2, 1e-9);
  M rest = m;
  rest(2, 2) = 0.0;
  EXPECT_LT(oracle::max_abs(rest), 1e-9);
}

TEST(ProcessTomography, ZeroAngleIsIdentity) {
  const auto r = process_tomography(0.0, 0, {});
  EXPECT_LT(max_abs(r.choi.matrix - channel_to_choi(Channel::identity(2)).matrix), 1e-12);
  EXPECT_THROW(process_tomography(0.0, 1, {}), UndefinedExpectation);
}

TEST(ProcessTomography, EmptyInputsAreFlagged) {
  const auto r = process_tomography(0.4 * kPi, 1, {});
  EXPECT_FALSE(r.empty_input[0]);
  EXPECT_TRUE(r.empty_input[1]);
}

TEST(ProcessTomography, SampledChoiConverges) {
  ProcessOptions opt;
  opt.shots = 20000;
  opt.seed = 12;
  const auto r = process_tomography(0.3 * kPi, 0, opt);
  EXPECT_LT(max_abs(r.choi.matrix - ideal_no_loss_choi(0.3 * kPi).matrix), 0.03);
  EXPECT_GT(process_fidelity(r.choi, ideal_no_loss_choi(0.3 * kPi)), 0.97);
}

TEST(Report, IdealLogicalValues) {
  const auto rows = table_report(default_preps(), default_phis(), {});
  ASSERT_EQ(rows.size(), 21u);
  for (const auto& r : rows) {
    if (!r.find("TZ")) continue;
    if (r.state == "0_L" || r.state == "1_L") {
      EXPECT_NEAR(r.find("TX")->value, 0.0, 1e-10);
      EXPECT_NEAR(r.find("TZ")->value, r.state == "0_L" ? 1.0 : -1.0, 1e-10);
    }
    EXPECT_NEAR(r.find("S1Z")->value, 1.0, 1e-10);
    if (r.section != "no-loss") EXPECT_NEAR(r.find("fidelity")->value, 1.0, 1e-10);
  }
  for (const auto& r : rows) {
    if (r.state == "+i_L" && r.section == "no-loss" && std::abs(r.phi - 0.1 * kPi) < 1e-12) {
      EXPECT_NEAR(r.find("S1X")->value, 4 * std::cos(0.05 * kPi) / (3 + std::cos(0.1 * kPi)), 1e-10);
    }
  }
}

TEST(Report, NoisyLossCodeSpaceIncreases) {
  ReportOptions opt;
  opt.noise = NoiseModel::depolarizing(0.033);
  std::vector<double> pcs;
  for (const auto& r : table_report({{"1_L", kPi}}, default_phis(), opt)) {
    if (r.section == "loss") pcs.push_back(r.find("P_CS")->value);
  }
  ASSERT_EQ(pcs.size(), 3u);
  EXPECT_LT(pcs[0], pcs[1]);
  EXPECT_LT(pcs[1], pcs[2]);
}

TEST(Report, CsvHasTableColumns) {
  const std::string csv = report_csv(table_report({{"0_L", 0.0}}, {0.5 * kPi}, {}));
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "state,section,phi_pi,probability,shots,P_CS,P_CS_std,S1X,S1X_std,S1Z,S1Z_std,S2Z,S2Z_std,TX,TX_std,TY,"
            "TY_std,TZ,TZ_std,fidelity,fidelity_std");
  EXPECT_NE(csv.find("0_L,loss,0.5,"), std::string::npos);
}

TEST(Report, TomographyEngineAgreesWithinErrors) {
  ReportOptions opt;
  opt.engine = ReportEngine::kTomography;
  opt.seed = 77;
  opt.iterations = 30;
  const auto rows = table_report({{"0_L", 0.0}}, {0.5 * kPi}, opt);
  const auto exact = table_report({{"0_L", 0.0}}, {0.5 * kPi}, {});
  ASSERT_EQ(rows.size(), exact.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (const auto& v : rows[k].values) {
      const double truth = exact[k].find(v.name)->value;
      EXPECT_LE(std::abs(v.value - truth), std::max(6 * v.std_dev, 0.05)) << rows[k].section << " " << v.name;
    }
  }
}

}  // namespace
