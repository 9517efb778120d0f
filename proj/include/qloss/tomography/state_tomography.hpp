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
#include "qloss/protocol/code.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace qloss {

/// Measurement basis per tomographed qubit, e.g. "XZY", plus shots.
struct TomographySetting {
  std::string bases;
  int shots = 0;
};

/// All 3^n basis strings over {X, Y, Z}, first qubit varying slowest.
inline std::vector<std::string> tomography_bases(int n) {
  if (n < 1) throw DimensionError("tomography needs at least one qubit");
  std::vector<std::string> out = {""};
  for (int k = 0; k < n; ++k) {
    std::vector<std::string> next;
    for (const auto& s : out)
      for (char c : {'X', 'Y', 'Z'}) next.push_back(s + c);
    out = std::move(next);
  }
  return out;
}

/// Outcome counts per setting. Outcome index bit (n - 1 - k) is the result
/// of qubit k: 0 for bright (+1), 1 for dark (-1). Counts may be fractional
/// (exact probabilities).
struct CountsTable {
  std::vector<int> qubits;
  std::vector<std::string> settings;
  std::vector<std::vector<double>> counts;

  int qubit_count() const { return static_cast<int>(qubits.size()); }
};

/// Local rotation mapping the basis to Z before readout: R^Y(-pi/2) for X,
/// R^X(pi/2) for Y.
inline Matrix basis_rotation(char basis, int dims) {
  switch (basis) {
    case 'X': return gates::single_rotation('Y', -kPi / 2, dims);
    case 'Y': return gates::single_rotation('X', kPi / 2, dims);
    case 'Z': return Matrix::Identity(dims, dims);
    default: throw ContractViolation(std::string("unknown basis ") + basis);
  }
}

/// Bright/dark outcome distribution of one setting.
inline std::vector<double> setting_probabilities(const DensityOperator& rho, const std::vector<int>& qubits,
                                                 const std::string& bases) {
  if (bases.size() != qubits.size()) throw DimensionError("one basis per tomographed qubit");
  DensityOperator r = rho;
  for (std::size_t k = 0; k < qubits.size(); ++k) {
    if (bases[k] == 'Z') continue;
    const int site[] = {qubits[k]};
    r.apply(basis_rotation(bases[k], rho.dims()), site);
  }
  const Layout& layout = rho.layout();
  const std::size_t n = qubits.size();
  std::vector<double> probs(std::size_t{1} << n, 0.0);
  const double tr = r.trace();
  for (std::size_t i = 0; i < layout.size(); ++i) {
    std::size_t outcome = 0;
    for (std::size_t k = 0; k < n; ++k) {
      outcome = (outcome << 1) | (is_bright_index(layout.digit(i, qubits[k])) ? 0u : 1u);
    }
    probs[outcome] += r.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real() / tr;
  }
  return probs;
}

/// Multinomial counts by sequential binomial draws.
inline std::vector<double> draw_multinomial(const std::vector<double>& probs, std::int64_t shots, Rng& rng) {
  std::vector<double> counts(probs.size(), 0.0);
  std::int64_t left = shots;
  double mass = 0.0;
  for (double p : probs) mass += std::max(p, 0.0);
  for (std::size_t k = 0; k < probs.size() && left > 0; ++k) {
    const double p = std::max(probs[k], 0.0);
    if (k + 1 == probs.size() || mass <= 0.0) {
      counts[k] = static_cast<double>(left);
      break;
    }
    const double q = std::min(1.0, p / mass);
    std::binomial_distribution<std::int64_t> dist(left, q);
    const std::int64_t c = dist(rng);
    counts[k] = static_cast<double>(c);
    left -= c;
    mass -= p;
  }
  return counts;
}

/// Exact outcome probabilities for every setting.
inline CountsTable exact_settings(const DensityOperator& rho, const std::vector<int>& qubits) {
  CountsTable t{qubits, tomography_bases(static_cast<int>(qubits.size())), {}};
  for (const auto& b : t.settings) t.counts.push_back(setting_probabilities(rho, qubits, b));
  return t;
}

/// Sampled counts; setting s draws from derive_seed(seed, {s}).
inline CountsTable measure_settings(const DensityOperator& rho, const std::vector<int>& qubits, int shots_per_setting,
                                    std::uint64_t seed) {
  if (shots_per_setting < 1) throw ContractViolation("tomography needs at least one shot per setting");
  CountsTable t{qubits, tomography_bases(static_cast<int>(qubits.size())), {}};
  for (std::size_t s = 0; s < t.settings.size(); ++s) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(s)}));
    t.counts.push_back(draw_multinomial(setting_probabilities(rho, qubits, t.settings[s]), shots_per_setting, rng));
  }
  return t;
}

/// Pauli-word expectations averaged over every compatible setting. Words are
/// strings over {I, X, Y, Z}, one letter per tomographed qubit.
inline std::map<std::string, double> pauli_estimates(const CountsTable& t) {
  const int n = t.qubit_count();
  std::map<std::string, double> sum;
  std::map<std::string, int> hits;
  for (std::size_t s = 0; s < t.settings.size(); ++s) {
    const auto& counts = t.counts[s];
    double total = 0.0;
    for (double c : counts) total += c;
    if (total <= 0.0) throw ContractViolation("setting " + t.settings[s] + " has no counts");
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      std::string word(static_cast<std::size_t>(n), 'I');
      for (int k = 0; k < n; ++k) {
        if (mask & (1u << (n - 1 - k))) word[static_cast<std::size_t>(k)] = t.settings[s][static_cast<std::size_t>(k)];
      }
      double e = 0.0;
      for (std::size_t o = 0; o < counts.size(); ++o) {
        const int parity = __builtin_popcount(static_cast<unsigned>(o) & mask) & 1;
        e += (parity ? -1.0 : 1.0) * counts[o];
      }
      sum[word] += e / total;
      hits[word] += 1;
    }
  }
  for (auto& [w, v] : sum) v /= hits[w];
  return sum;
}

namespace detail {

inline Matrix pauli_word_matrix(const std::string& word) {
  Matrix m = Matrix::Identity(1, 1);
  for (char c : word) m = kron(m, embedded_letter(c, 2));
  return m;
}

}  // namespace detail

/// Linear inversion rho = 2^-n sum_w <w> w on the tomographed qubits (dims 2).
inline DensityOperator linear_inversion(const CountsTable& t) {
  const int n = t.qubit_count();
  const auto d = static_cast<Eigen::Index>(1) << n;
  Matrix rho = Matrix::Zero(d, d);
  for (const auto& [word, value] : pauli_estimates(t)) rho += value * detail::pauli_word_matrix(word);
  return DensityOperator(Layout(n, 2), rho / static_cast<double>(d));
}

/// Sampled linear-inversion estimate of `qubits` of `source`.
inline DensityOperator state_tomography(const DensityOperator& source, const std::vector<int>& qubits,
                                        int shots_per_setting, std::uint64_t seed) {
  return linear_inversion(measure_settings(source, qubits, shots_per_setting, seed));
}

/// Exact-probability (infinite shot) estimate.
inline DensityOperator state_tomography_exact(const DensityOperator& source, const std::vector<int>& qubits) {
  return linear_inversion(exact_settings(source, qubits));
}

using Estimator = std::function<std::vector<double>(const CountsTable&)>;

/// Standard deviation (N - 1 normalisation) of each estimator output over
/// `iterations` multinomial resamples of every setting's counts. Iteration i,
/// setting s draws from derive_seed(seed, {i, s}).
inline std::vector<double> resample_errors(const CountsTable& t, const Estimator& estimator, int iterations = 100,
                                           std::uint64_t seed = 0) {
  if (iterations < 2) throw ContractViolation("resampling needs at least two iterations");
  std::vector<std::vector<double>> probs;
  std::vector<std::int64_t> totals;
  for (std::size_t s = 0; s < t.counts.size(); ++s) {
    double total = 0.0;
    for (double c : t.counts[s]) {
      if (c < 0.0) throw ContractViolation("negative count");
      total += c;
    }
    if (total <= 0.0) throw ContractViolation("setting " + t.settings[s] + " has no counts");
    std::vector<double> p;
    for (double c : t.counts[s]) p.push_back(c / total);
    probs.push_back(std::move(p));
    totals.push_back(static_cast<std::int64_t>(std::llround(total)));
  }
  std::vector<std::vector<double>> samples;
  for (int it = 0; it < iterations; ++it) {
    CountsTable r{t.qubits, t.settings, {}};
    for (std::size_t s = 0; s < probs.size(); ++s) {
      Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(it), static_cast<std::uint64_t>(s)}));
      r.counts.push_back(draw_multinomial(probs[s], totals[s], rng));
    }
    samples.push_back(estimator(r));
  }
  const std::size_t m = samples.front().size();
  std::vector<double> stds(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    double mean = 0.0;
    for (const auto& s : samples) mean += s[k];
    mean /= iterations;
    double var = 0.0;
    for (const auto& s : samples) var += (s[k] - mean) * (s[k] - mean);
    stds[k] = std::sqrt(var / (iterations - 1));
  }
  return stds;
}

namespace detail {

inline Matrix psd_sqrt(const Matrix& m, bool clip) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
  Eigen::VectorXd ev = es.eigenvalues();
  if (ev.minCoeff() < -tol::kPsd && !clip) throw ContractViolation("fidelity input is not PSD");
  ev = ev.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 of trace-normalised
/// inputs. With `clip`, negative eigenvalues of finite-shot estimates are set
/// to zero first.
inline double fidelity(const Matrix& rho, const Matrix& sigma, bool clip = false) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) throw DimensionError("fidelity: shapes differ");
  const double tr = rho.trace().real();
  const double ts = sigma.trace().real();
  if (tr <= tol::kTrace || ts <= tol::kTrace) throw UndefinedExpectation("fidelity of a zero-trace operator");
  const Matrix sr = detail::psd_sqrt(rho / tr, clip);
  const Matrix inner = sr * (sigma / ts) * sr;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (inner + inner.adjoint()), Eigen::EigenvaluesOnly);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) acc += std::sqrt(std::max(es.eigenvalues()(k), 0.0));
  return acc * acc;
}

inline double fidelity(const DensityOperator& rho, const DensityOperator& sigma, bool clip = false) {
  if (!(rho.layout() == sigma.layout())) throw DimensionError("fidelity: layouts differ");
  return fidelity(rho.matrix(), sigma.matrix(), clip);
}

/// Code on the tomographed qubits: ion qubits[k] becomes site k.
inline CodeDefinition restrict_code(const CodeDefinition& code, const std::vector<int>& qubits) {
  const int n = static_cast<int>(qubits.size());
  auto remap = [&](const NamedPauli& p) {
    std::vector<PauliString::Term> terms;
    for (const auto& [site, letter] : p.op.terms()) {
      int k = -1;
      for (int j = 0; j < n; ++j)
        if (qubits[static_cast<std::size_t>(j)] == site) k = j;
      if (k < 0) throw DimensionError("code acts outside the tomographed qubits");
      terms.push_back({k, letter});
    }
    return NamedPauli{p.name, PauliString::from_sites(n, terms, p.op.phase())};
  };
  CodeDefinition out;
  out.name = code.name;
  for (int j = 0; j < n; ++j) out.qubits.push_back(j);
  for (const auto& g : code.stabilizers) out.stabilizers.push_back(remap(g));
  out.tx = remap(code.tx);
  out.ty = remap(code.ty);
  out.tz = remap(code.tz);
  return out;
}

}  // namespace qloss
