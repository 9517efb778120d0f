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
#include "qloss/core/state.hpp"

#include <algorithm>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qloss {

/// Pauli word with a phase i^k. Stored sparsely as (site, letter) pairs
/// sorted by site, so it serves both few-ion registers and large lattices.
///
/// Embedded into a register, a letter acts as the Pauli on {|0>,|1>} and
/// annihilates every other level; sites without a letter act as the full
/// identity.
class PauliString {
 public:
  using Term = std::pair<int, char>;

  PauliString() = default;
  explicit PauliString(int width) : width_(width) {
    if (width < 0) throw DimensionError("negative Pauli width");
  }

  /// Parses "XXZI", "+ZZ", "-XIX", "+iY", "-iZZ". Width is the letter count.
  static PauliString parse(std::string_view text) {
    int phase = 0;
    std::size_t pos = 0;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      if (text[pos] == '-') phase = 2;
      ++pos;
    }
    if (pos < text.size() && text[pos] == 'i') {
      phase = (phase + 1) % 4;
      ++pos;
    }
    PauliString p(static_cast<int>(text.size() - pos));
    p.phase_ = phase;
    for (int site = 0; pos < text.size(); ++pos, ++site) {
      const char c = text[pos];
      if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
        throw ContractViolation("bad Pauli letter '" + std::string(1, c) + "'");
      }
      if (c != 'I') p.terms_.emplace_back(site, c);
    }
    return p;
  }

  static PauliString from_sites(int width, std::vector<Term> terms, int phase = 0) {
    PauliString p(width);
    std::sort(terms.begin(), terms.end());
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const auto [site, c] = terms[i];
      if (site < 0 || site >= width) throw DimensionError("Pauli site out of range");
      if (i > 0 && terms[i - 1].first == site) throw ContractViolation("duplicate Pauli site");
      if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') throw ContractViolation("bad Pauli letter");
      if (c != 'I') p.terms_.emplace_back(site, c);
    }
    p.phase_ = ((phase % 4) + 4) % 4;
    return p;
  }

  /// Same letter on every listed site.
  static PauliString uniform(int width, char letter, const std::vector<int>& sites) {
    std::vector<Term> terms;
    terms.reserve(sites.size());
    for (int s : sites) terms.emplace_back(s, letter);
    return from_sites(width, std::move(terms));
  }

  int width() const { return width_; }
  int phase() const { return phase_; }
  Complex coefficient() const {
    static constexpr Complex kPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return kPowers[phase_];
  }
  bool is_hermitian() const { return phase_ % 2 == 0; }
  int sign() const {
    if (!is_hermitian()) throw ContractViolation("Pauli string has an imaginary phase");
    return phase_ == 0 ? 1 : -1;
  }

  const std::vector<Term>& terms() const { return terms_; }
  int weight() const { return static_cast<int>(terms_.size()); }

  std::vector<int> support() const {
    std::vector<int> s;
    s.reserve(terms_.size());
    for (const auto& t : terms_) s.push_back(t.first);
    return s;
  }

  char letter(int site) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), Term{site, '\0'});
    return (it != terms_.end() && it->first == site) ? it->second : 'I';
  }

  PauliString operator-() const {
    PauliString p = *this;
    p.phase_ = (p.phase_ + 2) % 4;
    return p;
  }

  PauliString times_i(int k = 1) const {
    PauliString p = *this;
    p.phase_ = (((p.phase_ + k) % 4) + 4) % 4;
    return p;
  }

  /// Operator product this * other, phase included.
  PauliString operator*(const PauliString& other) const {
    PauliString out(std::max(width_, other.width_));
    int phase = phase_ + other.phase_;
    auto a = terms_.begin();
    auto b = other.terms_.begin();
    while (a != terms_.end() || b != other.terms_.end()) {
      if (b == other.terms_.end() || (a != terms_.end() && a->first < b->first)) {
        out.terms_.push_back(*a++);
      } else if (a == terms_.end() || b->first < a->first) {
        out.terms_.push_back(*b++);
      } else {
        const auto [k, c] = multiply_letters(a->second, b->second);
        phase += k;
        if (c != 'I') out.terms_.emplace_back(a->first, c);
        ++a;
        ++b;
      }
    }
    out.phase_ = phase % 4;
    return out;
  }

  /// Number of sites where both strings carry different non-identity letters.
  int anticommuting_sites(const PauliString& other) const {
    int count = 0;
    auto a = terms_.begin();
    auto b = other.terms_.begin();
    while (a != terms_.end() && b != other.terms_.end()) {
      if (a->first < b->first) {
        ++a;
      } else if (b->first < a->first) {
        ++b;
      } else {
        if (a->second != b->second) ++count;
        ++a;
        ++b;
      }
    }
    return count;
  }

  bool commutes_with(const PauliString& other) const { return anticommuting_sites(other) % 2 == 0; }

  /// Number of shared sites (for X/Z overlap parity on lattices).
  int overlap(const PauliString& other) const {
    int count = 0;
    auto a = terms_.begin();
    auto b = other.terms_.begin();
    while (a != terms_.end() && b != other.terms_.end()) {
      if (a->first < b->first) {
        ++a;
      } else if (b->first < a->first) {
        ++b;
      } else {
        ++count;
        ++a;
        ++b;
      }
    }
    return count;
  }

  /// Dense form such as "+XXZI" or "-iZY".
  std::string to_string() const {
    static constexpr const char* kPrefix[4] = {"+", "+i", "-", "-i"};
    std::string s = kPrefix[phase_];
    std::string letters(static_cast<std::size_t>(width_), 'I');
    for (const auto& [site, c] : terms_) letters[static_cast<std::size_t>(site)] = c;
    return s + letters;
  }

  bool operator==(const PauliString& other) const {
    return phase_ == other.phase_ && width_ == other.width_ && terms_ == other.terms_;
  }

  /// Same letters and phase regardless of declared width.
  bool same_operator(const PauliString& other) const {
    return phase_ == other.phase_ && terms_ == other.terms_;
  }

  static std::pair<int, char> multiply_letters(char a, char b) {
    if (a == 'I') return {0, b};
    if (b == 'I') return {0, a};
    if (a == b) return {0, 'I'};
    // Cyclic XYZ: XY = iZ, YZ = iX, ZX = iY; reversed order gives -i.
    const auto cyc = [](char c) { return c == 'X' ? 0 : (c == 'Y' ? 1 : 2); };
    const int ia = cyc(a);
    const int ib = cyc(b);
    const char third = "XYZ"[3 - ia - ib];
    return {((ib - ia + 3) % 3) == 1 ? 1 : 3, third};
  }

 private:
  int width_ = 0;
  int phase_ = 0;
  std::vector<Term> terms_;
};

/// 2x2 Pauli embedded into a `dims`-level ion: zero outside {|0>,|1>}.
/// The identity letter is the full identity.
inline Matrix embedded_letter(char letter, int dims) {
  Matrix m = Matrix::Zero(dims, dims);
  switch (letter) {
    case 'I': return Matrix::Identity(dims, dims);
    case 'X': m(0, 1) = 1.0; m(1, 0) = 1.0; break;
    case 'Y': m(0, 1) = -kI; m(1, 0) = kI; break;
    case 'Z': m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    default: throw ContractViolation("bad Pauli letter");
  }
  return m;
}

namespace detail {

inline void check_fits(const PauliString& p, const Layout& layout) {
  for (const auto& t : p.terms()) {
    if (t.first >= layout.ion_count()) throw DimensionError("Pauli string acts outside the register");
  }
}

// P|i> = c |j>; returns false when P annihilates |i>.
inline bool pauli_action(const PauliString& p, const Layout& layout, std::size_t i, std::size_t& j, Complex& c) {
  j = i;
  c = p.coefficient();
  for (const auto& [site, letter] : p.terms()) {
    const int d = layout.digit(i, site);
    if (d > 1) return false;
    const std::size_t s = layout.stride(site);
    switch (letter) {
      case 'X':
        j = d == 0 ? j + s : j - s;
        break;
      case 'Y':
        j = d == 0 ? j + s : j - s;
        c *= d == 0 ? kI : -kI;
        break;
      case 'Z':
        if (d == 1) c = -c;
        break;
      default: break;
    }
  }
  return true;
}

}  // namespace detail

/// Dense embedded operator on the full register.
inline Matrix pauli_matrix(const PauliString& p, const Layout& layout) {
  detail::check_fits(p, layout);
  const auto n = static_cast<Eigen::Index>(layout.size());
  Matrix m = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < layout.size(); ++i) {
    std::size_t j;
    Complex c;
    if (detail::pauli_action(p, layout, i, j, c)) m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = c;
  }
  return m;
}

/// Returns P * m (row action of the embedded operator).
inline Matrix apply_pauli_rows(const PauliString& p, const Layout& layout, const Matrix& m) {
  detail::check_fits(p, layout);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> moves;
  std::vector<Complex> coeffs;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    std::size_t j;
    Complex c;
    if (detail::pauli_action(p, layout, i, j, c)) {
      moves.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      coeffs.push_back(c);
    }
  }
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (Eigen::Index col = 0; col < m.cols(); ++col) {
    for (std::size_t k = 0; k < moves.size(); ++k) out(moves[k].second, col) += coeffs[k] * m(moves[k].first, col);
  }
  return out;
}

inline Vector apply_pauli(const PauliString& p, const PureState& psi) {
  return apply_pauli_rows(p, psi.layout(), psi.amplitudes());
}

/// Tr(rho P) / Tr(rho).
inline double expectation(const DensityOperator& rho, const PauliString& p) {
  detail::check_fits(p, rho.layout());
  const double tr = rho.trace();
  if (std::abs(tr) <= tol::kTrace) throw UndefinedExpectation("expectation on a zero-trace operator");
  Complex acc = 0.0;
  const Matrix& m = rho.matrix();
  for (std::size_t i = 0; i < rho.layout().size(); ++i) {
    std::size_t j;
    Complex c;
    if (detail::pauli_action(p, rho.layout(), i, j, c)) {
      acc += m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * c;
    }
  }
  return acc.real() / tr;
}

/// <psi|P|psi> / <psi|psi>.
inline double expectation(const PureState& psi, const PauliString& p) {
  const double n2 = psi.amplitudes().squaredNorm();
  if (n2 <= tol::kTrace) throw UndefinedExpectation("expectation on the zero vector");
  return psi.amplitudes().dot(apply_pauli(p, psi)).real() / n2;
}

}  // namespace qloss
