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

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qloss {

/// Tensor-product layout of `ion_count` ions with `dims` levels each.
/// Ion 0 is the most significant tensor factor.
class Layout {
 public:
  Layout(int ion_count, int dims) : ion_count_(ion_count), dims_(dims) {
    if (ion_count <= 0) throw DimensionError("ion_count must be positive");
    if (dims < 2 || dims > 5) throw DimensionError("dims must be in [2, 5]");
    size_ = 1;
    for (int i = 0; i < ion_count; ++i) size_ *= static_cast<std::size_t>(dims);
  }

  int ion_count() const { return ion_count_; }
  int dims() const { return dims_; }
  std::size_t size() const { return size_; }

  std::size_t stride(int ion) const {
    std::size_t s = 1;
    for (int i = ion + 1; i < ion_count_; ++i) s *= static_cast<std::size_t>(dims_);
    return s;
  }

  int digit(std::size_t index, int ion) const {
    return static_cast<int>((index / stride(ion)) % static_cast<std::size_t>(dims_));
  }

  std::size_t index_of(std::span<const Level> kets) const {
    if (static_cast<int>(kets.size()) != ion_count_) {
      throw DimensionError("ket has wrong number of ions");
    }
    std::size_t idx = 0;
    for (int i = 0; i < ion_count_; ++i) {
      if (!representable(kets[i], dims_)) {
        throw DimensionError("level " + to_string(kets[i]) + " needs more than " +
                             std::to_string(dims_) + " levels per ion");
      }
      idx = idx * static_cast<std::size_t>(dims_) + static_cast<std::size_t>(level_index(kets[i]));
    }
    return idx;
  }

  void check_support(std::span<const int> support) const {
    for (std::size_t a = 0; a < support.size(); ++a) {
      if (support[a] < 0 || support[a] >= ion_count_) {
        throw DimensionError("ion index " + std::to_string(support[a]) + " out of range");
      }
      for (std::size_t b = a + 1; b < support.size(); ++b) {
        if (support[a] == support[b]) throw DimensionError("duplicate ion in support");
      }
    }
  }

  /// Offsets of every local basis state of `support` (support order = local
  /// tensor order, first entry most significant).
  std::vector<std::size_t> local_offsets(std::span<const int> support) const {
    std::vector<std::size_t> offsets{0};
    for (int ion : support) {
      std::vector<std::size_t> next;
      next.reserve(offsets.size() * static_cast<std::size_t>(dims_));
      for (std::size_t off : offsets) {
        for (int d = 0; d < dims_; ++d) next.push_back(off + static_cast<std::size_t>(d) * stride(ion));
      }
      offsets = std::move(next);
    }
    return offsets;
  }

  std::vector<int> complement(std::span<const int> support) const {
    std::vector<int> rest;
    for (int i = 0; i < ion_count_; ++i) {
      if (std::find(support.begin(), support.end(), i) == support.end()) rest.push_back(i);
    }
    return rest;
  }

  /// Every full index whose digits on `support` are zero.
  std::vector<std::size_t> base_indices(std::span<const int> support) const {
    return local_offsets(complement(support));
  }

  bool operator==(const Layout&) const = default;

 private:
  int ion_count_;
  int dims_;
  std::size_t size_ = 1;
};

namespace detail {

// Multiplies `u` into the row index of `m` restricted to `support`.
template <class Mat>
void apply_rows(Mat& m, const Matrix& u, const Layout& layout, std::span<const int> support) {
  const auto offsets = layout.local_offsets(support);
  const auto bases = layout.base_indices(support);
  const auto d = static_cast<Eigen::Index>(offsets.size());
  Matrix block(d, m.cols());
  Matrix out(d, m.cols());
  for (std::size_t b : bases) {
    for (Eigen::Index k = 0; k < d; ++k) block.row(k) = m.row(static_cast<Eigen::Index>(b + offsets[k]));
    out.noalias() = u.lazyProduct(block);
    for (Eigen::Index k = 0; k < d; ++k) m.row(static_cast<Eigen::Index>(b + offsets[k])) = out.row(k);
  }
}

// Multiplies u^dagger into the column index of `m` from the right.
inline void apply_cols_adjoint(Matrix& m, const Matrix& u, const Layout& layout, std::span<const int> support) {
  const auto offsets = layout.local_offsets(support);
  const auto bases = layout.base_indices(support);
  const auto d = static_cast<Eigen::Index>(offsets.size());
  const Matrix ua = u.adjoint();
  Matrix block(m.rows(), d);
  Matrix out(m.rows(), d);
  for (std::size_t b : bases) {
    for (Eigen::Index k = 0; k < d; ++k) block.col(k) = m.col(static_cast<Eigen::Index>(b + offsets[k]));
    out.noalias() = block.lazyProduct(ua);
    for (Eigen::Index k = 0; k < d; ++k) m.col(static_cast<Eigen::Index>(b + offsets[k])) = out.col(k);
  }
}

inline void check_local_shape(const Layout& layout, const Matrix& u, std::span<const int> support) {
  layout.check_support(support);
  std::size_t expected = 1;
  for (std::size_t i = 0; i < support.size(); ++i) expected *= static_cast<std::size_t>(layout.dims());
  if (u.rows() != u.cols() || static_cast<std::size_t>(u.rows()) != expected) {
    throw DimensionError("local matrix is " + std::to_string(u.rows()) + "x" +
                         std::to_string(u.cols()) + ", support needs side " +
                         std::to_string(expected));
  }
}

inline void check_partition(const Layout& layout, const std::vector<LevelSet>& partition) {
  std::vector<int> seen(static_cast<std::size_t>(layout.dims()), 0);
  for (const auto& part : partition) {
    for (Level l : part) {
      if (!representable(l, layout.dims())) {
        throw DimensionError("partition mentions level " + to_string(l) + " not present in ion");
      }
      ++seen[static_cast<std::size_t>(level_index(l))];
    }
  }
  for (int c : seen) {
    if (c != 1) throw ContractViolation("partition must cover every level exactly once");
  }
}

inline std::vector<int> outcome_of_level(const Layout& layout, const std::vector<LevelSet>& partition) {
  std::vector<int> out(static_cast<std::size_t>(layout.dims()), -1);
  for (std::size_t k = 0; k < partition.size(); ++k) {
    for (Level l : partition[k]) out[static_cast<std::size_t>(level_index(l))] = static_cast<int>(k);
  }
  return out;
}

}  // namespace detail

/// Complex amplitude vector over a Layout.
class PureState {
 public:
  PureState(Layout layout, Vector amplitudes) : layout_(layout), amps_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amps_.size()) != layout_.size()) {
      throw DimensionError("amplitude vector does not match layout");
    }
  }

  const Layout& layout() const { return layout_; }
  int ion_count() const { return layout_.ion_count(); }
  int dims() const { return layout_.dims(); }
  const Vector& amplitudes() const { return amps_; }
  Vector& amplitudes() { return amps_; }

  double norm() const { return amps_.norm(); }

  Complex amplitude(std::span<const Level> kets) const {
    return amps_(static_cast<Eigen::Index>(layout_.index_of(kets)));
  }

  /// Applies a unitary acting on `support`. Rejects non-unitary matrices.
  void apply(const Matrix& u, std::span<const int> support) {
    detail::check_local_shape(layout_, u, support);
    if (!is_unitary(u)) throw ContractViolation("apply: matrix is not unitary");
    detail::apply_rows(amps_, u, layout_, support);
  }

  /// Applies an arbitrary local operator (no unitarity check).
  void apply_operator(const Matrix& k, std::span<const int> support) {
    detail::check_local_shape(layout_, k, support);
    detail::apply_rows(amps_, k, layout_, support);
  }

  void normalize() {
    const double n = norm();
    if (n <= 0.0) throw UndefinedExpectation("cannot normalise the zero vector");
    amps_ /= n;
  }

 private:
  Layout layout_;
  Vector amps_;
};

/// Product state with amplitude 1 on the given ket.
inline PureState make_state(int ion_count, int dims, std::span<const Level> levels) {
  if (dims != 3 && dims != 5) throw DimensionError("make_state: dims must be 3 or 5");
  Layout layout(ion_count, dims);
  Vector amps = Vector::Zero(static_cast<Eigen::Index>(layout.size()));
  amps(static_cast<Eigen::Index>(layout.index_of(levels))) = 1.0;
  return PureState(layout, std::move(amps));
}

inline PureState make_state(int ion_count, int dims, std::initializer_list<Level> levels) {
  return make_state(ion_count, dims, std::span<const Level>(levels.begin(), levels.size()));
}

inline PureState apply_unitary(PureState state, const Matrix& u, std::span<const int> support) {
  state.apply(u, support);
  return state;
}

/// |<a|b>|^2 for normalised states. Insensitive to global phase.
inline double fidelity(const PureState& a, const PureState& b) {
  if (!(a.layout() == b.layout())) throw DimensionError("fidelity: layouts differ");
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

/// Hermitian operator over a Layout; may be subnormalised (post-selected).
class DensityOperator {
 public:
  DensityOperator(Layout layout, Matrix matrix) : layout_(layout), m_(std::move(matrix)) {
    if (static_cast<std::size_t>(m_.rows()) != layout_.size() || m_.rows() != m_.cols()) {
      throw DimensionError("density matrix does not match layout");
    }
  }

  static DensityOperator from_pure(const PureState& psi) {
    return DensityOperator(psi.layout(), psi.amplitudes() * psi.amplitudes().adjoint());
  }

  static DensityOperator zero(Layout layout) {
    const auto n = static_cast<Eigen::Index>(layout.size());
    return DensityOperator(layout, Matrix::Zero(n, n));
  }

  const Layout& layout() const { return layout_; }
  int ion_count() const { return layout_.ion_count(); }
  int dims() const { return layout_.dims(); }
  const Matrix& matrix() const { return m_; }
  Matrix& matrix() { return m_; }

  double trace() const { return m_.trace().real(); }

  /// rho -> U rho U^dagger; rejects non-unitary matrices.
  void apply(const Matrix& u, std::span<const int> support) {
    detail::check_local_shape(layout_, u, support);
    if (!is_unitary(u)) throw ContractViolation("apply: matrix is not unitary");
    conjugate(u, support);
  }

  /// rho -> K rho K^dagger for any local K.
  void apply_operator(const Matrix& k, std::span<const int> support) {
    detail::check_local_shape(layout_, k, support);
    conjugate(k, support);
  }

  void normalize() {
    const double t = trace();
    if (t <= 0.0) throw UndefinedExpectation("cannot normalise a zero-trace operator");
    m_ /= t;
  }

  DensityOperator normalized() const {
    DensityOperator copy = *this;
    copy.normalize();
    return copy;
  }

  DensityOperator& operator+=(const DensityOperator& other) {
    if (!(layout_ == other.layout_)) throw DimensionError("adding operators with different layouts");
    m_ += other.m_;
    return *this;
  }

  DensityOperator& operator*=(double s) {
    m_ *= s;
    return *this;
  }

  bool is_hermitian(double tolerance = tol::kAlgebraic) const {
    return max_abs(m_ - m_.adjoint()) < tolerance;
  }

  double min_eigenvalue() const {
    const Matrix h = 0.5 * (m_ + m_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  /// Hermitian, PSD within -tol::kPsd, trace in (0, 1].
  bool is_valid() const {
    const double t = trace();
    return is_hermitian() && min_eigenvalue() > -tol::kPsd && t > 0.0 && t < 1.0 + tol::kAlgebraic;
  }

 private:
  void conjugate(const Matrix& k, std::span<const int> support) {
    detail::apply_rows(m_, k, layout_, support);
    detail::apply_cols_adjoint(m_, k, layout_, support);
  }

  Layout layout_;
  Matrix m_;
};

/// Reduced operator on `keep` (in the order given).
inline DensityOperator partial_trace(const DensityOperator& rho, std::span<const int> keep) {
  if (keep.empty()) throw DimensionError("partial_trace: keep set is empty");
  const Layout& full = rho.layout();
  full.check_support(keep);
  const Layout reduced(static_cast<int>(keep.size()), full.dims());
  const auto keep_off = full.local_offsets(keep);
  const auto traced_off = full.base_indices(keep);
  const auto d = static_cast<Eigen::Index>(keep_off.size());
  Matrix out = Matrix::Zero(d, d);
  const Matrix& m = rho.matrix();
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      Complex acc = 0.0;
      for (std::size_t t : traced_off) {
        acc += m(static_cast<Eigen::Index>(keep_off[i] + t), static_cast<Eigen::Index>(keep_off[j] + t));
      }
      out(i, j) = acc;
    }
  }
  return DensityOperator(reduced, std::move(out));
}

inline DensityOperator partial_trace(const DensityOperator& rho, std::initializer_list<int> keep) {
  return partial_trace(rho, std::span<const int>(keep.begin(), keep.size()));
}

/// Born probabilities of each part of `partition` for `ion`.
inline std::vector<double> outcome_probabilities(const PureState& psi, int ion,
                                                 const std::vector<LevelSet>& partition) {
  const Layout& layout = psi.layout();
  layout.check_support(std::span<const int>(&ion, 1));
  detail::check_partition(layout, partition);
  const auto map = detail::outcome_of_level(layout, partition);
  std::vector<double> probs(partition.size(), 0.0);
  for (std::size_t i = 0; i < layout.size(); ++i) {
    probs[static_cast<std::size_t>(map[static_cast<std::size_t>(layout.digit(i, ion))])] +=
        std::norm(psi.amplitudes()(static_cast<Eigen::Index>(i)));
  }
  return probs;
}

inline std::vector<double> outcome_probabilities(const DensityOperator& rho, int ion,
                                                 const std::vector<LevelSet>& partition) {
  const Layout& layout = rho.layout();
  layout.check_support(std::span<const int>(&ion, 1));
  detail::check_partition(layout, partition);
  const auto map = detail::outcome_of_level(layout, partition);
  std::vector<double> probs(partition.size(), 0.0);
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    probs[static_cast<std::size_t>(map[static_cast<std::size_t>(layout.digit(i, ion))])] += rho.matrix()(e, e).real();
  }
  return probs;
}

namespace detail {
inline Matrix level_projector(int dims, const LevelSet& levels) {
  Matrix p = Matrix::Zero(dims, dims);
  for (Level l : levels) p(level_index(l), level_index(l)) = 1.0;
  return p;
}
}  // namespace detail

/// Unnormalised projection of `ion` onto `levels`.
inline DensityOperator project(const DensityOperator& rho, int ion, const LevelSet& levels) {
  DensityOperator out = rho;
  const int support[] = {ion};
  out.apply_operator(detail::level_projector(rho.dims(), levels), support);
  return out;
}

/// Forced outcome: projects onto `levels` and renormalises. Throws when the
/// outcome has zero probability.
inline PureState project(const PureState& psi, int ion, const LevelSet& levels, double* probability = nullptr) {
  PureState out = psi;
  const int support[] = {ion};
  out.apply_operator(detail::level_projector(psi.dims(), levels), support);
  const double p = out.amplitudes().squaredNorm();
  if (p <= tol::kTrace) throw UndefinedExpectation("projection onto a zero-probability outcome");
  out.amplitudes() /= std::sqrt(p);
  if (probability != nullptr) *probability = p;
  return out;
}

struct MeasurementResult {
  int outcome;
  PureState state;
  double probability;  // exact Born probability of `outcome`
};

/// Samples an outcome of `partition` on `ion` and collapses the state.
inline MeasurementResult measure_projective(const PureState& psi, int ion,
                                            const std::vector<LevelSet>& partition, Rng& rng) {
  const auto probs = outcome_probabilities(psi, ion, partition);
  const int k = sample_index(rng, probs);
  double p = 0.0;
  PureState post = project(psi, ion, partition[static_cast<std::size_t>(k)], &p);
  return {k, std::move(post), p};
}

}  // namespace qloss
