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

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace qloss {

/// Choi matrix (1/d_in) sum_ij E(|i><j|) (x) |i><j| in the |out, in> basis,
/// so the identity channel has trace 1.
struct ChoiMatrix {
  Matrix matrix;
  int input_dim = 2;
  int output_dim = 2;

  /// Basis labels "|out in>", e.g. {"00", "01", "10", "11"} for qubits.
  std::vector<std::string> basis() const {
    std::vector<std::string> labels;
    for (int o = 0; o < output_dim; ++o)
      for (int i = 0; i < input_dim; ++i) labels.push_back(std::to_string(o) + std::to_string(i));
    return labels;
  }

  double trace() const { return matrix.trace().real(); }

  bool is_psd(double tolerance = tol::kPsd) const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (matrix + matrix.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() > -tolerance;
  }
};

/// Choi matrix from the outputs E(|i><j|) on every input matrix unit.
inline ChoiMatrix choi_from_unit_outputs(const std::vector<std::vector<Matrix>>& outputs) {
  const int d_in = static_cast<int>(outputs.size());
  if (d_in == 0) throw DimensionError("empty unit-output table");
  const int d_out = static_cast<int>(outputs[0][0].rows());
  Matrix c = Matrix::Zero(d_out * d_in, d_out * d_in);
  for (int i = 0; i < d_in; ++i) {
    if (static_cast<int>(outputs[i].size()) != d_in) throw DimensionError("unit-output table is not square");
    for (int j = 0; j < d_in; ++j) {
      const Matrix& e = outputs[i][j];
      if (e.rows() != d_out || e.cols() != d_out) throw DimensionError("unit outputs differ in shape");
      for (int a = 0; a < d_out; ++a)
        for (int b = 0; b < d_out; ++b) c(a * d_in + i, b * d_in + j) += e(a, b);
    }
  }
  return {c / static_cast<double>(d_in), d_in, d_out};
}

inline ChoiMatrix channel_to_choi(const Channel& ch) {
  const int d = ch.input_dim();
  std::vector<std::vector<Matrix>> outputs(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      Matrix unit = Matrix::Zero(d, d);
      unit(i, j) = 1.0;
      outputs[static_cast<std::size_t>(i)].push_back(ch(unit));
    }
  }
  return choi_from_unit_outputs(outputs);
}

/// Kraus operators from the eigendecomposition of a PSD Choi matrix.
inline Channel choi_to_channel(const ChoiMatrix& choi, double cutoff = 1e-14) {
  const int d_in = choi.input_dim;
  const int d_out = choi.output_dim;
  if (choi.matrix.rows() != d_in * d_out) throw DimensionError("Choi matrix has wrong side");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (choi.matrix + choi.matrix.adjoint()));
  if (es.eigenvalues().minCoeff() < -tol::kPsd) throw ContractViolation("Choi matrix is not PSD");
  std::vector<Matrix> ks;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double lambda = es.eigenvalues()(k);
    if (lambda <= cutoff) continue;
    Matrix kraus(d_out, d_in);
    const double scale = std::sqrt(lambda * d_in);
    for (int o = 0; o < d_out; ++o)
      for (int i = 0; i < d_in; ++i) kraus(o, i) = scale * es.eigenvectors()(o * d_in + i, k);
    ks.push_back(std::move(kraus));
  }
  if (ks.empty()) ks.push_back(Matrix::Zero(d_out, d_in));
  return Channel(std::move(ks));
}

/// Tr(AB) / (Tr A Tr B).
inline double process_fidelity(const ChoiMatrix& a, const ChoiMatrix& b) {
  if (a.matrix.rows() != b.matrix.rows()) throw DimensionError("process_fidelity: shapes differ");
  const double ta = a.trace();
  const double tb = b.trace();
  if (std::abs(ta) <= tol::kTrace || std::abs(tb) <= tol::kTrace) {
    throw UndefinedExpectation("process fidelity of a zero-trace Choi matrix");
  }
  return (a.matrix * b.matrix).trace().real() / (ta * tb);
}

/// Ideal branch Choi matrices of the detection unit on the code qubit.
inline ChoiMatrix ideal_no_loss_choi(double phi) {
  return channel_to_choi(restrict_to_qubit(branch_maps(phi).first));
}

inline ChoiMatrix ideal_loss_choi(double phi) {
  return channel_to_choi(restrict_to_qubit(branch_maps(phi).second));
}

}  // namespace qloss
