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

#include "qloss/channels/choi.hpp"
#include "qloss/core/common.hpp"
#include "qloss/core/state.hpp"
#include "qloss/lattice/lattice.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace qloss {

/// Row-major array of rows, each entry an [re, im] pair.
inline nlohmann::ordered_json matrix_to_json(const Matrix& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const nlohmann::ordered_json& j) {
  if (!j.is_array() || j.empty()) throw DimensionError("matrix json must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(row.size()) != cols) throw DimensionError("ragged matrix json");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& z = row[static_cast<std::size_t>(c)];
      m(r, c) = Complex(z.at(0).get<double>(), z.at(1).get<double>());
    }
  }
  return m;
}

inline nlohmann::ordered_json choi_to_json(const ChoiMatrix& c) {
  nlohmann::ordered_json j;
  j["basis_order"] = "|out,in>";
  j["basis"] = c.basis();
  j["input_dim"] = c.input_dim;
  j["output_dim"] = c.output_dim;
  j["matrix"] = matrix_to_json(c.matrix);
  return j;
}

inline ChoiMatrix choi_from_json(const nlohmann::ordered_json& j) {
  ChoiMatrix c;
  c.input_dim = j.at("input_dim").get<int>();
  c.output_dim = j.at("output_dim").get<int>();
  c.matrix = matrix_from_json(j.at("matrix"));
  if (c.matrix.rows() != c.input_dim * c.output_dim) throw DimensionError("Choi json shape mismatch");
  return c;
}

/// Density operator with ion 0 as the most significant digit.
inline nlohmann::ordered_json density_to_json(const DensityOperator& rho) {
  nlohmann::ordered_json j;
  j["basis_order"] = "ion 0 most significant";
  j["ions"] = rho.layout().ion_count();
  j["dims"] = rho.dims();
  j["matrix"] = matrix_to_json(rho.matrix());
  return j;
}

/// Generator supports as edge-index lists.
inline nlohmann::ordered_json generators_to_json(const LossLattice& lat) {
  nlohmann::ordered_json j;
  j["L"] = lat.L;
  j["boundary"] = to_string(lat.boundary);
  j["edges"] = lat.edge_count();
  std::vector<int> lost;
  for (int i = 0; i < lat.edge_count(); ++i)
    if (lat.lost[static_cast<std::size_t>(i)]) lost.push_back(i);
  j["lost"] = lost;
  j["x_generators"] = lat.x_generators;
  j["z_generators"] = lat.z_generators;
  return j;
}

}  // namespace qloss
