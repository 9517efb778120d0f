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

#include "qloss/lattice/lattice.hpp"
#include "qloss/lattice/percolation.hpp"
#include "qloss/protocol/code.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <vector>

namespace {

using namespace qloss;

// GF(2) rank by Gaussian elimination over dense bit rows.
int gf2_rank(std::vector<std::vector<char>> rows) {
  int rank = 0;
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  for (std::size_t c = 0; c < cols && rank < static_cast<int>(rows.size()); ++c) {
    auto pivot = std::find_if(rows.begin() + rank, rows.end(), [&](const auto& r) { return r[c] != 0; });
    if (pivot == rows.end()) continue;
    std::iter_swap(rows.begin() + rank, pivot);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (static_cast<int>(r) != rank && rows[r][c]) {
        for (std::size_t k = 0; k < cols; ++k) rows[r][k] ^= rows[static_cast<std::size_t>(rank)][k];
      }
    }
    ++rank;
  }
  return rank;
}

std::vector<char> dense(const Support& s, int n) {
  std::vector<char> row(static_cast<std::size_t>(n), 0);
  for (int e : s) row[static_cast<std::size_t>(e)] ^= 1;
  return row;
}

// Independent geometric model of the planar lattice: node rows 0..L with
// rows 0 and L being the TOP and BOTTOM terminals. Vertical edge (k, c) has
// index c * L + k and joins rows k and k + 1 of column c; horizontal edge
// (r, c) has index L^2 + r * (L - 1) + c and joins (r + 1, c), (r + 1, c + 1).
bool oracle_top_bottom(int L, const std::vector<bool>& lost) {
  std::vector<std::vector<char>> seen(static_cast<std::size_t>(L + 1), std::vector<char>(static_cast<std::size_t>(L), 0));
  std::vector<std::pair<int, int>> stack;
  for (int c = 0; c < L; ++c) stack.emplace_back(0, c);
  const auto vert = [&](int k, int c) { return !lost[static_cast<std::size_t>(c * L + k)]; };
  const auto horiz = [&](int r, int c) { return !lost[static_cast<std::size_t>(L * L + r * (L - 1) + c)]; };
  while (!stack.empty()) {
    auto [row, c] = stack.back();
    stack.pop_back();
    if (row == L) return true;
    if (seen[static_cast<std::size_t>(row)][static_cast<std::size_t>(c)]) continue;
    seen[static_cast<std::size_t>(row)][static_cast<std::size_t>(c)] = 1;
    if (vert(row, c)) stack.emplace_back(row + 1, c);
    if (row > 0 && vert(row - 1, c)) stack.emplace_back(row - 1, c);
    if (row > 0 && row < L) {
      if (c + 1 < L && horiz(row - 1, c)) stack.emplace_back(row, c + 1);
      if (c > 0 && horiz(row - 1, c - 1)) stack.emplace_back(row, c - 1);
    }
  }
  return false;
}

std::vector<bool> random_mask(int n, double p, std::mt19937_64& gen) {
  std::bernoulli_distribution d(p);
  std::vector<bool> m(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)] = d(gen);
  return m;
}

std::vector<int> lost_list(const std::vector<bool>& m) {
  std::vector<int> out;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i]) out.push_back(static_cast<int>(i));
  return out;
}

bool touches_lost(const Support& s, const std::vector<bool>& lost) {
  return std::any_of(s.begin(), s.end(), [&](int e) { return lost[static_cast<std::size_t>(e)]; });
}

bool contains(const std::vector<Support>& gens, const Support& s) {
  return std::find(gens.begin(), gens.end(), s) != gens.end();
}

TEST(Build, RejectsTinyLattices) {
  EXPECT_THROW(build_lattice(1), ContractViolation);
  EXPECT_THROW(build_lattice(0, Boundary::kToroidal), ContractViolation);
}

TEST(Build, PlanarCountsMatchEnumeration) {
  for (int L = 2; L <= 6; ++L) {
    const LossLattice lat = build_lattice(L);
    EXPECT_EQ(lat.edge_count(), L * L + (L - 1) * (L - 1));
    EXPECT_EQ(lat.vertex_count, (L - 1) * L);
    EXPECT_EQ(lat.face_count, L * (L - 1));
    const int gens = static_cast<int>(lat.x_generators.size() + lat.z_generators.size());
    EXPECT_EQ(gens, lat.edge_count() - 1);
  }
  const LossLattice l3 = build_lattice(3);
  EXPECT_EQ(l3.edge_count(), 13);
  EXPECT_EQ(l3.x_generators.size() + l3.z_generators.size(), 12u);
}

TEST(Build, BoundaryWeights) {
  const int L = 4;
  const LossLattice lat = build_lattice(L);
  std::multiset<std::size_t> xw;
  std::multiset<std::size_t> zw;
  for (const auto& g : lat.x_generators) xw.insert(g.size());
  for (const auto& g : lat.z_generators) zw.insert(g.size());
  // Stars: left/right columns weight 3, interior 4. Plaquettes: top/bottom bands weight 3.
  EXPECT_EQ(xw.count(3), static_cast<std::size_t>(2 * (L - 1)));
  EXPECT_EQ(xw.count(4), static_cast<std::size_t>((L - 1) * (L - 2)));
  EXPECT_EQ(zw.count(3), static_cast<std::size_t>(2 * (L - 1)));
  EXPECT_EQ(zw.count(4), static_cast<std::size_t>((L - 2) * (L - 1)));
}

TEST(Build, GeneratorsIndependentAndCommuting) {
  for (auto b : {Boundary::kPlanar, Boundary::kToroidal}) {
    for (int L = 2; L <= 5; ++L) {
      const LossLattice lat = build_lattice(L, b);
      std::vector<std::vector<char>> rows;
      for (const auto& x : lat.x_generators) {
        for (const auto& z : lat.z_generators) EXPECT_EQ(detail::overlap(x, z) % 2, 0);
        rows.push_back(dense(x, lat.edge_count()));
      }
      EXPECT_EQ(gf2_rank(rows), static_cast<int>(lat.x_generators.size()));
      rows.clear();
      for (const auto& z : lat.z_generators) rows.push_back(dense(z, lat.edge_count()));
      EXPECT_EQ(gf2_rank(rows), static_cast<int>(lat.z_generators.size()));
    }
  }
}

TEST(Build, TorusHasTwoLogicalQubits) {
  const LossLattice lat = build_lattice(4, Boundary::kToroidal);
  EXPECT_EQ(lat.edge_count(), 32);
  EXPECT_EQ(static_cast<int>(lat.x_generators.size() + lat.z_generators.size()), lat.edge_count() - 2);
}

TEST(Build, CleanLogicalsAreStraightStrings) {
  const int L = 5;
  const LogicalResult lr = find_logical(build_lattice(L));
  ASSERT_TRUE(lr.correctable);
  EXPECT_EQ(static_cast<int>(lr.tz->size()), L);
  EXPECT_EQ(static_cast<int>(lr.tx->size()), L);
  EXPECT_EQ(detail::overlap(*lr.tz, *lr.tx) % 2, 1);
  const LogicalResult lt = find_logical(build_lattice(L, Boundary::kToroidal));
  ASSERT_TRUE(lt.correctable);
  EXPECT_EQ(static_cast<int>(lt.tz->size()), L);
  EXPECT_EQ(static_cast<int>(lt.tx->size()), L);
}

TEST(Losses, ExplicitListValidation) {
  const LossLattice lat = build_lattice(3);
  EXPECT_THROW(apply_losses(lat, std::vector<int>{1, 1}), ContractViolation);
  EXPECT_THROW(apply_losses(lat, std::vector<int>{13}), DimensionError);
  EXPECT_THROW(apply_losses(lat, std::vector<int>{-1}), DimensionError);
  const LossLattice same = apply_losses(lat, std::vector<int>{});
  EXPECT_EQ(same.lost, lat.lost);
  EXPECT_EQ(same.x_generators, lat.x_generators);
}

TEST(Losses, RateEndpointsAndReproducibility) {
  const LossLattice lat = build_lattice(6);
  EXPECT_EQ(apply_losses(lat, 1.0, 3).lost_count(), lat.edge_count());
  EXPECT_EQ(apply_losses(lat, 0.0, 3).lost_count(), 0);
  EXPECT_EQ(apply_losses(lat, 0.3, 11).lost, apply_losses(lat, 0.3, 11).lost);
  EXPECT_NE(apply_losses(lat, 0.3, 11).lost, apply_losses(lat, 0.3, 12).lost);
  EXPECT_THROW(apply_losses(lat, 1.5, 0), ContractViolation);
}

TEST(Minimal, GeneratorsOfTheFourQubitInstance) {
  const LossLattice m = minimal_instance();
  EXPECT_EQ(m.x_generators, (std::vector<Support>{{0, 1, 2, 3}}));
  EXPECT_EQ(m.z_generators, (std::vector<Support>{{0, 1}, {0, 2}}));
  const LossLattice r = reform_stabilizers(m);
  EXPECT_EQ(r.x_generators, m.x_generators);
  EXPECT_EQ(r.z_generators, m.z_generators);
}

TEST(Minimal, LosingQubitOneMergesPlaquettes) {
  const LossLattice r = reform_stabilizers(apply_losses(minimal_instance(), std::vector<int>{0}));
  EXPECT_EQ(r.z_generators, (std::vector<Support>{{1, 2}}));
  EXPECT_EQ(r.x_generators, (std::vector<Support>{{1, 2, 3}}));
  const LogicalResult lr = find_logical(r);
  ASSERT_TRUE(lr.correctable);
  EXPECT_EQ(*lr.tz, (Support{1, 3}));
  EXPECT_EQ(*lr.tx, (Support{3}));
}

void expect_same_code(const CodeDefinition& a, const CodeDefinition& b) {
  ASSERT_EQ(a.stabilizers.size(), b.stabilizers.size());
  for (std::size_t k = 0; k < a.stabilizers.size(); ++k) {
    EXPECT_EQ(a.stabilizers[k].name, b.stabilizers[k].name);
    EXPECT_TRUE(a.stabilizers[k].op == b.stabilizers[k].op) << a.stabilizers[k].name;
  }
  EXPECT_TRUE(a.tx.op == b.tx.op);
  EXPECT_TRUE(a.ty.op == b.ty.op);
  EXPECT_TRUE(a.tz.op == b.tz.op);
  EXPECT_EQ(a.qubits, b.qubits);
}

TEST(Minimal, MatchesProtocolCodes) {
  const LossLattice clean = reform_stabilizers(minimal_instance());
  expect_same_code(lattice_code(clean, find_logical(clean), 5), four_qubit_code(5));
  const LossLattice lost = reform_stabilizers(apply_losses(minimal_instance(), std::vector<int>{0}));
  expect_same_code(lattice_code(lost, find_logical(lost), 5), three_qubit_code(5));
}

TEST(Reform, CollinearPlaquettesMergeIntoProduct) {
  const int L = 5;
  const LossLattice lat = build_lattice(L);
  const int k = 2;
  // Faces (k, 0), (k, 1), (k, 2) are separated by vertical edges (k, 1), (k, 2).
  const int f0 = k * (L - 1);
  const std::vector<int> lost = {1 * L + k, 2 * L + k};
  Support product;
  for (int f = f0; f < f0 + 3; ++f) {
    std::vector<char> acc = dense(product, lat.edge_count());
    for (int e : lat.z_generators[static_cast<std::size_t>(f)]) acc[static_cast<std::size_t>(e)] ^= 1;
    product.clear();
    for (int e = 0; e < lat.edge_count(); ++e)
      if (acc[static_cast<std::size_t>(e)]) product.push_back(e);
  }
  const LossLattice r = reform_stabilizers(apply_losses(lat, lost));
  EXPECT_TRUE(contains(r.z_generators, product));
  for (int f = f0; f < f0 + 3; ++f) EXPECT_FALSE(contains(r.z_generators, lat.z_generators[static_cast<std::size_t>(f)]));
  EXPECT_EQ(r.z_generators.size(), lat.z_generators.size() - 2);
  for (const auto& x : r.x_generators) EXPECT_EQ(detail::overlap(x, product) % 2, 0);
}

TEST(Reform, HorizontalCutDestroysLogical) {
  const int L = 6;
  for (int k = 0; k < L; ++k) {
    std::vector<int> cut;
    for (int c = 0; c < L; ++c) cut.push_back(c * L + k);
    const LossLattice r = reform_stabilizers(apply_losses(build_lattice(L), cut));
    EXPECT_FALSE(oracle_top_bottom(L, r.lost));
    const LogicalResult lr = find_logical(r);
    EXPECT_FALSE(lr.tz.has_value());
    EXPECT_FALSE(lr.correctable);
    EXPECT_FALSE(is_correctable(r));
  }
}

// Random masks on L <= 8: commutation, support exclusion, logical
// anticommutation, independence and generator count.
TEST(Reform, RandomMaskProperties) {
  std::mt19937_64 gen(2026);
  for (int trial = 0; trial < 200; ++trial) {
    const int L = 2 + trial % 7;
    const auto b = trial % 4 == 3 ? Boundary::kToroidal : Boundary::kPlanar;
    const double p = std::uniform_real_distribution<double>(0.0, 0.7)(gen);
    const LossLattice lat = build_lattice(L, b);
    const auto mask = random_mask(lat.edge_count(), p, gen);
    const LossLattice r = reform_stabilizers(apply_losses(lat, lost_list(mask)));
    const int n = r.edge_count();
    std::vector<std::vector<char>> rows;
    for (const auto& x : r.x_generators) {
      EXPECT_FALSE(touches_lost(x, mask));
      EXPECT_FALSE(x.empty());
      for (const auto& z : r.z_generators) ASSERT_EQ(detail::overlap(x, z) % 2, 0) << "trial " << trial;
      rows.push_back(dense(x, n));
    }
    for (const auto& z : r.z_generators) {
      EXPECT_FALSE(touches_lost(z, mask));
      EXPECT_FALSE(z.empty());
    }
    const int xr = gf2_rank(rows);
    rows.clear();
    for (const auto& z : r.z_generators) rows.push_back(dense(z, n));
    const int zr = gf2_rank(rows);
    EXPECT_EQ(xr, static_cast<int>(r.x_generators.size())) << "trial " << trial;
    EXPECT_EQ(zr, static_cast<int>(r.z_generators.size())) << "trial " << trial;

    const LogicalResult lr = find_logical(r);
    EXPECT_EQ(lr.correctable, is_correctable(r)) << "trial " << trial;
    for (const auto* l : {&lr.tz, &lr.tx}) {
      if (!l->has_value()) continue;
      EXPECT_FALSE(touches_lost(**l, mask));
    }
    if (lr.tz) {
      for (const auto& x : r.x_generators) EXPECT_EQ(detail::overlap(x, *lr.tz) % 2, 0);
    }
    if (lr.tx) {
      for (const auto& z : r.z_generators) EXPECT_EQ(detail::overlap(z, *lr.tx) % 2, 0);
    }
    if (lr.tz && lr.tx) EXPECT_EQ(detail::overlap(*lr.tz, *lr.tx) % 2, 1);
    if (b == Boundary::kPlanar) {
      EXPECT_EQ(lr.tz.has_value(), oracle_top_bottom(L, mask)) << "trial " << trial;
      EXPECT_EQ(lr.tz.has_value(), lr.tx.has_value());
      const int gens = xr + zr;
      EXPECT_EQ(gens, r.surviving_count() - (lr.correctable ? 1 : 0)) << "trial " << trial;
    }
  }
}

TEST(Reform, CodeFromRandomMaskIsConsistent) {
  std::mt19937_64 gen(5);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const LossLattice lat = build_lattice(3);
    const auto mask = random_mask(lat.edge_count(), 0.2, gen);
    const LossLattice r = reform_stabilizers(apply_losses(lat, lost_list(mask)));
    const LogicalResult lr = find_logical(r);
    if (!lr.correctable) {
      EXPECT_THROW(lattice_code(r, lr), ContractViolation);
      continue;
    }
    EXPECT_TRUE(lattice_code(r, lr).is_consistent());
    ++checked;
  }
  EXPECT_GT(checked, 10);
}

TEST(Percolation, RejectsTooFewSamples) {
  EXPECT_THROW(percolation_threshold({4}, {0.5}, {99, 1, Boundary::kPlanar}), ContractViolation);
}

TEST(Percolation, EndpointsSurviveOrDie) {
  for (auto b : {Boundary::kPlanar, Boundary::kToroidal}) {
    const auto r = percolation_threshold({4, 8}, {0.0, 1.0}, {100, 3, b});
    for (const auto& pt : r.points) EXPECT_EQ(pt.fraction(), pt.p == 0.0 ? 1.0 : 0.0);
  }
}

TEST(Percolation, FastCheckMatchesPathOracle) {
  const int L = 6;
  const LossLattice clean = build_lattice(L);
  for (int s = 0; s < 300; ++s) {
    const LossLattice lost = apply_losses(clean, 0.5, derive_seed(9, {static_cast<std::uint64_t>(s)}));
    EXPECT_EQ(sample_survives(clean, 0.5, derive_seed(9, {static_cast<std::uint64_t>(s)})), oracle_top_bottom(L, lost.lost));
  }
}

TEST(Percolation, DeterministicAndMonotone) {
  std::vector<double> ps;
  for (int i = 1; i <= 9; ++i) ps.push_back(0.1 * i);
  const PercolationOptions opt{400, 17, Boundary::kPlanar};
  const auto a = percolation_threshold({8}, ps, opt);
  const auto b = percolation_threshold({8}, ps, opt);
  EXPECT_EQ(percolation_csv(a), percolation_csv(b));
  for (std::size_t i = 0; i + 1 < a.points.size(); ++i) {
    const auto& lo = a.points[i];
    const auto& hi = a.points[i + 1];
    const double band = 3.0 * std::hypot(lo.std_dev(), hi.std_dev());
    EXPECT_LE(hi.fraction(), lo.fraction() + band);
  }
}

TEST(Percolation, CrossingNearOneHalfForSmallSizes) {
  std::vector<double> ps;
  for (int i = 0; i <= 20; ++i) ps.push_back(0.4 + 0.01 * i);
  for (auto b : {Boundary::kPlanar, Boundary::kToroidal}) {
    const auto r = percolation_threshold({8, 16}, ps, {500, 4, b});
    ASSERT_TRUE(r.threshold.has_value());
    EXPECT_NEAR(*r.threshold, 0.5, 0.04) << to_string(b);
  }
}

TEST(Percolation, CrossingOfSyntheticCurves) {
  std::vector<SurvivalPoint> small;
  std::vector<SurvivalPoint> large;
  for (int i = 0; i <= 10; ++i) {
    const double p = 0.4 + 0.02 * i;
    const auto f = [&](double slope) {
      return static_cast<int>(std::lround(1000 * (0.5 - slope * (p - 0.47))));
    };
    small.push_back({4, p, 1000, f(2.0)});
    large.push_back({8, p, 1000, f(4.0)});
  }
  const auto x = crossing(small, large);
  ASSERT_TRUE(x.has_value());
  EXPECT_NEAR(*x, 0.47, 2e-3);
}

TEST(Percolation, CsvLayout) {
  const auto r = percolation_threshold({2}, {0.0}, {100, 0, Boundary::kPlanar});
  EXPECT_EQ(percolation_csv(r), "L,p,samples,survivors,fraction,std\n2,0,100,100,1,0\n");
}

}  // namespace
