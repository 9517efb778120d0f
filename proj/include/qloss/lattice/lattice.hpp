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
#include "qloss/core/pauli.hpp"
#include "qloss/core/random.hpp"
#include "qloss/protocol/code.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace qloss {

/// Planar: smooth top/bottom (primal terminals TOP and BOTTOM), rough
/// left/right (dual terminals LEFT and RIGHT). Toroidal: periodic in both
/// directions.
enum class Boundary { kPlanar, kToroidal };

inline std::string to_string(Boundary b) { return b == Boundary::kPlanar ? "planar" : "toroidal"; }

inline constexpr int kTop = -1;
inline constexpr int kBottom = -2;
inline constexpr int kLeft = -1;
inline constexpr int kRight = -2;

/// A qubit. `u`, `v` are its primal endpoints (vertex or TOP/BOTTOM);
/// `face_a`, `face_b` the dual sides (face or LEFT/RIGHT). On the torus
/// `wrap_v` / `wrap_h` mark primal edges crossing the bottom / right seam,
/// `dual_wrap_v` / `dual_wrap_h` edges whose dual crosses a dual seam.
struct Edge {
  int u = 0;
  int v = 0;
  int face_a = 0;
  int face_b = 0;
  bool wrap_v = false;
  bool wrap_h = false;
  bool dual_wrap_v = false;
  bool dual_wrap_h = false;
};

using Support = std::vector<int>;  // sorted edge indices

/// Surface code on the edges of a square lattice with a loss mask.
struct LossLattice {
  int L = 0;
  Boundary boundary = Boundary::kPlanar;
  int vertex_count = 0;
  int face_count = 0;
  std::vector<Edge> edges;
  std::vector<bool> lost;
  std::vector<Support> x_generators;  // stars
  std::vector<Support> z_generators;  // plaquettes and superplaquettes

  int edge_count() const { return static_cast<int>(edges.size()); }
  int lost_count() const { return static_cast<int>(std::count(lost.begin(), lost.end(), true)); }
  int surviving_count() const { return edge_count() - lost_count(); }

  PauliString to_pauli(const Support& s, char letter, int width = -1) const {
    return PauliString::uniform(width < 0 ? edge_count() : width, letter, s);
  }
};

namespace detail {

inline Support sym_diff(const Support& a, const Support& b) {
  Support out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline int overlap(const Support& a, const Support& b) {
  int n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

// Node ids for graph searches: primal vertices then TOP, BOTTOM; dual faces
// then LEFT, RIGHT.
inline int node_id(int endpoint, int count) {
  if (endpoint >= 0) return endpoint;
  return endpoint == kTop ? count : count + 1;
}

// Winding class bits: 1 horizontal, 2 vertical.
inline int primal_winding(const Edge& e) { return (e.wrap_h ? 1 : 0) | (e.wrap_v ? 2 : 0); }
inline int dual_winding(const Edge& e) { return (e.dual_wrap_h ? 1 : 0) | (e.dual_wrap_v ? 2 : 0); }

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)), parity_(static_cast<std::size_t>(n), 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) {
    int root = x;
    int par = 0;
    while (parent_[static_cast<std::size_t>(root)] != root) {
      par ^= parity_[static_cast<std::size_t>(root)];
      root = parent_[static_cast<std::size_t>(root)];
    }
    // Path compression keeping parities relative to the root.
    int cur = x;
    int cur_par = par;
    while (parent_[static_cast<std::size_t>(cur)] != cur) {
      const int next = parent_[static_cast<std::size_t>(cur)];
      const int next_par = cur_par ^ parity_[static_cast<std::size_t>(cur)];
      parent_[static_cast<std::size_t>(cur)] = root;
      parity_[static_cast<std::size_t>(cur)] = cur_par;
      cur = next;
      cur_par = next_par;
    }
    return root;
  }

  /// Parity of x relative to its root.
  int parity(int x) {
    find(x);
    return parent_[static_cast<std::size_t>(x)] == x ? 0 : parity_[static_cast<std::size_t>(x)];
  }

  /// Joins x and y with relative parity w (XOR-combined). Returns false when
  /// they were already joined with a different parity.
  bool unite(int x, int y, int w = 0) {
    const int px = parity(x);
    const int py = parity(y);
    const int rx = find(x);
    const int ry = find(y);
    if (rx == ry) return (px ^ py ^ w) == 0;
    parent_[static_cast<std::size_t>(ry)] = rx;
    parity_[static_cast<std::size_t>(ry)] = px ^ py ^ w;
    return true;
  }

 private:
  std::vector<int> parent_;
  std::vector<int> parity_;
};

}  // namespace detail

/// Planar lattice of size L: vertices (r, c) with r < L - 1, c < L; L
/// vertical edges per column (the first and last dangling to TOP and
/// BOTTOM); (L - 1)^2 horizontal edges; faces (k, c) with k < L, c < L - 1.
/// Toroidal: L x L vertices, 2 L^2 edges, L^2 faces.
inline LossLattice build_lattice(int L, Boundary boundary = Boundary::kPlanar) {
  if (L < 2) throw ContractViolation("lattice size must be at least 2");
  LossLattice lat;
  lat.L = L;
  lat.boundary = boundary;
  if (boundary == Boundary::kPlanar) {
    const int rows = L - 1;
    const auto vid = [&](int r, int c) { return r * L + c; };
    const auto fid = [&](int k, int c) { return k * (L - 1) + c; };
    lat.vertex_count = rows * L;
    lat.face_count = L * (L - 1);
    for (int c = 0; c < L; ++c) {
      for (int k = 0; k < L; ++k) {
        Edge e;
        e.u = k == 0 ? kTop : vid(k - 1, c);
        e.v = k == L - 1 ? kBottom : vid(k, c);
        e.face_a = c == 0 ? kLeft : fid(k, c - 1);
        e.face_b = c == L - 1 ? kRight : fid(k, c);
        lat.edges.push_back(e);
      }
    }
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c + 1 < L; ++c) {
        Edge e;
        e.u = vid(r, c);
        e.v = vid(r, c + 1);
        e.face_a = fid(r, c);
        e.face_b = fid(r + 1, c);
        lat.edges.push_back(e);
      }
    }
  } else {
    const auto vid = [&](int r, int c) { return ((r + L) % L) * L + (c + L) % L; };
    lat.vertex_count = L * L;
    lat.face_count = L * L;
    for (int c = 0; c < L; ++c) {
      for (int r = 0; r < L; ++r) {
        Edge e;
        e.u = vid(r, c);
        e.v = vid(r + 1, c);
        e.face_a = vid(r, c - 1);
        e.face_b = vid(r, c);
        e.wrap_v = r == L - 1;
        e.dual_wrap_h = c == 0;
        lat.edges.push_back(e);
      }
    }
    for (int r = 0; r < L; ++r) {
      for (int c = 0; c < L; ++c) {
        Edge e;
        e.u = vid(r, c);
        e.v = vid(r, c + 1);
        e.face_a = vid(r - 1, c);
        e.face_b = vid(r, c);
        e.wrap_h = c == L - 1;
        e.dual_wrap_v = r == 0;
        lat.edges.push_back(e);
      }
    }
  }
  lat.lost.assign(lat.edges.size(), false);
  std::vector<Support> stars(static_cast<std::size_t>(lat.vertex_count));
  std::vector<Support> faces(static_cast<std::size_t>(lat.face_count));
  for (int i = 0; i < lat.edge_count(); ++i) {
    const Edge& e = lat.edges[static_cast<std::size_t>(i)];
    for (int x : {e.u, e.v})
      if (x >= 0) stars[static_cast<std::size_t>(x)].push_back(i);
    for (int f : {e.face_a, e.face_b})
      if (f >= 0) faces[static_cast<std::size_t>(f)].push_back(i);
  }
  lat.x_generators = stars;
  lat.z_generators = faces;
  if (boundary == Boundary::kToroidal) {
    lat.x_generators.pop_back();
    lat.z_generators.pop_back();
  }
  return lat;
}

/// One vertex, two plaquettes and four edges: edges 0..2 join the vertex to
/// TOP, edge 3 to BOTTOM. Plaquettes {0, 1} and {0, 2}; star {0, 1, 2, 3}.
inline LossLattice minimal_instance() {
  LossLattice lat;
  lat.L = 1;
  lat.boundary = Boundary::kPlanar;
  lat.vertex_count = 1;
  lat.face_count = 2;
  const int ul = 0;
  const int ur = 1;
  lat.edges = {{0, kTop, ul, ur, false, false},
               {0, kTop, ul, kLeft, false, false},
               {0, kTop, ur, kRight, false, false},
               {0, kBottom, kLeft, kRight, false, false}};
  lat.lost.assign(4, false);
  lat.x_generators = {{0, 1, 2, 3}};
  lat.z_generators = {{0, 1}, {0, 2}};
  return lat;
}

/// Marks the listed edges lost. Generators are not touched until
/// reform_stabilizers.
inline LossLattice apply_losses(LossLattice lat, const std::vector<int>& edges) {
  std::set<int> seen;
  for (int e : edges) {
    if (e < 0 || e >= lat.edge_count()) throw DimensionError("lost edge index out of range");
    if (!seen.insert(e).second) throw ContractViolation("edge " + std::to_string(e) + " listed twice");
    lat.lost[static_cast<std::size_t>(e)] = true;
  }
  return lat;
}

/// Loses each edge independently with probability p, in index order.
inline LossLattice apply_losses(LossLattice lat, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw ContractViolation("loss rate must lie in [0, 1]");
  Rng rng(seed);
  for (std::size_t i = 0; i < lat.edges.size(); ++i) {
    if (bernoulli(rng, p)) lat.lost[i] = true;
  }
  return lat;
}

namespace detail {

inline std::vector<std::vector<int>> incidence(const LossLattice& lat, bool dual, int nodes) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(nodes));
  const int count = dual ? lat.face_count : lat.vertex_count;
  for (int i = 0; i < lat.edge_count(); ++i) {
    const Edge& e = lat.edges[static_cast<std::size_t>(i)];
    const int a = node_id(dual ? e.face_a : e.u, count);
    const int b = node_id(dual ? e.face_b : e.v, count);
    adj[static_cast<std::size_t>(a)].push_back(i);
    if (b != a) adj[static_cast<std::size_t>(b)].push_back(i);
  }
  return adj;
}

inline void check_generators(const LossLattice& lat) {
  for (const auto* set : {&lat.x_generators, &lat.z_generators}) {
    for (const auto& g : *set) {
      for (int e : g) {
        if (lat.lost[static_cast<std::size_t>(e)]) throw InvariantViolation("generator acts on a lost edge");
      }
    }
  }
  std::vector<std::vector<int>> x_on(lat.edges.size());
  for (std::size_t k = 0; k < lat.x_generators.size(); ++k)
    for (int e : lat.x_generators[k]) x_on[static_cast<std::size_t>(e)].push_back(static_cast<int>(k));
  for (const auto& z : lat.z_generators) {
    std::map<int, int> hits;
    for (int e : z)
      for (int x : x_on[static_cast<std::size_t>(e)]) ++hits[x];
    for (const auto& [x, n] : hits) {
      if (n % 2 != 0) throw InvariantViolation("reformed generators anticommute");
    }
  }
}

}  // namespace detail

/// Stars lose their lost edges; one star per primal component without a
/// terminal is dependent and dropped. Plaquettes joined by lost edges merge
/// into superplaquettes (mod-2 products); classes touching LEFT or RIGHT are
/// dropped, and on the torus one class is dropped.
inline LossLattice reform_stabilizers(LossLattice lat) {
  const int nv = lat.vertex_count + 2;
  const int nf = lat.face_count + 2;
  detail::UnionFind primal(nv);
  detail::UnionFind dual(nf);
  for (int i = 0; i < lat.edge_count(); ++i) {
    const Edge& e = lat.edges[static_cast<std::size_t>(i)];
    if (lat.lost[static_cast<std::size_t>(i)]) {
      dual.unite(detail::node_id(e.face_a, lat.face_count), detail::node_id(e.face_b, lat.face_count));
    } else {
      primal.unite(detail::node_id(e.u, lat.vertex_count), detail::node_id(e.v, lat.vertex_count));
    }
  }

  std::vector<Support> stars(static_cast<std::size_t>(lat.vertex_count));
  std::vector<Support> faces(static_cast<std::size_t>(lat.face_count));
  for (int i = 0; i < lat.edge_count(); ++i) {
    const Edge& e = lat.edges[static_cast<std::size_t>(i)];
    for (int f : {e.face_a, e.face_b})
      if (f >= 0) faces[static_cast<std::size_t>(f)].push_back(i);
    if (lat.lost[static_cast<std::size_t>(i)]) continue;
    for (int x : {e.u, e.v})
      if (x >= 0) stars[static_cast<std::size_t>(x)].push_back(i);
  }

  const bool planar = lat.boundary == Boundary::kPlanar;
  const int top = primal.find(lat.vertex_count);
  const int bottom = primal.find(lat.vertex_count + 1);
  std::set<int> dropped_component;
  lat.x_generators.clear();
  for (int v = 0; v < lat.vertex_count; ++v) {
    const int root = primal.find(v);
    const bool terminal = planar && (root == top || root == bottom);
    if (!terminal && dropped_component.insert(root).second) continue;
    if (!stars[static_cast<std::size_t>(v)].empty()) lat.x_generators.push_back(stars[static_cast<std::size_t>(v)]);
  }

  const int left = dual.find(lat.face_count);
  const int right = dual.find(lat.face_count + 1);
  std::map<int, Support> classes;
  for (int f = 0; f < lat.face_count; ++f) {
    const int root = dual.find(f);
    if (planar && (root == left || root == right)) continue;
    classes[root] = detail::sym_diff(classes[root], faces[static_cast<std::size_t>(f)]);
  }
  lat.z_generators.clear();
  bool skipped = planar;
  for (int f = 0; f < lat.face_count; ++f) {
    auto it = classes.find(dual.find(f));
    if (it == classes.end()) continue;
    if (!skipped) {
      skipped = true;
      classes.erase(it);
      continue;
    }
    if (!it->second.empty()) lat.z_generators.push_back(it->second);
    classes.erase(it);
  }
  detail::check_generators(lat);
  return lat;
}

/// Deformed logicals avoiding every lost edge. `correctable` iff both exist.
struct LogicalResult {
  bool correctable = false;
  std::optional<Support> tz;
  std::optional<Support> tx;
};

namespace detail {

// BFS from `from` to `to` over edges accepted by `use`, edges scanned in
// index order. Returns the edge path.
template <class NodeOf>
std::optional<Support> bfs_path(int nodes, const std::vector<std::vector<int>>& adj, int from, int to,
                                const std::vector<bool>& use, NodeOf other) {
  std::vector<int> via(static_cast<std::size_t>(nodes), -2);
  std::vector<int> prev(static_cast<std::size_t>(nodes), -1);
  std::deque<int> queue = {from};
  via[static_cast<std::size_t>(from)] = -1;
  while (!queue.empty()) {
    const int x = queue.front();
    queue.pop_front();
    if (x == to) break;
    for (int e : adj[static_cast<std::size_t>(x)]) {
      if (!use[static_cast<std::size_t>(e)]) continue;
      const int y = other(e, x);
      if (via[static_cast<std::size_t>(y)] != -2) continue;
      via[static_cast<std::size_t>(y)] = e;
      prev[static_cast<std::size_t>(y)] = x;
      queue.push_back(y);
    }
  }
  if (via[static_cast<std::size_t>(to)] == -2) return std::nullopt;
  Support path;
  for (int x = to; x != from; x = prev[static_cast<std::size_t>(x)]) path.push_back(via[static_cast<std::size_t>(x)]);
  std::sort(path.begin(), path.end());
  return path;
}

// Cycle whose winding class (bit 0 horizontal, bit 1 vertical) equals
// `target`. Fundamental cycles of a BFS spanning forest are combined mod 2;
// `free_classes` are classes reachable at no cost (loops hidden inside
// contracted nodes).
inline std::optional<Support> cycle_in_class(int nodes, const std::vector<std::pair<int, int>>& ends,
                                             const std::vector<int>& parity, const std::vector<bool>& use, int target,
                                             const std::vector<int>& free_classes = {}) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(nodes));
  for (std::size_t e = 0; e < ends.size(); ++e) {
    if (!use[e]) continue;
    adj[static_cast<std::size_t>(ends[e].first)].push_back(static_cast<int>(e));
    if (ends[e].second != ends[e].first) adj[static_cast<std::size_t>(ends[e].second)].push_back(static_cast<int>(e));
  }
  std::vector<int> via(static_cast<std::size_t>(nodes), -2);
  std::vector<int> prev(static_cast<std::size_t>(nodes), -1);
  std::vector<int> par(static_cast<std::size_t>(nodes), 0);
  std::vector<bool> tree(ends.size(), false);
  for (int root = 0; root < nodes; ++root) {
    if (via[static_cast<std::size_t>(root)] != -2) continue;
    via[static_cast<std::size_t>(root)] = -1;
    std::deque<int> queue = {root};
    while (!queue.empty()) {
      const int x = queue.front();
      queue.pop_front();
      for (int e : adj[static_cast<std::size_t>(x)]) {
        const auto [a, b] = ends[static_cast<std::size_t>(e)];
        const int y = a == x ? b : a;
        if (via[static_cast<std::size_t>(y)] != -2) continue;
        via[static_cast<std::size_t>(y)] = e;
        prev[static_cast<std::size_t>(y)] = x;
        par[static_cast<std::size_t>(y)] = par[static_cast<std::size_t>(x)] ^ parity[static_cast<std::size_t>(e)];
        tree[static_cast<std::size_t>(e)] = true;
        queue.push_back(y);
      }
    }
  }
  const auto fundamental = [&](std::size_t e) {
    Support cycle = {static_cast<int>(e)};
    for (int end : {ends[e].first, ends[e].second}) {
      Support path;
      for (int x = end; prev[static_cast<std::size_t>(x)] != -1; x = prev[static_cast<std::size_t>(x)]) {
        path.push_back(via[static_cast<std::size_t>(x)]);
      }
      std::sort(path.begin(), path.end());
      cycle = sym_diff(cycle, path);
    }
    return cycle;
  };
  std::map<int, Support> reach = {{0, {}}};
  const auto add = [&](int cls, const Support& cycle) {
    std::vector<std::pair<int, Support>> fresh;
    for (const auto& [k, s] : reach)
      if (!reach.count(k ^ cls)) fresh.emplace_back(k ^ cls, sym_diff(s, cycle));
    for (auto& [k, s] : fresh) reach.emplace(k, std::move(s));
  };
  for (int c : free_classes) add(c, {});
  for (std::size_t e = 0; e < ends.size() && !reach.count(target); ++e) {
    if (!use[e] || tree[e]) continue;
    const int cls = par[static_cast<std::size_t>(ends[e].first)] ^ par[static_cast<std::size_t>(ends[e].second)] ^ parity[e];
    if (cls == 0 || reach.count(cls)) continue;
    add(cls, fundamental(e));
  }
  const auto it = reach.find(target);
  if (it == reach.end()) return std::nullopt;
  return it->second;
}

}  // namespace detail

/// T^Z: surviving primal path TOP -> BOTTOM (planar) or surviving cycle
/// winding vertically (torus). T^X: surviving dual path LEFT -> RIGHT over
/// the superplaquette classes (planar) or dual cycle winding horizontally
/// (torus). Windings are counted mod 2 in both directions.
inline LogicalResult find_logical(const LossLattice& lat) {
  LogicalResult res;
  const int ne = lat.edge_count();
  std::vector<bool> alive(static_cast<std::size_t>(ne));
  for (int i = 0; i < ne; ++i) alive[static_cast<std::size_t>(i)] = !lat.lost[static_cast<std::size_t>(i)];

  const int nf = lat.face_count + 2;
  detail::UnionFind cls(nf);
  std::vector<int> lost_loops;
  for (int i = 0; i < ne; ++i) {
    if (!lat.lost[static_cast<std::size_t>(i)]) continue;
    const Edge& e = lat.edges[static_cast<std::size_t>(i)];
    const int a = detail::node_id(e.face_a, lat.face_count);
    const int b = detail::node_id(e.face_b, lat.face_count);
    const int w = detail::dual_winding(e);
    if (cls.find(a) == cls.find(b)) {
      const int loop = cls.parity(a) ^ cls.parity(b) ^ w;
      if (loop != 0) lost_loops.push_back(loop);
    }
    cls.unite(a, b, w);
  }

  if (lat.boundary == Boundary::kPlanar) {
    const int nv = lat.vertex_count + 2;
    const auto adj = detail::incidence(lat, false, nv);
    res.tz = detail::bfs_path(nv, adj, detail::node_id(kTop, lat.vertex_count), detail::node_id(kBottom, lat.vertex_count),
                              alive, [&](int e, int x) {
                                const Edge& ed = lat.edges[static_cast<std::size_t>(e)];
                                const int a = detail::node_id(ed.u, lat.vertex_count);
                                return a == x ? detail::node_id(ed.v, lat.vertex_count) : a;
                              });
    const int left = cls.find(detail::node_id(kLeft, lat.face_count));
    const int right = cls.find(detail::node_id(kRight, lat.face_count));
    if (left != right) {
      std::vector<std::vector<int>> adj_d(static_cast<std::size_t>(nf));
      for (int i = 0; i < ne; ++i) {
        if (!alive[static_cast<std::size_t>(i)]) continue;
        const Edge& e = lat.edges[static_cast<std::size_t>(i)];
        const int a = cls.find(detail::node_id(e.face_a, lat.face_count));
        const int b = cls.find(detail::node_id(e.face_b, lat.face_count));
        adj_d[static_cast<std::size_t>(a)].push_back(i);
        if (b != a) adj_d[static_cast<std::size_t>(b)].push_back(i);
      }
      res.tx = detail::bfs_path(nf, adj_d, left, right, alive, [&](int e, int x) {
        const Edge& ed = lat.edges[static_cast<std::size_t>(e)];
        const int a = cls.find(detail::node_id(ed.face_a, lat.face_count));
        return a == x ? cls.find(detail::node_id(ed.face_b, lat.face_count)) : a;
      });
    }
  } else {
    std::vector<std::pair<int, int>> ends;
    std::vector<int> par;
    for (const Edge& e : lat.edges) {
      ends.emplace_back(e.u, e.v);
      par.push_back(detail::primal_winding(e));
    }
    res.tz = detail::cycle_in_class(lat.vertex_count, ends, par, alive, 2);
    std::vector<std::pair<int, int>> dends;
    std::vector<int> dpar;
    for (const Edge& e : lat.edges) {
      dends.emplace_back(cls.find(e.face_a), cls.find(e.face_b));
      dpar.push_back(detail::dual_winding(e) ^ cls.parity(e.face_a) ^ cls.parity(e.face_b));
    }
    res.tx = detail::cycle_in_class(lat.face_count, dends, dpar, alive, 1, lost_loops);
  }
  if (res.tx && res.tx->empty()) res.tx.reset();
  res.correctable = res.tz.has_value() && res.tx.has_value();
  return res;
}

/// Fast correctability test: TOP-BOTTOM connectivity of surviving edges
/// (planar) or a surviving cycle of vertical winding class (torus).
inline bool is_correctable(const LossLattice& lat, const std::vector<bool>& lost) {
  if (lost.size() != lat.edges.size()) throw DimensionError("loss mask size differs from edge count");
  detail::UnionFind uf(lat.vertex_count + 2);
  int span = 1;  // bit k set when winding class k is reachable
  for (int i = 0; i < lat.edge_count(); ++i) {
    if (lost[static_cast<std::size_t>(i)]) continue;
    const Edge& e = lat.edges[static_cast<std::size_t>(i)];
    const int a = detail::node_id(e.u, lat.vertex_count);
    const int b = detail::node_id(e.v, lat.vertex_count);
    const int w = detail::primal_winding(e);
    if (uf.find(a) == uf.find(b)) {
      const int loop = uf.parity(a) ^ uf.parity(b) ^ w;
      for (int k = 0; k < 4; ++k)
        if (span & (1 << k)) span |= 1 << (k ^ loop);
    } else {
      uf.unite(a, b, w);
    }
  }
  if (lat.boundary == Boundary::kToroidal) return (span & (1 << 2)) != 0;
  return uf.find(lat.vertex_count) == uf.find(lat.vertex_count + 1);
}

inline bool is_correctable(const LossLattice& lat) { return is_correctable(lat, lat.lost); }

/// Stabilizer code on `width` qubits with edge i mapped to qubit i: stars
/// S{k}X first, then plaquettes S{k}Z, logicals TX, TY = i TX TZ, TZ.
inline CodeDefinition lattice_code(const LossLattice& lat, const LogicalResult& logicals, int width = -1) {
  if (!logicals.correctable) throw ContractViolation("no logical qubit survives");
  const int w = width < 0 ? lat.edge_count() : width;
  CodeDefinition c;
  c.name = "lattice";
  for (int i = 0; i < lat.edge_count(); ++i)
    if (!lat.lost[static_cast<std::size_t>(i)]) c.qubits.push_back(i);
  int k = 1;
  for (const auto& g : lat.x_generators) c.stabilizers.push_back({"S" + std::to_string(k++) + "X", lat.to_pauli(g, 'X', w)});
  k = 1;
  for (const auto& g : lat.z_generators) c.stabilizers.push_back({"S" + std::to_string(k++) + "Z", lat.to_pauli(g, 'Z', w)});
  c.tx = {"TX", lat.to_pauli(*logicals.tx, 'X', w)};
  c.tz = {"TZ", lat.to_pauli(*logicals.tz, 'Z', w)};
  c.ty = {"TY", logical_y(c.tx.op, c.tz.op)};
  return c;
}

}  // namespace qloss
