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
#include "qloss/core/random.hpp"
#include "qloss/lattice/lattice.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qloss {

struct SurvivalPoint {
  int L = 0;
  double p = 0.0;
  int samples = 0;
  int survivors = 0;

  double fraction() const { return static_cast<double>(survivors) / samples; }
  double std_dev() const {
    const double f = fraction();
    return std::sqrt(f * (1.0 - f) / samples);
  }
};

struct PercolationOptions {
  int samples = 2000;
  std::uint64_t seed = 0;
  Boundary boundary = Boundary::kPlanar;
};

struct PercolationResult {
  std::vector<SurvivalPoint> points;  // L-major, p-minor
  std::optional<double> threshold;

  std::vector<SurvivalPoint> curve(int L) const {
    std::vector<SurvivalPoint> out;
    for (const auto& pt : points)
      if (pt.L == L) out.push_back(pt);
    return out;
  }
};

/// Survival of one iid loss mask, drawn exactly as apply_losses(clean, p,
/// seed) would. Sample s at grid index i for size L uses
/// derive_seed(seed, {L, i, s}).
inline bool sample_survives(const LossLattice& clean, double p, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<bool> lost(clean.edges.size());
  for (std::size_t e = 0; e < lost.size(); ++e) lost[e] = bernoulli(rng, p);
  return is_correctable(clean, lost);
}

/// Crossing of f_large - f_small: least-squares line through the points
/// where both curves lie inside (0.05, 0.95), else linear interpolation at
/// the first sign change.
inline std::optional<double> crossing(const std::vector<SurvivalPoint>& small, const std::vector<SurvivalPoint>& large) {
  if (small.size() != large.size() || small.empty()) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < small.size(); ++i) {
    const double a = small[i].fraction();
    const double b = large[i].fraction();
    if (a <= 0.05 || a >= 0.95 || b <= 0.05 || b >= 0.95) continue;
    const double x = small[i].p;
    const double y = b - a;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n >= 3) {
    const double det = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / det;
    const double icept = (sy - slope * sx) / n;
    if (std::abs(det) > 0.0 && slope < 0.0) {
      const double root = -icept / slope;
      if (root >= small.front().p && root <= small.back().p) return root;
    }
  }
  for (std::size_t i = 0; i + 1 < small.size(); ++i) {
    const double d0 = large[i].fraction() - small[i].fraction();
    const double d1 = large[i + 1].fraction() - small[i + 1].fraction();
    if (d0 > 0.0 && d1 <= 0.0) {
      if (d1 == 0.0) return small[i + 1].p;
      return small[i].p + (small[i + 1].p - small[i].p) * d0 / (d0 - d1);
    }
  }
  return std::nullopt;
}

/// Survival curves for every L and p; the threshold is the crossing of the
/// first and last L curves.
inline PercolationResult percolation_threshold(const std::vector<int>& sizes, const std::vector<double>& ps,
                                               const PercolationOptions& opt) {
  if (opt.samples < 100) throw ContractViolation("percolation needs at least 100 samples per point");
  if (sizes.empty() || ps.empty()) throw ContractViolation("empty size or rate grid");
  for (double p : ps)
    if (!(p >= 0.0 && p <= 1.0)) throw ContractViolation("loss rate must lie in [0, 1]");
  PercolationResult res;
  for (int L : sizes) {
    const LossLattice clean = build_lattice(L, opt.boundary);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      SurvivalPoint pt{L, ps[i], opt.samples, 0};
      for (int s = 0; s < opt.samples; ++s) {
        const auto seed = derive_seed(opt.seed, {static_cast<std::uint64_t>(L), static_cast<std::uint64_t>(i),
                                                 static_cast<std::uint64_t>(s)});
        if (sample_survives(clean, ps[i], seed)) ++pt.survivors;
      }
      res.points.push_back(pt);
    }
  }
  if (sizes.size() >= 2) res.threshold = crossing(res.curve(sizes.front()), res.curve(sizes.back()));
  return res;
}

/// CSV: L, p, samples, survivors, fraction, std.
inline std::string percolation_csv(const PercolationResult& r) {
  std::ostringstream out;
  out << "L,p,samples,survivors,fraction,std\n";
  char buf[96];
  for (const auto& pt : r.points) {
    std::snprintf(buf, sizeof buf, "%d,%.12g,%d,%d,%.12g,%.12g\n", pt.L, pt.p, pt.samples, pt.survivors,
                  pt.fraction(), pt.std_dev());
    out << buf;
  }
  return out.str();
}

}  // namespace qloss
