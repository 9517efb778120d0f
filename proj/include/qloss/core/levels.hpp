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

#include <string>
#include <string_view>
#include <vector>

namespace qloss {

// Per-ion electronic levels of a 40Ca+ style qubit with one loss level and
// two hiding (shelving) levels.
//
//   k0  = S(m=-1/2)  qubit |0>, bright
//   k1  = D(m=-1/2)  qubit |1>, dark
//   k2  = D(m=-5/2)  loss level |2>, dark
//   kH0 = D(m=+1/2)  hiding target of |0>, dark
//   kH1 = S(m=+1/2)  hiding target of |1>, bright
//
// The enumerator value is the level's index inside the ion's local space.
enum class Level : int { k0 = 0, k1 = 1, k2 = 2, kH0 = 3, kH1 = 4 };

inline constexpr int level_index(Level level) { return static_cast<int>(level); }

inline constexpr bool is_computational(Level level) {
  return level == Level::k0 || level == Level::k1;
}

// Fluorescence readout distinguishes only the S manifold (bright) from the D
// manifold (dark).
inline constexpr bool is_bright(Level level) {
  return level == Level::k0 || level == Level::kH1;
}

inline constexpr bool is_bright_index(int index) {
  return index == level_index(Level::k0) || index == level_index(Level::kH1);
}

inline constexpr bool representable(Level level, int dims) {
  return level_index(level) < dims;
}

inline std::string to_string(Level level) {
  switch (level) {
    case Level::k0: return "0";
    case Level::k1: return "1";
    case Level::k2: return "2";
    case Level::kH0: return "H0";
    case Level::kH1: return "H1";
  }
  return "?";
}

inline Level level_from_string(std::string_view s) {
  if (s == "0") return Level::k0;
  if (s == "1") return Level::k1;
  if (s == "2") return Level::k2;
  if (s == "H0") return Level::kH0;
  if (s == "H1") return Level::kH1;
  throw DimensionError("unknown level '" + std::string(s) + "'");
}

using LevelSet = std::vector<Level>;

/// {bright, dark} partition of an ion with `dims` levels.
inline std::vector<LevelSet> bright_dark_partition(int dims) {
  std::vector<LevelSet> parts(2);
  for (int i = 0; i < dims; ++i) {
    const auto level = static_cast<Level>(i);
    parts[is_bright(level) ? 0 : 1].push_back(level);
  }
  return parts;
}

/// {|0>}, {everything else}: a computational-basis readout where any
/// non-|0> population counts as outcome 1.
inline std::vector<LevelSet> zero_vs_rest_partition(int dims) {
  std::vector<LevelSet> parts(2);
  for (int i = 0; i < dims; ++i) {
    parts[i == 0 ? 0 : 1].push_back(static_cast<Level>(i));
  }
  return parts;
}

}  // namespace qloss
