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

// Encodes |+i_L>, rotates ion 0 towards the loss level, and prints the exact
// branch observables next to a short trajectory run. Then loses one edge of
// the smallest planar lattice and prints the reformed code.

#include "qloss/lattice/lattice.hpp"
#include "qloss/protocol/run.hpp"

#include <cstdio>

int main() {
  using namespace qloss;
  const double alpha = kPi / 2;
  const double phi = 0.5 * kPi;

  const AnalyticResult exact = analytic_protocol({alpha}, phi);
  std::printf("p(loss) = %.6f\n", exact.loss.probability);
  std::printf("no-loss  S1X = %.6f  fidelity = %.6f\n", exact.no_loss.value("S1X"), exact.no_loss.value("fidelity"));
  std::printf("loss     S1X = %.6f  fidelity = %.6f\n", exact.loss.value("S1X"), exact.loss.value("fidelity"));

  ProtocolOptions opt;
  opt.shots = 1000;
  opt.seed = 7;
  const ProtocolResult run = run_protocol({alpha}, phi, opt);
  for (const Agreement& a : compare_with_analytic(run)) {
    if (a.name != "fidelity") continue;
    std::printf("%-8s sampled %.4f +- %.4f  exact %.4f  (%d shots)\n", a.branch.c_str(), a.sampled, a.sigma,
                a.analytic, a.count);
  }

  const LossLattice lost = reform_stabilizers(apply_losses(minimal_instance(), std::vector<int>{0}));
  for (const auto& s : lattice_code(lost, find_logical(lost), 4).stabilizers) std::printf("%s ", s.op.to_string().c_str());
  std::printf("\n");
  return 0;
}
