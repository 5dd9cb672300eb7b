// Copyright 2026 The omas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Tracks the maximum of six time-varying inputs on a line graph with the
// approximate and exact protocols, using the library directly.

#include <algorithm>
#include <cstdio>
#include <vector>

#include "omas/omas.hpp"

int main() {
  using namespace omas;
  const NetworkSnapshot g = line_graph(6);
  const SignalBank bank = line6_reference_bank();
  const double slope = bank.slope_bound();

  const auto admc = ProtocolParams::approximate(0.03);
  const auto edmc = ProtocolParams::exact(diameter(g));

  std::vector<double> u(6);
  for (std::size_t i = 0; i < 6; ++i) u[i] = bank.sample(g.nodes()[i], 0);
  ProtocolState xa = ScalarState{0.0, 0.4, 0.8, 1.2, 1.6, 2.0};
  ProtocolState xe = init_state(edmc, u);

  const auto b =
      bounds_for(admc, diameter(g), slope, outputs(xa), *std::max_element(u.begin(), u.end()));
  std::printf("ADMC: eps = %.2f, eps_ss = %.2f, T^c = %zu\n", b.tracking_bound, b.steady_bound,
              b.convergence_time);

  std::printf("%5s %8s %8s %8s\n", "k", "max u", "ADMC", "EDMC");
  for (Tick k = 0; k < 200; ++k) {
    const double target = *std::max_element(u.begin(), u.end());
    if (k % 20 == 0)
      std::printf("%5lld %8.3f %8.3f %8.3f\n", static_cast<long long>(k), target, output(xa, 0),
                  output(xe, 0));
    xa = step(admc, g, xa, u);
    xe = step(edmc, g, xe, u);
    for (std::size_t i = 0; i < 6; ++i) u[i] = bank.sample(g.nodes()[i], k + 1);
  }
  return 0;
}
