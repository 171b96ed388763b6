// Copyright 2026 The DPM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Exhaustive neighbouring-set harness for the split score: every axis set
// S up to a given size, every added point x from a position grid, every
// candidate, and a grid of score parameters.

#ifndef DPM_TESTS_SENSITIVITY_HARNESS_H_
#define DPM_TESTS_SENSITIVITY_HARNESS_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "dpm/scoring.h"

namespace dpm::testing {

struct SensitivityGrid {
  std::size_t max_size = 40;
  std::size_t positions = 100;
  std::vector<std::pair<double, double>> tq{{0.3, 1.0 / 12.0}, {0.2, 0.1},
                                            {0.5, 0.25}, {1.0, 0.05}};
  std::vector<double> alphas{1.0, 5.0};
  std::vector<double> lambdas{0.0, 3.0, 12.5};
  std::vector<double> betas{0.05, 0.15};
  std::uint64_t seed = 0;
};

struct SensitivityOutcome {
  std::size_t cases = 0;       // (S, x, candidate, params) combinations checked
  double worst_total = 0.0;    // max |d score| / delta_f
  double worst_empty = 0.0;    // max |d e| * max(n~ - lambda, 1)
  double worst_centre = 0.0;   // max |d c| / (t / (max(n~ - lambda, 1) q))
};

// Noisy counts tried for a set of size s under offset lambda; all satisfy
// n~ - lambda <= s.
inline std::vector<double> NoisyCountsFor(std::size_t s, double lambda) {
  const double size = static_cast<double>(s);
  return {size + lambda, std::max(1.0, size + lambda - 2.5), lambda + 1.0,
          0.5 * (size + lambda)};
}

inline SensitivityOutcome RunSensitivityHarness(const SensitivityGrid& grid) {
  SensitivityOutcome out;
  std::mt19937_64 gen(grid.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Interval range{0.0, 1.0};
  std::vector<double> base;
  std::vector<double> scores_s;
  std::vector<double> scores_x;
  for (std::size_t size = 0; size <= grid.max_size; ++size) {
    // Snap to a coarse lattice so ties and interval boundaries occur.
    base.clear();
    for (std::size_t i = 0; i < size; ++i) base.push_back(std::round(unif(gen) * 200.0) / 200.0);
    std::sort(base.begin(), base.end());
    for (std::size_t xi = 0; xi < grid.positions; ++xi) {
      const double x = (static_cast<double>(xi) + 0.5) / static_cast<double>(grid.positions);
      std::vector<double> plus = base;
      plus.insert(std::upper_bound(plus.begin(), plus.end(), x), x);
      for (double beta : grid.betas) {
        const auto cands = GenerateCandidates(range, 1, beta);
        for (const auto& [t, q] : grid.tq) {
          for (double alpha : grid.alphas) {
            ScoreParams params{t, q, alpha, beta};
            for (double lambda : grid.lambdas) {
              for (double n_tilde : NoisyCountsFor(size, lambda)) {
                if (n_tilde - lambda > static_cast<double>(size)) continue;
                const double df = ScoreSensitivity(params, n_tilde, lambda);
                const double denom = std::max(n_tilde - lambda, 1.0);
                for (const auto& c : cands) {
                  const double e0 = Emptiness(base, c, n_tilde);
                  const double e1 = Emptiness(plus, c, n_tilde);
                  const double c0 = Centreness(static_cast<double>(RankOf(c.position, base)),
                                               n_tilde, t, q);
                  const double c1 = Centreness(static_cast<double>(RankOf(c.position, plus)),
                                               n_tilde, t, q);
                  const double ds = std::abs(Score(plus, c, n_tilde, params) -
                                             Score(base, c, n_tilde, params));
                  out.worst_total = std::max(out.worst_total, ds / df);
                  out.worst_empty = std::max(out.worst_empty, std::abs(e1 - e0) * denom);
                  out.worst_centre =
                      std::max(out.worst_centre, std::abs(c1 - c0) / (t / (denom * q)));
                  ++out.cases;
                }
              }
            }
          }
        }
      }
    }
  }
  return out;
}

}  // namespace dpm::testing

#endif  // DPM_TESTS_SENSITIVITY_HARNESS_H_
