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

// Differentially private primitives. Every function that consumes privacy
// budget takes an explicit RandomSource and is otherwise pure.

#ifndef DPM_MECHANISMS_H_
#define DPM_MECHANISMS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dpm/dataset.h"
#include "dpm/random.h"

namespace dpm {

// Laplace-noised set size. The value may be below the true count or even
// non-positive; consumers clamp where they divide.
struct NoisyCount {
  double value = 0.0;
  double eps_used = 0.0;
  int level = 0;
};

// Per-recursion-level epsilons, proportional to sqrt(2^i).
struct BudgetSchedule {
  std::vector<double> per_level;

  double total() const;
};

// Inverse CDF of the zero-centred Laplace distribution at u in (0, 1).
double LaplaceFromUniform(double scale, double u);

double Laplace(double scale, RandomSource& rng);

// true_count + Lap(1/eps).
NoisyCount MakeNoisyCount(std::uint64_t true_count, double eps, int level,
                          RandomSource& rng);

// Offset lambda = -ln(2 delta) / eps that makes (noisy - lambda) an
// underestimate of the true count except with probability delta.
// Requires 0 < delta < 0.5.
double CountOffset(double delta, double eps);

// Selection probabilities proportional to exp(eps * score / (2 sensitivity)).
std::vector<double> ExponentialMechanismPmf(std::span<const double> scores,
                                            double sensitivity, double eps);

// Draws an index from ExponentialMechanismPmf with a single uniform.
std::size_t ExponentialMechanism(std::span<const double> scores,
                                 double sensitivity, double eps,
                                 RandomSource& rng);

// Standard deviation of the per-coordinate Gaussian noise added to a
// coordinate sum: radius * sqrt(2 ln(1.25 / delta)) / eps where radius is
// the L2 radius of the range cube centred at its midpoint.
double AverageNoiseStddev(const Interval& range, std::size_t dim, double eps,
                          double delta);

// (eps, delta)-DP mean of the selected points: centred sum plus Gaussian
// noise, divided by max(noisy_count, 1), shifted back. An empty selection is
// legal and yields noise around the range midpoint.
std::vector<double> DpAverage(const Dataset& data,
                              std::span<const std::uint32_t> indices,
                              const NoisyCount& noisy_count, double eps,
                              double delta, RandomSource& rng);

// Exponential-mechanism percentile over the gaps between sorted values.
// Values are clamped to `bounds`; gap i is chosen with probability
// proportional to width_i * exp(-eps |i - k| / (2 sensitivity)) with target
// rank k = ceil(p m / 100), then a uniform point inside it is returned.
double DpPercentile(std::span<const double> values, double p, double eps,
                    const Interval& bounds, double sensitivity,
                    RandomSource& rng);

// Gap selection probabilities used by DpPercentile (exposed for tests).
std::vector<double> DpPercentileGapPmf(std::span<const double> sorted_values,
                                       double p, double eps,
                                       const Interval& bounds,
                                       double sensitivity);

// per_level[i] = total_eps * sqrt(2^i) / sum_j sqrt(2^j), i < levels.
BudgetSchedule MakeBudgetSchedule(double total_eps, int levels);

}  // namespace dpm

#endif  // DPM_MECHANISMS_H_
