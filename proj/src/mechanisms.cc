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

#include "dpm/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dpm/errors.h"

namespace dpm {
namespace {

void RequirePositive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(std::string(what) + " must be positive and finite");
  }
}

// Index drawn from unnormalised log-weights; -inf entries are never chosen.
std::size_t SampleFromLogWeights(std::span<const double> log_weights,
                                 RandomSource& rng) {
  const double max_log =
      *std::max_element(log_weights.begin(), log_weights.end());
  std::vector<double> cumulative(log_weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    total += std::exp(log_weights[i] - max_log);
    cumulative[i] = total;
  }
  const double target = rng.Uniform() * total;
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  std::size_t index = static_cast<std::size_t>(it - cumulative.begin());
  if (index >= log_weights.size()) index = log_weights.size() - 1;
  // Skip over zero-probability entries that share the same cumulative mass.
  while (log_weights[index] == -std::numeric_limits<double>::infinity() &&
         index > 0) {
    --index;
  }
  return index;
}

// Log-weights of the m + 1 gaps between bounds.lo, the sorted values and
// bounds.hi. Zero-width gaps get -inf.
std::vector<double> GapLogWeights(std::span<const double> sorted_values,
                                  double p, double eps, const Interval& bounds,
                                  double sensitivity) {
  if (!(p > 0.0 && p < 100.0)) throw DomainError("percentile must lie in (0, 100)");
  RequirePositive(eps, "percentile epsilon");
  RequirePositive(sensitivity, "percentile sensitivity");
  if (!(bounds.lo < bounds.hi)) {
    throw DomainError("percentile bounds must satisfy lo < hi");
  }
  const std::size_t m = sorted_values.size();
  const double target = std::ceil(p * static_cast<double>(m) / 100.0);
  // Computed as (eps / s) / 2 so that (eps, s) and (eps / s, 1) agree bitwise.
  const double factor = (eps / sensitivity) / 2.0;
  std::vector<double> log_w(m + 1);
  double prev = bounds.lo;
  for (std::size_t i = 0; i <= m; ++i) {
    const double next =
        i < m ? std::clamp(sorted_values[i], bounds.lo, bounds.hi) : bounds.hi;
    const double width = next - prev;
    log_w[i] = width > 0.0
                   ? std::log(width) -
                         factor * std::abs(static_cast<double>(i) - target)
                   : -std::numeric_limits<double>::infinity();
    prev = next;
  }
  return log_w;
}

}  // namespace

double BudgetSchedule::total() const {
  return std::accumulate(per_level.begin(), per_level.end(), 0.0);
}

double LaplaceFromUniform(double scale, double u) {
  const double centred = u - 0.5;
  if (centred == 0.0) return 0.0;
  const double magnitude = -scale * std::log1p(-2.0 * std::abs(centred));
  return centred < 0 ? -magnitude : magnitude;
}

double Laplace(double scale, RandomSource& rng) {
  RequirePositive(scale, "Laplace scale");
  return LaplaceFromUniform(scale, rng.Uniform());
}

NoisyCount MakeNoisyCount(std::uint64_t true_count, double eps, int level,
                          RandomSource& rng) {
  RequirePositive(eps, "count epsilon");
  return NoisyCount{static_cast<double>(true_count) + Laplace(1.0 / eps, rng),
                    eps, level};
}

double CountOffset(double delta, double eps) {
  RequirePositive(eps, "count epsilon");
  if (!(delta > 0.0 && delta < 0.5)) {
    throw DomainError("count offset needs 0 < delta < 0.5");
  }
  return -std::log(2.0 * delta) / eps;
}

std::vector<double> ExponentialMechanismPmf(std::span<const double> scores,
                                            double sensitivity, double eps) {
  if (scores.empty()) throw DomainError("exponential mechanism: no candidates");
  RequirePositive(sensitivity, "sensitivity");
  RequirePositive(eps, "exponential mechanism epsilon");
  for (double s : scores) {
    if (!std::isfinite(s)) throw DomainError("exponential mechanism: non-finite score");
  }
  const double max_score = *std::max_element(scores.begin(), scores.end());
  const double factor = eps / (2.0 * sensitivity);
  std::vector<double> pmf(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    pmf[i] = std::exp(factor * (scores[i] - max_score));
    total += pmf[i];
  }
  for (double& p : pmf) p /= total;
  return pmf;
}

std::size_t ExponentialMechanism(std::span<const double> scores,
                                 double sensitivity, double eps,
                                 RandomSource& rng) {
  if (scores.empty()) throw DomainError("exponential mechanism: no candidates");
  RequirePositive(sensitivity, "sensitivity");
  RequirePositive(eps, "exponential mechanism epsilon");
  const double factor = eps / (2.0 * sensitivity);
  std::vector<double> log_weights(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) {
      throw DomainError("exponential mechanism: non-finite score");
    }
    log_weights[i] = factor * scores[i];
  }
  return SampleFromLogWeights(log_weights, rng);
}

double AverageNoiseStddev(const Interval& range, std::size_t dim, double eps,
                          double delta) {
  RequirePositive(eps, "average epsilon");
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw DomainError("average delta must lie in (0, 1]");
  }
  const double radius = 0.5 * range.width() * std::sqrt(static_cast<double>(dim));
  return radius * std::sqrt(2.0 * std::log(1.25 / delta)) / eps;
}

std::vector<double> DpAverage(const Dataset& data,
                              std::span<const std::uint32_t> indices,
                              const NoisyCount& noisy_count, double eps,
                              double delta, RandomSource& rng) {
  const std::size_t d = data.dim();
  const double mid = data.range().midpoint();
  const double sigma = AverageNoiseStddev(data.range(), d, eps, delta);

  std::vector<double> sum(d, 0.0);
  for (std::uint32_t i : indices) {
    const auto p = data.point(i);
    for (std::size_t j = 0; j < d; ++j) sum[j] += p[j] - mid;
  }
  const double denominator = std::max(noisy_count.value, 1.0);
  std::vector<double> centre(d);
  for (std::size_t j = 0; j < d; ++j) {
    centre[j] = (sum[j] + sigma * rng.StandardNormal()) / denominator + mid;
  }
  return centre;
}

std::vector<double> DpPercentileGapPmf(std::span<const double> sorted_values,
                                       double p, double eps,
                                       const Interval& bounds,
                                       double sensitivity) {
  std::vector<double> weights =
      GapLogWeights(sorted_values, p, eps, bounds, sensitivity);
  const double max_log = *std::max_element(weights.begin(), weights.end());
  double total = 0.0;
  for (double& w : weights) {
    w = std::exp(w - max_log);
    total += w;
  }
  for (double& w : weights) w /= total;
  return weights;
}

double DpPercentile(std::span<const double> values, double p, double eps,
                    const Interval& bounds, double sensitivity,
                    RandomSource& rng) {
  std::vector<double> sorted(values.begin(), values.end());
  for (double& v : sorted) v = std::clamp(v, bounds.lo, bounds.hi);
  std::sort(sorted.begin(), sorted.end());

  const std::vector<double> log_w =
      GapLogWeights(sorted, p, eps, bounds, sensitivity);
  const std::size_t gap = SampleFromLogWeights(log_w, rng);
  const std::size_t m = sorted.size();
  const double lo = gap == 0 ? bounds.lo : sorted[gap - 1];
  const double hi = gap == m ? bounds.hi : sorted[gap];
  return lo + rng.Uniform() * (hi - lo);
}

BudgetSchedule MakeBudgetSchedule(double total_eps, int levels) {
  if (levels < 1) throw DomainError("budget schedule needs at least one level");
  RequirePositive(total_eps, "schedule epsilon");
  std::vector<double> weights(static_cast<std::size_t>(levels));
  double norm = 0.0;
  for (int i = 0; i < levels; ++i) {
    weights[static_cast<std::size_t>(i)] = std::pow(2.0, 0.5 * i);
    norm += weights[static_cast<std::size_t>(i)];
  }
  for (double& w : weights) w = total_eps * w / norm;
  return BudgetSchedule{std::move(weights)};
}

}  // namespace dpm
