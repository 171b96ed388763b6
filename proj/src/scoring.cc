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

#include "dpm/scoring.h"

#include <algorithm>
#include <cmath>

#include "dpm/errors.h"

namespace dpm {

void ScoreParams::Validate() const {
  if (!(q > 0.0) || !(t >= 2.0 * q) || !(t <= 1.0)) {
    throw DomainError("centreness parameters need t >= 2q > 0 and t <= 1");
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DomainError("alpha must be positive");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw DomainError("beta must be positive");
  }
}

SplitGrid MakeSplitGrid(const Interval& range, std::size_t dim, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive");
  if (!(range.lo < range.hi)) throw DomainError("range must satisfy a < b");
  if (dim == 0) throw DomainError("dimension must be at least 1");
  // The relative slack keeps exact multiples like 1 / 0.25 from rounding up.
  const double ratio = range.width() / beta;
  const double splits = std::ceil(ratio * (1.0 - 1e-12));
  return SplitGrid{range, dim, beta,
                   static_cast<std::size_t>(std::max(1.0, splits))};
}

std::vector<SplitCandidate> GenerateCandidates(const Interval& range,
                                               std::size_t dim, double beta) {
  const SplitGrid grid = MakeSplitGrid(range, dim, beta);
  std::vector<SplitCandidate> out;
  out.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.push_back(DecodeSplitIndex(i, grid));
  }
  return out;
}

SplitCandidate DecodeSplitIndex(std::size_t flat_index, const SplitGrid& grid) {
  if (flat_index >= grid.size()) {
    throw DomainError("split index outside the candidate grid");
  }
  SplitCandidate c;
  c.flat_index = flat_index;
  c.dimension = flat_index / grid.num_splits;
  c.position = grid.position(flat_index % grid.num_splits);
  c.lo = c.position - 0.5 * grid.beta;
  c.hi = c.position + 0.5 * grid.beta;
  return c;
}

std::size_t CountInInterval(std::span<const double> sorted_axis, double lo,
                            double hi) {
  const auto first = std::lower_bound(sorted_axis.begin(), sorted_axis.end(), lo);
  const auto last = std::upper_bound(first, sorted_axis.end(), hi);
  return static_cast<std::size_t>(last - first);
}

double Emptiness(std::span<const double> sorted_axis,
                 const SplitCandidate& cand, double n_tilde) {
  const double count =
      static_cast<double>(CountInInterval(sorted_axis, cand.lo, cand.hi));
  return 1.0 - count / std::max(n_tilde, 1.0);
}

std::size_t RankOf(double position, std::span<const double> sorted_axis) {
  return static_cast<std::size_t>(
      std::lower_bound(sorted_axis.begin(), sorted_axis.end(), position) -
      sorted_axis.begin());
}

double Centreness(double rank, double n_tilde, double t, double q) {
  if (!(q > 0.0) || !(t >= 2.0 * q) || !(t <= 1.0)) {
    throw DomainError("centreness parameters need t >= 2q > 0 and t <= 1");
  }
  const double m = std::max(n_tilde, 1.0);
  const double r = std::clamp(rank, 0.0, m);
  const double half = 0.5 * m;
  const double depth = half - std::abs(r - half);  // distance to nearer end
  const double knee = m * q;
  if (r <= knee || r >= m - knee) {
    return depth * t / knee;
  }
  return (t - 2.0 * q) / (1.0 - 2.0 * q) + depth * (1.0 - t) / (half - knee);
}

double Score(std::span<const double> sorted_axis, const SplitCandidate& cand,
             double n_tilde, const ScoreParams& params) {
  const double rank = static_cast<double>(RankOf(cand.position, sorted_axis));
  return Centreness(rank, n_tilde, params.t, params.q) +
         params.alpha * Emptiness(sorted_axis, cand, n_tilde);
}

double ScoreSensitivity(const ScoreParams& params, double n_tilde,
                        double lambda) {
  return (params.t / params.q + params.alpha) / std::max(n_tilde - lambda, 1.0);
}

void ScoreAxis(std::span<const double> sorted_axis, const SplitGrid& grid,
               double n_tilde, const ScoreParams& params,
               std::span<double> out) {
  const double m = std::max(n_tilde, 1.0);
  const std::size_t n = sorted_axis.size();
  std::size_t first_ge_lo = 0;   // first value >= lo
  std::size_t first_gt_hi = 0;   // first value > hi
  std::size_t first_ge_pos = 0;  // rank of position
  for (std::size_t j = 0; j < grid.num_splits; ++j) {
    const double position = grid.position(j);
    const double lo = position - 0.5 * grid.beta;
    const double hi = position + 0.5 * grid.beta;
    while (first_ge_lo < n && sorted_axis[first_ge_lo] < lo) ++first_ge_lo;
    while (first_ge_pos < n && sorted_axis[first_ge_pos] < position) ++first_ge_pos;
    if (first_gt_hi < first_ge_lo) first_gt_hi = first_ge_lo;
    while (first_gt_hi < n && sorted_axis[first_gt_hi] <= hi) ++first_gt_hi;
    const double inside = static_cast<double>(first_gt_hi - first_ge_lo);
    out[j] = Centreness(static_cast<double>(first_ge_pos), n_tilde, params.t,
                        params.q) +
             params.alpha * (1.0 - inside / m);
  }
}

}  // namespace dpm
