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

// Split candidates and the score that rates them.
//
// Each dimension of the range [a, b] is tiled by intervals of width beta; the
// centre of every interval is a candidate. A candidate's score adds
//
//   centreness  how close its rank is to the median (piecewise linear, with
//               knees at the q and 1 - q quantiles, value t at the knees)
//   emptiness   1 - (points inside its interval) / n_tilde, weighted by alpha.

#ifndef DPM_SCORING_H_
#define DPM_SCORING_H_

#include <cstddef>
#include <span>
#include <vector>

#include "dpm/dataset.h"

namespace dpm {

struct ScoreParams {
  double t = 0.3;
  double q = 1.0 / 12.0;
  double alpha = 5.0;
  double beta = 1.0;

  // Throws DomainError unless 2q > 0, t >= 2q, t <= 1, alpha > 0, beta > 0.
  void Validate() const;
};

// The candidate lattice of one run.
struct SplitGrid {
  Interval range;
  std::size_t dim = 1;
  double beta = 1.0;
  std::size_t num_splits = 1;  // candidates per dimension

  std::size_t size() const { return dim * num_splits; }
  double position(std::size_t j) const {
    return range.lo + (static_cast<double>(j) + 0.5) * beta;
  }
};

struct SplitCandidate {
  std::size_t dimension = 0;
  double position = 0.0;
  double lo = 0.0;  // position - beta / 2
  double hi = 0.0;  // position + beta / 2
  std::size_t flat_index = 0;
};

// ceil((b - a) / beta) candidates per dimension; at least one.
SplitGrid MakeSplitGrid(const Interval& range, std::size_t dim, double beta);

// Dimension-major enumeration: flat_index = dimension * num_splits + j.
std::vector<SplitCandidate> GenerateCandidates(const Interval& range,
                                               std::size_t dim, double beta);

// Inverse of the enumeration above. Throws DomainError when out of bounds.
SplitCandidate DecodeSplitIndex(std::size_t flat_index, const SplitGrid& grid);

// Number of sorted values in [lo, hi].
std::size_t CountInInterval(std::span<const double> sorted_axis, double lo,
                            double hi);

// 1 - |s| / n_tilde with n_tilde clamped to at least 1. Not clamped below.
double Emptiness(std::span<const double> sorted_axis,
                 const SplitCandidate& cand, double n_tilde);

// Number of values strictly below `position`.
std::size_t RankOf(double position, std::span<const double> sorted_axis);

// Two-piece centreness of a rank; ranks outside [0, n_tilde] are clamped.
double Centreness(double rank, double n_tilde, double t, double q);

double Score(std::span<const double> sorted_axis, const SplitCandidate& cand,
             double n_tilde, const ScoreParams& params);

// (t / q + alpha) / max(n_tilde - lambda, 1).
double ScoreSensitivity(const ScoreParams& params, double n_tilde,
                        double lambda);

// Scores of the grid's candidates for one dimension, writing
// grid.num_splits values into `out`. Linear in |axis| + num_splits.
void ScoreAxis(std::span<const double> sorted_axis, const SplitGrid& grid,
               double n_tilde, const ScoreParams& params,
               std::span<double> out);

}  // namespace dpm

#endif  // DPM_SCORING_H_
