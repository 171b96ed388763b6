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

// Private estimation of the split interval size beta.
//
// For every candidate sigma a synthetic isotropic Gaussian sample of the
// (noisy) data size is drawn and the 65th percentile of its dimension-averaged
// neighbour gaps is recorded. The same statistic is then computed privately
// on the real data, and beta = sigma* / 2 for the sigma whose recorded
// percentile is nearest.

#ifndef DPM_CALIBRATION_H_
#define DPM_CALIBRATION_H_

#include <filesystem>
#include <span>
#include <vector>

#include "dpm/dataset.h"
#include "dpm/random.h"

namespace dpm {

inline constexpr double kGapPercentile = 65.0;
// Neighbour gaps move by at most two ranks when one point is added.
inline constexpr double kGapPercentileSensitivity = 2.0;

struct SigmaTable {
  struct Entry {
    double sigma = 0.0;
    double percentile = 0.0;
  };
  std::vector<Entry> entries;
  std::size_t n = 0;  // synthetic sample size used
  std::size_t d = 0;
};

// Consecutive differences of the sorted values. Needs at least two values.
std::vector<double> NeighbourGaps(std::span<const double> axis);

// Element-wise mean over dimensions of NeighbourGaps of each column.
std::vector<double> AveragedGapProfile(const Dataset& data);

// Same as above for a raw row-major n x d array.
std::vector<double> AveragedGapProfile(std::span<const double> coords,
                                       std::size_t n, std::size_t d);

// Non-private percentile with linear interpolation between order statistics.
double Percentile(std::vector<double> values, double p);

// One entry per sigma from floor(n_tilde) synthetic N(0, sigma^2 I_d) points.
// Each sigma draws from rng.Derive("sigma/<index>").
SigmaTable BuildSigmaTable(std::span<const double> sigmas, double n_tilde,
                           std::size_t d, const RandomSource& rng);

// Nearest recorded percentile in absolute difference; ties go to the
// smaller sigma.
double NearestSigma(const SigmaTable& table, double percentile);

struct IntervalEstimate {
  double beta = 0.0;
  double sigma = 0.0;
  double private_percentile = 0.0;
  SigmaTable table;  // the table the choice was made from
};

// The real data is touched only through DpPercentile on its gap profile.
// When `table` is null the table is built from rng.Derive("table").
IntervalEstimate EstimateIntervalSize(const Dataset& data, double n_tilde,
                                      double eps_int,
                                      std::span<const double> sigmas,
                                      const RandomSource& rng,
                                      const SigmaTable* table = nullptr);

// Expected minimal emptiness at a recursion level: 1 - base_fill * 2^level.
double MinimalEmptiness(int level, double base_fill);

void WriteSigmaTable(const std::filesystem::path& path, const SigmaTable& table);
SigmaTable ReadSigmaTable(const std::filesystem::path& path);

}  // namespace dpm

#endif  // DPM_CALIBRATION_H_
