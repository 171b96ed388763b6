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

// Non-private reference clustering and synthetic data.

#ifndef DPM_BASELINES_H_
#define DPM_BASELINES_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dpm/dataset.h"
#include "dpm/metrics.h"

namespace dpm {

struct KMeansConfig {
  std::size_t k = 8;
  int max_iters = 300;
  int n_init = 1;
  double tol = 1e-6;  // stop when no centre moves further than this
  std::uint64_t seed = 0;
};

struct KMeansResult {
  Centres centres;
  double inertia_squared = 0.0;
  int iterations = 0;
  // Objective after each assignment step of the kept restart.
  std::vector<double> history;
};

// k-means++ seeding followed by Lloyd iterations; the best of n_init
// restarts by squared inertia. Clusters that empty out are reseeded at the
// point farthest from its centre. Throws DomainError when k > n or k == 0.
KMeansResult KMeansFit(const Dataset& data, const KMeansConfig& config);

struct ReferenceRun {
  std::size_t k = 0;
  int restart = 0;
  double silhouette = 0.0;
  Centres centres;
};

// Runs KMeans for every candidate k and restart, ranks the runs by
// (subsampled) silhouette and keeps the best top_l.
std::vector<ReferenceRun> ReferenceRuns(const Dataset& data,
                                        const std::vector<std::size_t>& k_candidates,
                                        int runs_per_k, std::size_t top_l,
                                        std::uint64_t seed);

struct Mixture {
  Dataset dataset;
  Labels labels;
  Centres means;
};

struct MixtureConfig {
  std::size_t k = 8;
  std::size_t n = 20000;
  std::size_t d = 10;
  double separation = 10.0;  // minimum pairwise mean distance, in sigmas
  double sigma = 30.0;
  Interval range{-1000.0, 1000.0};
  std::uint64_t seed = 0;
};

// k * floor(n / k) points, floor(n / k) per Gaussian, clipped to the range.
// Means are uniform in the range shrunk by 3 sigma and rejected until every
// pair is at least separation * sigma apart. Throws DomainError when no such
// placement is found.
Mixture GenerateMixture(const MixtureConfig& config);

}  // namespace dpm

#endif  // DPM_BASELINES_H_
