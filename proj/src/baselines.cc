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

#include "dpm/baselines.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dpm/errors.h"
#include "dpm/random.h"
#include "dpm/parallel.h"

namespace dpm {
namespace {

Centres SeedPlusPlus(const Dataset& data, std::size_t k, RandomSource& rng) {
  const std::size_t n = data.size();
  Centres centres;
  centres.reserve(k);
  const auto first = data.point(rng.UniformInt(n));
  centres.emplace_back(first.begin(), first.end());
  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) {
    nearest[i] = SquaredDistance(data.point(i), centres[0]);
  }
  while (centres.size() < k) {
    double total = 0.0;
    for (double v : nearest) total += v;
    std::size_t chosen = 0;
    if (total > 0.0) {
      double target = rng.Uniform() * total;
      chosen = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        target -= nearest[i];
        if (target < 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = rng.UniformInt(n);
    }
    const auto p = data.point(chosen);
    centres.emplace_back(p.begin(), p.end());
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], SquaredDistance(data.point(i), centres.back()));
    }
  }
  return centres;
}

KMeansResult Lloyd(const Dataset& data, Centres centres, const KMeansConfig& config) {
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  const std::size_t k = centres.size();
  KMeansResult out;
  std::vector<std::size_t> assignment(n);
  std::vector<double> point_cost(n);
  for (int iter = 0; iter < config.max_iters; ++iter) {
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = data.point(i);
      std::size_t best = 0;
      double best_d = SquaredDistance(p, centres[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const double dist = SquaredDistance(p, centres[c]);
        if (dist < best_d) {
          best_d = dist;
          best = c;
        }
      }
      assignment[i] = best;
      point_cost[i] = best_d;
      objective += best_d;
    }
    out.history.push_back(objective);

    Centres updated(k, std::vector<double>(d, 0.0));
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = data.point(i);
      auto& u = updated[assignment[i]];
      for (std::size_t j = 0; j < d; ++j) u[j] += p[j];
      ++sizes[assignment[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] == 0) {
        // Reseed at the point currently paying the most.
        const std::size_t far = static_cast<std::size_t>(
            std::max_element(point_cost.begin(), point_cost.end()) -
            point_cost.begin());
        const auto p = data.point(far);
        updated[c].assign(p.begin(), p.end());
        point_cost[far] = 0.0;
        continue;
      }
      for (double& v : updated[c]) v /= static_cast<double>(sizes[c]);
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      shift = std::max(shift, Distance(updated[c], centres[c]));
    }
    centres = std::move(updated);
    out.iterations = iter + 1;
    if (shift <= config.tol) break;
  }
  out.centres = std::move(centres);
  out.inertia_squared = InertiaSquared(data, out.centres);
  return out;
}

}  // namespace

KMeansResult KMeansFit(const Dataset& data, const KMeansConfig& config) {
  if (config.k == 0) throw DomainError("k must be at least 1");
  if (config.k > data.size()) throw DomainError("k exceeds the number of points");
  if (config.max_iters < 1) throw DomainError("max_iters must be at least 1");
  KMeansResult best;
  best.inertia_squared = std::numeric_limits<double>::infinity();
  const RandomSource root(config.seed, "kmeans");
  for (int r = 0; r < std::max(1, config.n_init); ++r) {
    RandomSource rng = root.Derive(std::to_string(r));
    KMeansResult run = Lloyd(data, SeedPlusPlus(data, config.k, rng), config);
    if (run.inertia_squared < best.inertia_squared) best = std::move(run);
  }
  return best;
}

std::vector<ReferenceRun> ReferenceRuns(const Dataset& data,
                                        const std::vector<std::size_t>& k_candidates,
                                        int runs_per_k, std::size_t top_l,
                                        std::uint64_t seed) {
  if (k_candidates.empty()) throw DomainError("no k candidates");
  if (runs_per_k < 1) throw DomainError("runs_per_k must be at least 1");
  std::vector<ReferenceRun> runs;
  for (std::size_t k : k_candidates) {
    if (k == 0 || k > data.size()) continue;
    for (int r = 0; r < runs_per_k; ++r) runs.push_back({k, r, 0.0, {}});
  }
  if (runs.empty()) throw DomainError("no feasible k candidate");

  const RandomSource root(seed, "reference");
  internal::ParallelFor(runs.size(), [&](std::size_t i) {
    auto& run = runs[i];
    KMeansConfig config;
    config.k = run.k;
    config.seed = DeriveStreamSeed(
        seed, "kmeans/" + std::to_string(run.k) + "/" + std::to_string(run.restart));
    run.centres = KMeansFit(data, config).centres;
    run.silhouette = Silhouette(data, run.centres);
  });
  std::stable_sort(runs.begin(), runs.end(),
                   [](const ReferenceRun& a, const ReferenceRun& b) {
                     return a.silhouette > b.silhouette;
                   });
  if (runs.size() > top_l) runs.resize(top_l);
  return runs;
}

Mixture GenerateMixture(const MixtureConfig& config) {
  if (config.k == 0) throw DomainError("k must be at least 1");
  if (config.d == 0) throw DomainError("d must be at least 1");
  if (config.n < config.k) throw DomainError("n must be at least k");
  if (!(config.sigma > 0.0)) throw DomainError("sigma must be positive");
  if (!(config.separation >= 0.0)) throw DomainError("separation must be non-negative");
  if (!(config.range.lo < config.range.hi)) throw DomainError("range must satisfy a < b");

  const RandomSource root(config.seed, "mixture");
  const double margin = std::min(3.0 * config.sigma, 0.25 * config.range.width());
  const double lo = config.range.lo + margin;
  const double hi = config.range.hi - margin;
  const double min_dist = config.separation * config.sigma;

  constexpr int kAttempts = 100;
  constexpr int kTriesPerMean = 1000;
  Centres means;
  bool placed = false;
  for (int attempt = 0; attempt < kAttempts && !placed; ++attempt) {
    RandomSource rng = root.Derive("means/" + std::to_string(attempt));
    means.clear();
    placed = true;
    for (std::size_t c = 0; c < config.k && placed; ++c) {
      bool ok = false;
      std::vector<double> mean(config.d);
      for (int t = 0; t < kTriesPerMean && !ok; ++t) {
        for (double& v : mean) v = lo + rng.Uniform() * (hi - lo);
        ok = true;
        for (const auto& other : means) {
          if (Distance(mean, other) < min_dist) {
            ok = false;
            break;
          }
        }
      }
      if (ok) {
        means.push_back(mean);
      } else {
        placed = false;
      }
    }
  }
  if (!placed) {
    throw DomainError("cannot place the requested means with the given "
                      "separation inside the range");
  }

  const std::size_t per = config.n / config.k;
  std::vector<double> coords;
  coords.reserve(per * config.k * config.d);
  Labels labels;
  labels.reserve(per * config.k);
  RandomSource rng = root.Derive("points");
  for (std::size_t c = 0; c < config.k; ++c) {
    for (std::size_t i = 0; i < per; ++i) {
      for (std::size_t j = 0; j < config.d; ++j) {
        const double x = means[c][j] + config.sigma * rng.StandardNormal();
        coords.push_back(std::clamp(x, config.range.lo, config.range.hi));
      }
      labels.push_back(static_cast<std::int64_t>(c));
    }
  }
  return Mixture{Dataset(std::move(coords), config.d, config.range),
                 std::move(labels), std::move(means)};
}

}  // namespace dpm
