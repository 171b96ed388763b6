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

#ifndef DPM_METRICS_H_
#define DPM_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dpm/dataset.h"

namespace dpm {

using Centres = std::vector<std::vector<double>>;

inline constexpr std::size_t kDefaultSilhouetteCap = 5000;
inline constexpr std::uint64_t kDefaultSilhouetteSeed = 0x5111;

struct MetricReport {
  std::size_t k = 0;
  double inertia = 0.0;
  double inertia_squared = 0.0;
  double silhouette = -1.0;
  std::size_t silhouette_sample = 0;  // points the silhouette was computed on
  std::optional<double> accuracy;
  std::optional<double> kmeans_distance;
  std::optional<double> kmeans_distance_normalized;
};

double Distance(std::span<const double> a, std::span<const double> b);
double SquaredDistance(std::span<const double> a, std::span<const double> b);

// Nearest centre per point; ties go to the lowest index.
std::vector<std::size_t> Assign(const Dataset& data, const Centres& centres);

// Sum of (unsquared) distances to the assigned centre.
double Inertia(const Dataset& data, const Centres& centres);

// Sum of squared distances, the usual k-means objective.
double InertiaSquared(const Dataset& data, const Centres& centres);

// Mean silhouette of the nearest-centre partition, on at most
// `subsample_cap` points drawn without replacement with `seed`. Returns -1
// when fewer than two clusters are present. Singleton clusters use a(x) = 0.
double Silhouette(const Dataset& data, const Centres& centres,
                  std::size_t subsample_cap = kDefaultSilhouetteCap,
                  std::uint64_t seed = kDefaultSilhouetteSeed);

// Silhouette of an explicit partition over all points.
double SilhouetteOfPartition(const Dataset& data,
                             std::span<const std::size_t> assignment);

// Fraction of points whose label equals the majority label of their cluster
// (ties to the smaller label).
double Accuracy(const Dataset& data, const Labels& labels,
                const Centres& centres);

// Mean over reference runs of the summed distance from each private centre
// to its nearest reference centre.
double KMeansDistance(const std::vector<Centres>& reference_runs,
                      const Centres& private_centres);

// raw / (k_priv * radius) with radius = (b - a) / 2 * sqrt(d).
double KMeansDistanceNormalized(double raw_kd, std::size_t k_priv,
                                const Interval& range, std::size_t d);

MetricReport Evaluate(const Dataset& data, const Centres& centres,
                      const Labels* labels,
                      const std::vector<Centres>* reference_runs,
                      std::size_t subsample_cap = kDefaultSilhouetteCap);

}  // namespace dpm

#endif  // DPM_METRICS_H_
