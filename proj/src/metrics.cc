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

#include "dpm/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "dpm/errors.h"
#include "dpm/random.h"

namespace dpm {
namespace {

void RequireCentres(const Dataset& data, const Centres& centres) {
  if (centres.empty()) throw DomainError("at least one centre is required");
  for (const auto& c : centres) {
    if (c.size() != data.dim()) throw DomainError("centre dimension mismatch");
  }
}

}  // namespace

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

double Distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(SquaredDistance(a, b));
}

std::vector<std::size_t> Assign(const Dataset& data, const Centres& centres) {
  RequireCentres(data, centres);
  std::vector<std::size_t> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto p = data.point(i);
    std::size_t best = 0;
    double best_d = SquaredDistance(p, centres[0]);
    for (std::size_t c = 1; c < centres.size(); ++c) {
      const double dist = SquaredDistance(p, centres[c]);
      if (dist < best_d) {
        best_d = dist;
        best = c;
      }
    }
    out[i] = best;
  }
  return out;
}

double Inertia(const Dataset& data, const Centres& centres) {
  const auto assignment = Assign(data, centres);
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    total += Distance(data.point(i), centres[assignment[i]]);
  }
  return total;
}

double InertiaSquared(const Dataset& data, const Centres& centres) {
  const auto assignment = Assign(data, centres);
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    total += SquaredDistance(data.point(i), centres[assignment[i]]);
  }
  return total;
}

double SilhouetteOfPartition(const Dataset& data,
                             std::span<const std::size_t> assignment) {
  const std::size_t n = data.size();
  if (assignment.size() != n) throw DomainError("assignment length mismatch");
  if (n == 0) return -1.0;

  // Relabel to dense cluster ids.
  std::map<std::size_t, std::size_t> dense;
  for (std::size_t c : assignment) dense.emplace(c, 0);
  if (dense.size() < 2) return -1.0;
  std::size_t next = 0;
  for (auto& [c, id] : dense) id = next++;
  const std::size_t k = dense.size();
  std::vector<std::size_t> label(n);
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    label[i] = dense[assignment[i]];
    ++sizes[label[i]];
  }

  std::vector<double> dist_sum(k);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(dist_sum.begin(), dist_sum.end(), 0.0);
    const auto p = data.point(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) dist_sum[label[j]] += Distance(p, data.point(j));
    }
    const std::size_t own = label[i];
    const double a = sizes[own] > 1
                         ? dist_sum[own] / static_cast<double>(sizes[own] - 1)
                         : 0.0;
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c != own) b = std::min(b, dist_sum[c] / static_cast<double>(sizes[c]));
    }
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(n);
}

double Silhouette(const Dataset& data, const Centres& centres,
                  std::size_t subsample_cap, std::uint64_t seed) {
  RequireCentres(data, centres);
  if (centres.size() < 2) return -1.0;
  const std::size_t n = data.size();
  if (subsample_cap == 0 || n <= subsample_cap) {
    const auto assignment = Assign(data, centres);
    return SilhouetteOfPartition(data, assignment);
  }
  // Partial Fisher-Yates for a uniform subset without replacement.
  RandomSource rng(seed, "silhouette");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < subsample_cap; ++i) {
    const std::size_t j = i + rng.UniformInt(n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(subsample_cap);
  std::sort(idx.begin(), idx.end());
  const Dataset sample = data.subset(idx);
  const auto assignment = Assign(sample, centres);
  return SilhouetteOfPartition(sample, assignment);
}

double Accuracy(const Dataset& data, const Labels& labels,
                const Centres& centres) {
  if (labels.size() != data.size()) {
    throw DomainError("label count does not match point count");
  }
  if (data.size() == 0) return 0.0;
  const auto assignment = Assign(data, centres);
  std::vector<std::map<std::int64_t, std::size_t>> votes(centres.size());
  for (std::size_t i = 0; i < data.size(); ++i) ++votes[assignment[i]][labels[i]];
  std::size_t correct = 0;
  for (const auto& v : votes) {
    std::size_t best = 0;
    for (const auto& [label, count] : v) best = std::max(best, count);
    correct += best;  // majority size, whichever label wins the tie
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double KMeansDistance(const std::vector<Centres>& reference_runs,
                      const Centres& private_centres) {
  if (reference_runs.empty()) throw DomainError("no reference runs");
  double total = 0.0;
  for (const auto& run : reference_runs) {
    if (run.empty()) throw DomainError("empty reference centre set");
    for (const auto& c : private_centres) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& r : run) {
        if (r.size() != c.size()) throw DomainError("centre dimension mismatch");
        best = std::min(best, Distance(c, r));
      }
      total += best;
    }
  }
  return total / static_cast<double>(reference_runs.size());
}

double KMeansDistanceNormalized(double raw_kd, std::size_t k_priv,
                                const Interval& range, std::size_t d) {
  if (k_priv == 0) throw DomainError("k_priv must be at least 1");
  const double radius = 0.5 * range.width() * std::sqrt(static_cast<double>(d));
  return raw_kd / (static_cast<double>(k_priv) * radius);
}

MetricReport Evaluate(const Dataset& data, const Centres& centres,
                      const Labels* labels,
                      const std::vector<Centres>* reference_runs,
                      std::size_t subsample_cap) {
  MetricReport r;
  r.k = centres.size();
  r.inertia = Inertia(data, centres);
  r.inertia_squared = InertiaSquared(data, centres);
  r.silhouette = Silhouette(data, centres, subsample_cap);
  r.silhouette_sample =
      subsample_cap == 0 ? data.size() : std::min(data.size(), subsample_cap);
  if (labels) r.accuracy = Accuracy(data, *labels, centres);
  if (reference_runs && !reference_runs->empty()) {
    r.kmeans_distance = KMeansDistance(*reference_runs, centres);
    r.kmeans_distance_normalized = KMeansDistanceNormalized(
        *r.kmeans_distance, centres.size(), data.range(), data.dim());
  }
  return r;
}

}  // namespace dpm
