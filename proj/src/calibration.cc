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

#include "dpm/calibration.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include <json.hpp>
#include "dpm/errors.h"
#include "dpm/mechanisms.h"

namespace dpm {

std::vector<double> NeighbourGaps(std::span<const double> axis) {
  if (axis.size() < 2) throw DomainError("neighbour gaps need at least two values");
  std::vector<double> sorted(axis.begin(), axis.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> gaps(sorted.size() - 1);
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    gaps[i] = std::abs(sorted[i + 1] - sorted[i]);
  }
  return gaps;
}

std::vector<double> AveragedGapProfile(std::span<const double> coords,
                                       std::size_t n, std::size_t d) {
  if (n < 2) throw DomainError("gap profile needs at least two points");
  if (d == 0 || coords.size() != n * d) throw DomainError("gap profile: bad shape");
  std::vector<double> profile(n - 1, 0.0);
  std::vector<double> column(n);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < n; ++i) column[i] = coords[i * d + j];
    std::sort(column.begin(), column.end());
    for (std::size_t i = 0; i + 1 < n; ++i) {
      profile[i] += column[i + 1] - column[i];
    }
  }
  for (double& g : profile) g /= static_cast<double>(d);
  return profile;
}

std::vector<double> AveragedGapProfile(const Dataset& data) {
  return AveragedGapProfile(data.coords(), data.size(), data.dim());
}

double Percentile(std::vector<double> values, double p) {
  if (values.empty()) throw DomainError("percentile of an empty sequence");
  if (!(p >= 0.0 && p <= 100.0)) throw DomainError("percentile must lie in [0, 100]");
  const double pos = p / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  std::nth_element(values.begin(), values.begin() + lo, values.end());
  const double lo_value = values[lo];
  double hi_value = lo_value;
  if (hi != lo) {
    hi_value = *std::min_element(values.begin() + lo + 1, values.end());
  }
  return lo_value + (pos - static_cast<double>(lo)) * (hi_value - lo_value);
}

SigmaTable BuildSigmaTable(std::span<const double> sigmas, double n_tilde,
                           std::size_t d, const RandomSource& rng) {
  if (sigmas.empty()) throw DomainError("sigma table needs at least one sigma");
  if (d == 0) throw DomainError("sigma table needs d >= 1");
  const double floored = std::floor(n_tilde);
  if (!(floored >= 2.0)) {
    throw DomainError("sigma table needs a noisy count of at least 2");
  }
  const auto n = static_cast<std::size_t>(floored);

  SigmaTable table;
  table.n = n;
  table.d = d;
  std::vector<double> sample(n * d);
  for (std::size_t s = 0; s < sigmas.size(); ++s) {
    const double sigma = sigmas[s];
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
      throw DomainError("sigma candidates must be positive");
    }
    for (const auto& e : table.entries) {
      if (e.sigma == sigma) throw DomainError("sigma candidates must be unique");
    }
    RandomSource stream = rng.Derive("sigma/" + std::to_string(s));
    for (double& x : sample) x = sigma * stream.StandardNormal();
    table.entries.push_back(
        {sigma, Percentile(AveragedGapProfile(sample, n, d), kGapPercentile)});
  }
  return table;
}

double NearestSigma(const SigmaTable& table, double percentile) {
  if (table.entries.empty()) throw DomainError("empty sigma table");
  const SigmaTable::Entry* best = nullptr;
  double best_diff = 0.0;
  for (const auto& e : table.entries) {
    const double diff = std::abs(e.percentile - percentile);
    if (best == nullptr || diff < best_diff ||
        (diff == best_diff && e.sigma < best->sigma)) {
      best = &e;
      best_diff = diff;
    }
  }
  return best->sigma;
}

IntervalEstimate EstimateIntervalSize(const Dataset& data, double n_tilde,
                                      double eps_int,
                                      std::span<const double> sigmas,
                                      const RandomSource& rng,
                                      const SigmaTable* table) {
  if (data.size() < 2) throw DomainError("interval size needs at least two points");
  SigmaTable built;
  if (table == nullptr) {
    built = BuildSigmaTable(sigmas, n_tilde, data.dim(), rng.Derive("table"));
    table = &built;
  } else if (table->d != data.dim()) {
    throw ConfigError("sigma table was built for d = " + std::to_string(table->d) +
                      ", data has d = " + std::to_string(data.dim()));
  }
  const std::vector<double> profile = AveragedGapProfile(data);
  RandomSource percentile_rng = rng.Derive("percentile");
  const double private_p =
      DpPercentile(profile, kGapPercentile, eps_int,
                   Interval{0.0, data.range().width()},
                   kGapPercentileSensitivity, percentile_rng);
  const double sigma = NearestSigma(*table, private_p);
  return IntervalEstimate{0.5 * sigma, sigma, private_p, *table};
}

double MinimalEmptiness(int level, double base_fill) {
  return 1.0 - base_fill * std::pow(2.0, level);
}

void WriteSigmaTable(const std::filesystem::path& path, const SigmaTable& table) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& e : table.entries) {
    doc.push_back({{"sigma", e.sigma},
                   {"percentile", e.percentile},
                   {"n", table.n},
                   {"d", table.d}});
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

SigmaTable ReadSigmaTable(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sigma table " + path.string());
  SigmaTable table;
  try {
    nlohmann::json doc;
    in >> doc;
    for (const auto& e : doc) {
      table.entries.push_back(
          {e.at("sigma").get<double>(), e.at("percentile").get<double>()});
      table.n = e.at("n").get<std::size_t>();
      table.d = e.at("d").get<std::size_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed sigma table " + path.string() + ": " + e.what());
  }
  if (table.entries.empty()) throw ConfigError("sigma table " + path.string() + " is empty");
  return table;
}

}  // namespace dpm
