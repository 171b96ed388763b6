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

#ifndef DPM_DATASET_H_
#define DPM_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dpm {

// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double width() const { return hi - lo; }
  double midpoint() const { return lo + 0.5 * (hi - lo); }
  bool contains(double x) const { return lo <= x && x <= hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

// An n x d point set with a public coordinate range. Every coordinate lies
// in the range; the constructor rejects anything else. Storage is row-major.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<double> coords, std::size_t dim, Interval range);

  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  const Interval& range() const { return range_; }
  bool empty() const { return coords_.empty(); }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  double at(std::size_t i, std::size_t j) const {
    return coords_[i * dim_ + j];
  }
  std::span<const double> coords() const { return coords_; }

  // Copies column j.
  std::vector<double> axis(std::size_t j) const;

  // Points selected by index, same range.
  Dataset subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<double> coords_;
  std::size_t dim_ = 1;
  Interval range_;
};

using Labels = std::vector<std::int64_t>;

struct LoadedData {
  Dataset dataset;
  std::optional<Labels> labels;
};

// Sidecar path for a dataset file: "dir/name.csv" -> "dir/name.meta.json".
// Shortest decimal text that parses back to the same double.
std::string FormatDouble(double value);

std::filesystem::path MetadataPath(const std::filesystem::path& csv_path);

// Loads a CSV of numeric rows. The first line is treated as a header when it
// is not entirely numeric. If `range` is absent it is read from the sidecar;
// it is never inferred from the data. When `label_column` names a header
// column (or the sidecar declares one), that column is split off as labels.
//
// Throws ParseError, ValidationError or ConfigError.
LoadedData LoadDataset(const std::filesystem::path& path,
                       std::optional<Interval> range = std::nullopt,
                       std::optional<std::string> label_column = std::nullopt);

// Writes the CSV (header x0..x{d-1}[,label]) with round-trip precision.
void WriteDataset(const std::filesystem::path& path, const Dataset& dataset,
                  const Labels* labels);

}  // namespace dpm

#endif  // DPM_DATASET_H_
