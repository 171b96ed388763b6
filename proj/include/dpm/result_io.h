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

// Result documents (JSON) and per-run metric rows (CSV).

#ifndef DPM_RESULT_IO_H_
#define DPM_RESULT_IO_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpm/clustering.h"
#include "dpm/metrics.h"

namespace dpm {

struct ResultDocument {
  ClusteringResult result;
  std::uint64_t seed = 0;
  std::size_t d = 0;
  Interval range;
  nlohmann::json config_echo = nlohmann::json::object();
};

nlohmann::json ToJson(const ResultDocument& doc);
ResultDocument FromJson(const nlohmann::json& j);

// Serialized form; stable for equal documents, so reading and rewriting a
// file reproduces it byte for byte.
std::string SerializeResult(const ResultDocument& doc);
ResultDocument ParseResult(const std::string& text);

void WriteResult(const std::filesystem::path& path, const ResultDocument& doc);
ResultDocument ReadResult(const std::filesystem::path& path);

nlohmann::json ToJson(const MetricReport& report);

struct MetricsRow {
  std::string run_id;
  std::uint64_t seed = 0;
  std::string config_hash;
  MetricReport metrics;
  double eps_total = 0.0;
  double delta_total = 0.0;
  std::optional<double> wall_ms;
};

inline constexpr const char* kMetricsCsvHeader =
    "run_id,seed,config_hash,k,inertia,silhouette,accuracy,kd,kd_norm,"
    "eps_total,delta_total,wall_ms";

// One CSV line without the trailing newline; absent values are empty cells.
std::string FormatMetricsRow(const MetricsRow& row);

// Mean and sample standard deviation per numeric column, as two rows with
// run_id "mean" and "std".
std::vector<std::string> SummaryRows(const std::vector<MetricsRow>& rows);

// Hex FNV-1a of the canonical JSON dump.
std::string ConfigHash(const nlohmann::json& config);

}  // namespace dpm

#endif  // DPM_RESULT_IO_H_
