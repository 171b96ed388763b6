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

#include "dpm/dataset.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

#include <json.hpp>
#include "dpm/errors.h"

namespace dpm {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(Trim(line.substr(start)));
      break;
    }
    fields.push_back(Trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

std::optional<double> ParseDouble(std::string_view field) {
  if (field.empty()) return std::nullopt;
  if (field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    return std::nullopt;
  }
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

struct Metadata {
  std::optional<Interval> range;
  std::optional<std::size_t> dim;
  std::optional<std::string> label_column;
};

Metadata ReadMetadata(const std::filesystem::path& csv_path) {
  Metadata meta;
  const auto path = MetadataPath(csv_path);
  std::ifstream in(path);
  if (!in) return meta;
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse metadata " + path.string() + ": " + e.what());
  }
  try {
    if (doc.contains("range")) {
      const auto& r = doc["range"];
      if (!r.is_array() || r.size() != 2 || !r[0].is_number() ||
          !r[1].is_number()) {
        throw ConfigError("metadata range must be [a, b] in " + path.string());
      }
      meta.range = Interval{r[0].get<double>(), r[1].get<double>()};
    }
    if (doc.contains("d")) meta.dim = doc["d"].get<std::size_t>();
    if (doc.contains("label_column") && doc["label_column"].is_string()) {
      meta.label_column = doc["label_column"].get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed metadata " + path.string() + ": " + e.what());
  }
  return meta;
}

}  // namespace

Dataset::Dataset(std::vector<double> coords, std::size_t dim, Interval range)
    : coords_(std::move(coords)), dim_(dim), range_(range) {
  if (dim_ == 0) throw ValidationError("dataset dimension must be at least 1");
  if (!(range_.lo < range_.hi) || !std::isfinite(range_.lo) ||
      !std::isfinite(range_.hi)) {
    throw ValidationError("dataset range must satisfy a < b");
  }
  if (coords_.size() % dim_ != 0) {
    throw ValidationError("coordinate count is not a multiple of d");
  }
  for (std::size_t k = 0; k < coords_.size(); ++k) {
    if (!range_.contains(coords_[k])) {
      std::ostringstream msg;
      msg << "point " << k / dim_ << " coordinate " << k % dim_ << " = "
          << coords_[k] << " lies outside the range [" << range_.lo << ", "
          << range_.hi << "]";
      throw ValidationError(msg.str());
    }
  }
}

std::vector<double> Dataset::axis(std::size_t j) const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i, j);
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<double> coords;
  coords.reserve(indices.size() * dim_);
  for (std::size_t i : indices) {
    const auto p = point(i);
    coords.insert(coords.end(), p.begin(), p.end());
  }
  return Dataset(std::move(coords), dim_, range_);
}

std::string FormatDouble(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::filesystem::path MetadataPath(const std::filesystem::path& csv_path) {
  auto out = csv_path;
  out.replace_extension(".meta.json");
  return out;
}

LoadedData LoadDataset(const std::filesystem::path& path,
                       std::optional<Interval> range,
                       std::optional<std::string> label_column) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset " + path.string());

  const Metadata meta = ReadMetadata(path);
  if (!range) range = meta.range;
  if (!range) {
    throw ConfigError("no range given for " + path.string() +
                      " and no range in " + MetadataPath(path).string());
  }
  if (!label_column) label_column = meta.label_column;

  std::vector<std::string> header;
  std::optional<std::size_t> label_index;
  std::optional<std::size_t> columns;
  std::vector<double> coords;
  Labels labels;

  std::string line;
  std::size_t row = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++row;
    if (Trim(line).empty()) continue;
    const auto fields = SplitFields(line);

    if (first) {
      first = false;
      bool numeric = true;
      for (auto f : fields) numeric = numeric && ParseDouble(f).has_value();
      if (!numeric) {
        for (auto f : fields) header.emplace_back(f);
        columns = header.size();
        if (label_column) {
          for (std::size_t c = 0; c < header.size(); ++c) {
            if (header[c] == *label_column) label_index = c;
          }
          if (!label_index) {
            throw ConfigError("label column '" + *label_column +
                              "' not found in header of " + path.string());
          }
        }
        continue;
      }
    }

    if (!columns) columns = fields.size();
    if (fields.size() != *columns) {
      std::ostringstream msg;
      msg << path.string() << " row " << row << ": expected " << *columns
          << " fields, found " << fields.size();
      throw ParseError(msg.str(), row);
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto value = ParseDouble(fields[c]);
      if (!value) {
        std::ostringstream msg;
        msg << path.string() << " row " << row << " field " << c
            << ": not a number: '" << fields[c] << "'";
        throw ParseError(msg.str(), row);
      }
      if (label_index && c == *label_index) {
        labels.push_back(static_cast<std::int64_t>(std::llround(*value)));
      } else {
        coords.push_back(*value);
      }
    }
  }

  if (label_column && !label_index && header.empty()) {
    throw ConfigError("label column '" + *label_column + "' requested but " +
                      path.string() + " has no header");
  }
  // A headerless file with one column more than the declared d carries a
  // trailing label column.
  if (!label_index && columns && meta.dim && *columns == *meta.dim + 1) {
    const std::size_t width = *columns;
    std::vector<double> kept;
    kept.reserve(coords.size() / width * *meta.dim);
    for (std::size_t k = 0; k < coords.size(); ++k) {
      if (k % width == width - 1) {
        labels.push_back(static_cast<std::int64_t>(std::llround(coords[k])));
      } else {
        kept.push_back(coords[k]);
      }
    }
    coords = std::move(kept);
    label_index = width - 1;
  }

  std::size_t dim = columns.value_or(meta.dim.value_or(1));
  if (label_index) --dim;
  if (dim == 0) throw ValidationError(path.string() + " has no coordinate columns");
  if (meta.dim && *meta.dim != dim) {
    std::ostringstream msg;
    msg << path.string() << " has " << dim << " coordinate columns but metadata"
        << " declares d = " << *meta.dim;
    throw ValidationError(msg.str());
  }

  LoadedData out{Dataset(std::move(coords), dim, *range), std::nullopt};
  if (label_index) out.labels = std::move(labels);
  return out;
}

void WriteDataset(const std::filesystem::path& path, const Dataset& dataset,
                  const Labels* labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  for (std::size_t j = 0; j < dataset.dim(); ++j) {
    if (j) out << ',';
    out << 'x' << j;
  }
  if (labels) out << ",label";
  out << '\n';
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    for (std::size_t j = 0; j < dataset.dim(); ++j) {
      if (j) out << ',';
      out << FormatDouble(dataset.at(i, j));
    }
    if (labels) out << ',' << (*labels)[i];
    out << '\n';
  }
}

}  // namespace dpm
