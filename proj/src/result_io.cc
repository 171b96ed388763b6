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

#include "dpm/result_io.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dpm/errors.h"

namespace dpm {
namespace {

using nlohmann::json;

json BudgetJson(const PrivacyBudget& b) {
  return {{"eps_int", b.eps_int},     {"eps_cnt", b.eps_cnt},
          {"eps_exp", b.eps_exp},     {"eps_avg", b.eps_avg},
          {"delta_cnt", b.delta_cnt}, {"delta_avg", b.delta_avg}};
}

PrivacyBudget BudgetFromJson(const json& j) {
  PrivacyBudget b;
  b.eps_int = j.at("eps_int").get<double>();
  b.eps_cnt = j.at("eps_cnt").get<double>();
  b.eps_exp = j.at("eps_exp").get<double>();
  b.eps_avg = j.at("eps_avg").get<double>();
  b.delta_cnt = j.at("delta_cnt").get<double>();
  b.delta_avg = j.at("delta_avg").get<double>();
  return b;
}

json ReportJson(const PrivacyReport& r) {
  return {{"eps_total", r.eps_total},
          {"delta_total", r.delta_total},
          {"eps_int", r.eps_int},
          {"eps_avg", r.eps_avg},
          {"eps_unspent", r.eps_unspent},
          {"delta_cnt_level", r.delta_cnt_level},
          {"delta_avg", r.delta_avg},
          {"per_level_eps_cnt", r.per_level_eps_cnt},
          {"per_level_eps_exp", r.per_level_eps_exp},
          {"per_level_lambda", r.per_level_lambda}};
}

PrivacyReport ReportFromJson(const json& j) {
  PrivacyReport r;
  r.eps_total = j.at("eps_total").get<double>();
  r.delta_total = j.at("delta_total").get<double>();
  r.eps_int = j.at("eps_int").get<double>();
  r.eps_avg = j.at("eps_avg").get<double>();
  r.eps_unspent = j.at("eps_unspent").get<double>();
  r.delta_cnt_level = j.at("delta_cnt_level").get<double>();
  r.delta_avg = j.at("delta_avg").get<double>();
  r.per_level_eps_cnt = j.at("per_level_eps_cnt").get<std::vector<double>>();
  r.per_level_eps_exp = j.at("per_level_eps_exp").get<std::vector<double>>();
  r.per_level_lambda = j.at("per_level_lambda").get<std::vector<double>>();
  return r;
}

json TreeJson(const ClusteringResult& result, int id) {
  const auto& node = result.tree.at(static_cast<std::size_t>(id));
  json j = {{"level", node.level},
            {"path", node.path},
            {"noisy_count", node.noisy_count}};
  if (node.decision) {
    j["dimension"] = node.decision->dimension;
    j["position"] = node.decision->position;
    j["applied"] = node.decision->applied;
    j["chosen_flat_index"] = node.decision->chosen_flat_index;
  } else {
    j["applied"] = false;
  }
  if (node.left >= 0) {
    j["children"] = json::array(
        {TreeJson(result, node.left), TreeJson(result, node.right)});
  } else {
    const auto leaf = static_cast<std::size_t>(node.leaf);
    j["leaf"] = {{"index", node.leaf},
                 {"centre", result.centres.at(leaf)},
                 {"weight", result.weights.at(leaf)}};
  }
  return j;
}

// Rebuilds the flat tree in the breadth-first order Fit produces.
void TreeFromJson(const json& root, ClusteringResult& result) {
  std::vector<const json*> queue{&root};
  result.tree.clear();
  result.tree.emplace_back();
  std::size_t leaves = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const json& j = *queue[head];
    SplitTreeNode& node = result.tree[head];
    node.level = j.at("level").get<int>();
    node.path = j.at("path").get<std::string>();
    node.noisy_count = j.at("noisy_count").get<double>();
    if (j.contains("dimension")) {
      SplitDecision d;
      d.dimension = j.at("dimension").get<std::size_t>();
      d.position = j.at("position").get<double>();
      d.level = node.level;
      d.applied = j.at("applied").get<bool>();
      d.chosen_flat_index = j.at("chosen_flat_index").get<std::size_t>();
      node.decision = d;
    }
    if (j.contains("children")) {
      const json& kids = j.at("children");
      if (kids.size() != 2) throw ParseError("split node needs two children", 0);
      for (int side = 0; side < 2; ++side) {
        const int child = static_cast<int>(result.tree.size());
        (side == 0 ? result.tree[head].left : result.tree[head].right) = child;
        queue.push_back(&kids[static_cast<std::size_t>(side)]);
        result.tree.emplace_back();
      }
    } else {
      const json& leaf = j.at("leaf");
      result.tree[head].leaf = leaf.at("index").get<int>();
      ++leaves;
    }
  }
  result.centres.assign(leaves, {});
  result.weights.assign(leaves, 0.0);
  for (std::size_t id = 0; id < result.tree.size(); ++id) {
    const int leaf = result.tree[id].leaf;
    if (leaf < 0) continue;
    if (static_cast<std::size_t>(leaf) >= leaves) {
      throw ParseError("leaf index out of range", 0);
    }
    const json& l = queue[id]->at("leaf");
    result.centres[static_cast<std::size_t>(leaf)] =
        l.at("centre").get<std::vector<double>>();
    result.weights[static_cast<std::size_t>(leaf)] = l.at("weight").get<double>();
  }
}

json OptionalJson(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::string Cell(const std::optional<double>& v) {
  return v ? FormatDouble(*v) : std::string();
}

}  // namespace

json ToJson(const ResultDocument& doc) {
  const ClusteringResult& r = doc.result;
  json j;
  j["format"] = "dpm-result/1";
  j["seed"] = doc.seed;
  j["d"] = doc.d;
  j["range"] = {doc.range.lo, doc.range.hi};
  j["k"] = r.k();
  j["centres"] = r.centres;
  j["weights"] = r.weights;
  j["split_tree"] = r.tree.empty() ? json(nullptr) : TreeJson(r, 0);
  j["privacy_report"] = ReportJson(r.report);
  j["budget"] = BudgetJson(r.budget);
  j["beta"] = r.beta;
  j["sigma_star"] = OptionalJson(r.sigma_star);
  j["num_splits"] = r.num_splits;
  j["root_noisy_count"] = r.root_noisy_count;
  j["tau_e"] = r.tau_e;
  j["warnings"] = r.warnings;
  j["config_echo"] = doc.config_echo;
  return j;
}

ResultDocument FromJson(const json& j) {
  try {
    ResultDocument doc;
    doc.seed = j.at("seed").get<std::uint64_t>();
    doc.d = j.at("d").get<std::size_t>();
    const auto range = j.at("range").get<std::vector<double>>();
    if (range.size() != 2) throw ParseError("range needs two values", 0);
    doc.range = Interval{range[0], range[1]};
    ClusteringResult& r = doc.result;
    if (!j.at("split_tree").is_null()) TreeFromJson(j.at("split_tree"), r);
    // Top-level centres are authoritative; the tree copy must agree.
    const auto centres = j.at("centres").get<Centres>();
    const auto weights = j.at("weights").get<std::vector<double>>();
    if (!r.tree.empty() && (centres != r.centres || weights != r.weights)) {
      throw ParseError("split tree disagrees with centres/weights", 0);
    }
    r.centres = centres;
    r.weights = weights;
    r.report = ReportFromJson(j.at("privacy_report"));
    r.budget = BudgetFromJson(j.at("budget"));
    r.beta = j.at("beta").get<double>();
    if (!j.at("sigma_star").is_null()) r.sigma_star = j.at("sigma_star").get<double>();
    r.num_splits = j.at("num_splits").get<std::size_t>();
    r.root_noisy_count = j.at("root_noisy_count").get<double>();
    r.tau_e = j.at("tau_e").get<double>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    doc.config_echo = j.at("config_echo");
    for (const auto& c : r.centres) {
      if (c.size() != doc.d) throw ParseError("centre dimension mismatch", 0);
    }
    return doc;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed result document: ") + e.what(), 0);
  }
}

std::string SerializeResult(const ResultDocument& doc) {
  return ToJson(doc).dump(2) + "\n";
}

ResultDocument ParseResult(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("result is not valid JSON: ") + e.what(), 0);
  }
  return FromJson(j);
}

void WriteResult(const std::filesystem::path& path, const ResultDocument& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << SerializeResult(doc);
  if (!out) throw ConfigError("failed writing " + path.string());
}

ResultDocument ReadResult(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseResult(buf.str());
}

nlohmann::json ToJson(const MetricReport& m) {
  return {{"k", m.k},
          {"inertia", m.inertia},
          {"inertia_squared", m.inertia_squared},
          {"silhouette", m.silhouette},
          {"silhouette_sample", m.silhouette_sample},
          {"accuracy", OptionalJson(m.accuracy)},
          {"kmeans_distance", OptionalJson(m.kmeans_distance)},
          {"kmeans_distance_normalized", OptionalJson(m.kmeans_distance_normalized)}};
}

std::string FormatMetricsRow(const MetricsRow& row) {
  std::ostringstream out;
  out << row.run_id << ',' << row.seed << ',' << row.config_hash << ','
      << row.metrics.k << ',' << FormatDouble(row.metrics.inertia) << ','
      << FormatDouble(row.metrics.silhouette) << ',' << Cell(row.metrics.accuracy)
      << ',' << Cell(row.metrics.kmeans_distance) << ','
      << Cell(row.metrics.kmeans_distance_normalized) << ','
      << FormatDouble(row.eps_total) << ',' << FormatDouble(row.delta_total) << ','
      << Cell(row.wall_ms);
  return out.str();
}

std::vector<std::string> SummaryRows(const std::vector<MetricsRow>& rows) {
  using Getter = std::optional<double> (*)(const MetricsRow&);
  const Getter columns[] = {
      [](const MetricsRow& r) -> std::optional<double> {
        return static_cast<double>(r.metrics.k);
      },
      [](const MetricsRow& r) -> std::optional<double> { return r.metrics.inertia; },
      [](const MetricsRow& r) -> std::optional<double> { return r.metrics.silhouette; },
      [](const MetricsRow& r) { return r.metrics.accuracy; },
      [](const MetricsRow& r) { return r.metrics.kmeans_distance; },
      [](const MetricsRow& r) { return r.metrics.kmeans_distance_normalized; },
      [](const MetricsRow& r) -> std::optional<double> { return r.eps_total; },
      [](const MetricsRow& r) -> std::optional<double> { return r.delta_total; },
      [](const MetricsRow& r) { return r.wall_ms; },
  };
  std::string mean = "mean,,";
  std::string stddev = "std,,";
  for (const Getter get : columns) {
    double sum = 0.0;
    double sq = 0.0;
    std::size_t count = 0;
    for (const auto& r : rows) {
      if (const auto v = get(r)) {
        sum += *v;
        sq += *v * *v;
        ++count;
      }
    }
    mean += ',';
    stddev += ',';
    if (count == 0) continue;
    const double m = sum / static_cast<double>(count);
    mean += FormatDouble(m);
    if (count > 1) {
      const double var =
          std::max(0.0, (sq - static_cast<double>(count) * m * m) /
                            static_cast<double>(count - 1));
      stddev += FormatDouble(std::sqrt(var));
    } else {
      stddev += FormatDouble(0.0);
    }
  }
  return {mean, stddev};
}

std::string ConfigHash(const nlohmann::json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dpm
