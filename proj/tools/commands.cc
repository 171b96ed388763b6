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

#include "commands.h"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "dpm/analysis.h"
#include "dpm/baselines.h"
#include "dpm/calibration.h"
#include "dpm/errors.h"
#include "dpm/metrics.h"
#include "dpm/parallel.h"
#include "dpm/result_io.h"

namespace dpm::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::optional<Interval> RangeOption(const std::vector<double>& range) {
  if (range.empty()) return std::nullopt;
  if (range.size() != 2) throw ConfigError("--range takes exactly two values: a b");
  return Interval{range[0], range[1]};
}

void CheckShares(const std::vector<double>& shares, std::size_t count,
                 const char* what) {
  if (shares.size() != count) {
    throw ConfigError(std::string(what) + " needs " + std::to_string(count) +
                      " shares");
  }
  double sum = 0.0;
  for (double s : shares) {
    if (!(s > 0.0)) throw DomainError(std::string(what) + " shares must be positive");
    sum += s;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw DomainError(std::string(what) + " shares must sum to 1");
  }
}

std::vector<double> ParseSplit(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse budget split '" + text + "'");
    }
  }
  return out;
}

LoadedData Load(const std::string& path, const std::vector<double>& range,
                const std::string& label_column) {
  return LoadDataset(path, RangeOption(range),
                     label_column.empty() ? std::nullopt
                                          : std::optional<std::string>(label_column));
}

json ReferenceJson(const std::vector<ReferenceRun>& runs) {
  json doc = {{"runs", json::array()}};
  for (const auto& r : runs) {
    doc["runs"].push_back({{"k", r.k},
                           {"restart", r.restart},
                           {"silhouette", r.silhouette},
                           {"centres", r.centres}});
  }
  return doc;
}

std::vector<Centres> References(const Dataset& data, const Labels* labels,
                                const ReferenceOptions& options) {
  std::vector<Centres> out;
  if (!options.reference.empty()) {
    std::ifstream in(options.reference);
    if (!in) throw ConfigError("cannot open reference file " + options.reference);
    try {
      json doc;
      in >> doc;
      for (const auto& r : doc.at("runs")) {
        out.push_back(r.at("centres").get<Centres>());
      }
    } catch (const json::exception& e) {
      throw ParseError("malformed reference file " + options.reference + ": " +
                           e.what(),
                       0);
    }
    if (out.empty()) throw ConfigError("reference file holds no runs");
    for (const auto& run : out) {
      for (const auto& c : run) {
        if (c.size() != data.dim()) {
          throw ConfigError("reference centres do not match the data dimension");
        }
      }
    }
    return out;
  }

  std::vector<std::size_t> ks = options.k_candidates;
  if (ks.empty()) {
    if (labels) {
      ks.push_back(std::set<std::int64_t>(labels->begin(), labels->end()).size());
    } else {
      for (std::size_t k = 2; k <= 16; ++k) ks.push_back(k);
    }
  }
  const auto runs = ReferenceRuns(data, ks, options.runs_per_k, options.top_l,
                                  options.seed);
  if (!options.save_reference.empty()) {
    std::ofstream f(options.save_reference);
    if (!f) throw ConfigError("cannot write " + options.save_reference);
    f << ReferenceJson(runs).dump(2) << '\n';
  }
  for (const auto& r : runs) out.push_back(r.centres);
  return out;
}

}  // namespace

DpmParams MakeParams(const FitOptions& o) {
  CheckShares(o.eps_split, 4, "epsilon split");
  CheckShares(o.delta_split, 2, "delta split");
  if (!(o.eps > 0.0)) throw DomainError("epsilon must be positive");
  if (o.delta && !(*o.delta > 0.0 && *o.delta <= 1.0)) {
    throw DomainError("delta must lie in (0, 1]");
  }
  DpmParams p;
  p.tau_r = o.tau_r;
  p.tau_e = o.tau_e;
  p.score.t = o.t;
  p.score.q = o.q;
  p.score.alpha = o.alpha;
  p.beta_override = o.beta;
  p.budget = PrivacyBudget::FromShares(o.eps, o.eps_split, o.delta.value_or(1.0),
                                       o.delta_split);
  p.auto_delta = !o.delta.has_value();
  p.delta_cnt_share = o.delta_split[0];
  p.sigmas = o.sigmas;
  p.seed = o.seed;
  p.Validate();
  return p;
}

json EchoConfig(const FitOptions& o) {
  json j = {{"tau_r", o.tau_r},
            {"t", o.t},
            {"q", o.q},
            {"alpha", o.alpha},
            {"eps", o.eps},
            {"eps_split", o.eps_split},
            {"delta_split", o.delta_split},
            {"sigmas", o.sigmas},
            {"seed", o.seed}};
  j["tau_e"] = o.tau_e ? json(*o.tau_e) : json("auto");
  j["beta"] = o.beta ? json(*o.beta) : json("estimated");
  j["delta"] = o.delta ? json(*o.delta) : json("auto");
  if (!o.range.empty()) j["range"] = o.range;
  if (!o.sigma_table.empty()) j["sigma_table"] = o.sigma_table;
  return j;
}

int RunGenerate(const GenerateOptions& o) {
  if (o.output.empty()) throw ConfigError("generate needs an output path (-o)");
  const auto range = RangeOption(o.range);
  if (!range) throw ConfigError("generate needs --range a b");
  MixtureConfig config;
  config.k = o.k;
  config.n = o.n;
  config.d = o.d;
  config.separation = o.separation;
  config.sigma = o.sigma;
  config.range = *range;
  config.seed = o.seed;
  const Mixture mix = GenerateMixture(config);
  WriteDataset(o.output, mix.dataset, &mix.labels);

  const json meta = {{"range", {range->lo, range->hi}},
                     {"d", o.d},
                     {"label_column", "label"},
                     {"k", o.k},
                     {"sigma", o.sigma},
                     {"separation", o.separation},
                     {"seed", o.seed},
                     {"means", mix.means}};
  const fs::path meta_path = MetadataPath(o.output);
  std::ofstream out(meta_path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + meta_path.string());
  out << meta.dump(2) << '\n';
  std::cout << "wrote " << mix.dataset.size() << " points to " << o.output
            << " and " << meta_path.string() << '\n';
  return 0;
}

int RunFit(const FitCommand& c) {
  if (c.output.empty()) throw ConfigError("fit needs an output path (-o)");
  const DpmParams params = MakeParams(c.fit);
  const LoadedData loaded = Load(c.data, c.fit.range, c.fit.label_column);

  std::optional<SigmaTable> cached;
  const bool use_cache = !c.fit.sigma_table.empty() && !c.fit.beta;
  if (use_cache && fs::exists(c.fit.sigma_table)) {
    cached = ReadSigmaTable(c.fit.sigma_table);
  }
  const ClusteringResult result =
      Fit(loaded.dataset, params, nullptr, cached ? &*cached : nullptr);
  if (use_cache && !cached && result.sigma_table) {
    WriteSigmaTable(c.fit.sigma_table, *result.sigma_table);
  }

  ResultDocument doc;
  doc.result = result;
  doc.seed = params.seed;
  doc.d = loaded.dataset.dim();
  doc.range = loaded.dataset.range();
  doc.config_echo = EchoConfig(c.fit);
  WriteResult(c.output, doc);

  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "k=" << result.k() << " beta=" << FormatDouble(result.beta)
            << " eps_total=" << FormatDouble(result.report.eps_total)
            << " delta_total=" << FormatDouble(result.report.delta_total)
            << " -> " << c.output << '\n';
  return 0;
}

int RunEvaluate(const EvaluateCommand& c) {
  if (c.results.empty()) throw ConfigError("evaluate needs at least one result");
  const LoadedData loaded = Load(c.data, c.range, c.label_column);
  const Dataset& data = loaded.dataset;
  const Labels* labels = loaded.labels ? &*loaded.labels : nullptr;

  std::vector<ResultDocument> docs;
  for (const auto& path : c.results) {
    docs.push_back(ReadResult(path));
    if (docs.back().d != data.dim()) {
      throw ConfigError(path + " was fitted on d = " +
                        std::to_string(docs.back().d) + " but " + c.data +
                        " has d = " + std::to_string(data.dim()));
    }
  }
  const std::vector<Centres> refs = References(data, labels, c.reference);

  std::vector<MetricsRow> rows;
  json reports = json::array();
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto& doc = docs[i];
    MetricsRow row;
    row.run_id = fs::path(c.results[i]).stem().string();
    row.seed = doc.seed;
    row.config_hash = ConfigHash(doc.config_echo);
    row.metrics = Evaluate(data, doc.result.centres, labels, &refs, c.silhouette_cap);
    if (c.squared) row.metrics.inertia = row.metrics.inertia_squared;
    row.eps_total = doc.result.report.eps_total;
    row.delta_total = doc.result.report.delta_total;
    reports.push_back({{"run_id", row.run_id}, {"metrics", ToJson(row.metrics)}});
    rows.push_back(std::move(row));
  }

  std::ostringstream csv;
  csv << kMetricsCsvHeader << '\n';
  for (const auto& row : rows) csv << FormatMetricsRow(row) << '\n';
  if (rows.size() > 1) {
    for (const auto& line : SummaryRows(rows)) csv << line << '\n';
  }
  if (c.output.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(c.output, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + c.output);
    out << csv.str();
  }
  if (!c.json_output.empty()) {
    std::ofstream out(c.json_output, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + c.json_output);
    out << reports.dump(2) << '\n';
  }
  return 0;
}

int RunSweep(const SweepCommand& c) {
  if (c.output.empty()) throw ConfigError("sweep needs an output path (-o)");
  if (c.eps_splits.empty() || c.t_values.empty() || c.q_values.empty() ||
      c.seeds.empty()) {
    throw ConfigError("sweep grid is empty");
  }
  std::vector<std::vector<double>> splits;
  for (const auto& s : c.eps_splits) splits.push_back(ParseSplit(s));

  const LoadedData loaded = Load(c.data, c.base.range, c.base.label_column);
  const Dataset& data = loaded.dataset;
  const Labels* labels = loaded.labels ? &*loaded.labels : nullptr;

  struct Cell {
    std::string run_id;
    FitOptions options;
  };
  std::vector<Cell> cells;
  std::size_t config_index = 0;
  for (const auto& split : splits) {
    for (double t : c.t_values) {
      for (double q : c.q_values) {
        for (std::uint64_t seed : c.seeds) {
          Cell cell;
          cell.run_id = "c" + std::to_string(config_index) + "-s" + std::to_string(seed);
          cell.options = c.base;
          cell.options.eps_split = split;
          cell.options.t = t;
          cell.options.q = q;
          cell.options.seed = seed;
          cells.push_back(std::move(cell));
        }
        ++config_index;
      }
    }
  }

  const std::string journal_path =
      c.journal.empty() ? c.output + ".journal" : c.journal;
  std::map<std::string, std::string> done;
  {
    std::ifstream in(journal_path);
    std::string line;
    while (std::getline(in, line)) {
      const auto comma = line.find(',');
      if (comma == std::string::npos) continue;
      done[line.substr(0, comma)] = line;
    }
  }
  std::size_t pending = 0;
  for (const auto& cell : cells) pending += done.count(cell.run_id) ? 0 : 1;
  std::cerr << cells.size() << " runs, " << cells.size() - pending
            << " already in " << journal_path << '\n';

  std::vector<Centres> refs;
  if (pending > 0) refs = References(data, labels, c.reference);

  std::ofstream journal(journal_path, std::ios::app | std::ios::binary);
  if (!journal) throw ConfigError("cannot write " + journal_path);
  std::mutex journal_mu;

  auto extra = [](const FitOptions& o, const char* status) {
    std::ostringstream s;
    s << ',' << FormatDouble(o.eps * o.eps_split.at(0)) << ','
      << FormatDouble(o.eps * o.eps_split.at(1)) << ','
      << FormatDouble(o.eps * o.eps_split.at(2)) << ','
      << FormatDouble(o.eps * o.eps_split.at(3)) << ',' << FormatDouble(o.t)
      << ',' << FormatDouble(o.q) << ',' << status;
    return s.str();
  };

  std::vector<std::string> rows(cells.size());
  internal::ParallelFor(cells.size(), [&](std::size_t i) {
    const Cell& cell = cells[i];
    if (auto it = done.find(cell.run_id); it != done.end()) {
      rows[i] = it->second;
      return;
    }
    const std::string hash = ConfigHash(EchoConfig(cell.options));
    std::string line;
    std::optional<DpmParams> params;
    try {
      if (cell.options.eps_split.size() != 4) {
        throw DomainError("epsilon split needs four shares");
      }
      params = MakeParams(cell.options);
    } catch (const DomainError&) {
      params.reset();
    }
    if (!params) {
      std::ostringstream s;
      s << cell.run_id << ',' << cell.options.seed << ',' << hash
        << ",,,,,,,,,";
      const bool four = cell.options.eps_split.size() == 4;
      line = s.str() + (four ? extra(cell.options, "invalid") : ",,,,,,invalid");
    } else {
      const auto start = std::chrono::steady_clock::now();
      const ClusteringResult result = Fit(data, *params);
      const double ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count();
      MetricsRow row;
      row.run_id = cell.run_id;
      row.seed = cell.options.seed;
      row.config_hash = hash;
      row.metrics = Evaluate(data, result.centres, labels, &refs, c.silhouette_cap);
      row.eps_total = result.report.eps_total;
      row.delta_total = result.report.delta_total;
      row.wall_ms = ms;
      line = FormatMetricsRow(row) + extra(cell.options, "ok");
    }
    std::lock_guard<std::mutex> lock(journal_mu);
    journal << line << '\n' << std::flush;
    rows[i] = std::move(line);
  });

  std::ofstream out(c.output, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + c.output);
  out << kMetricsCsvHeader << ",eps_int,eps_cnt,eps_exp,eps_avg,t,q,status\n";
  for (const auto& row : rows) out << row << '\n';
  std::cout << "wrote " << rows.size() << " rows to " << c.output << '\n';
  return 0;
}

int RunAnalyze(const AnalyzeCommand& c) {
  CheckShares(c.eps_split, 4, "epsilon split");
  CheckShares(c.delta_split, 2, "delta split");
  AnalysisConfig config;
  config.n = c.n;
  config.d = c.d;
  config.tau_r = c.tau_r;
  config.score.t = c.t;
  config.score.q = c.q;
  config.score.alpha = c.alpha;
  config.score.beta = c.beta;
  config.score.Validate();
  config.kappa = c.kappa;
  config.count_kappa = c.count_kappa;
  config.t_prime = c.t_prime;
  const auto range = RangeOption(c.range);
  if (!range) throw ConfigError("analyze needs --range a b");
  config.num_splits = c.num_splits.value_or(
      MakeSplitGrid(*range, c.d, c.beta).num_splits);
  const double n = static_cast<double>(c.n);
  const double delta = c.delta.value_or(1.0 / (n * std::sqrt(n)));
  const PrivacyBudget budget =
      PrivacyBudget::FromShares(c.eps, c.eps_split, delta, c.delta_split);
  const auto rows = AnalyzeLevels(config, budget);
  const PrivacyReport report = ComposePrivacy(budget, c.tau_r);

  const char* names[] = {"level",      "size",      "eps_cnt",
                         "eps_exp",    "lambda",    "delta_f",
                         "em_deficit", "cnt_tail",  "min_emptiness",
                         "central_deficit"};
  if (c.csv) {
    for (std::size_t i = 0; i < std::size(names); ++i) {
      std::cout << (i ? "," : "") << names[i];
    }
    std::cout << '\n';
    for (const auto& r : rows) {
      std::cout << r.level << ',' << FormatDouble(r.expected_size) << ','
                << FormatDouble(r.eps_cnt) << ',' << FormatDouble(r.eps_exp)
                << ',' << FormatDouble(r.lambda) << ','
                << FormatDouble(r.sensitivity) << ','
                << FormatDouble(r.em_deficit) << ','
                << FormatDouble(r.count_tail) << ','
                << FormatDouble(r.minimal_emptiness) << ','
                << FormatDouble(r.central_deficit) << '\n';
    }
    return 0;
  }
  std::cout << "n=" << c.n << " d=" << c.d << " tau_r=" << c.tau_r
            << " candidates=" << config.num_splits * c.d << " kappa=" << c.kappa
            << " count_kappa=" << c.count_kappa
            << "\neps_total=" << FormatDouble(report.eps_total)
            << " delta_total=" << FormatDouble(report.delta_total)
            << " delta_cnt_level=" << FormatDouble(report.delta_cnt_level) << "\n\n";
  for (const char* name : names) std::cout << std::setw(16) << name;
  std::cout << '\n';
  std::cout << std::setprecision(5);
  for (const auto& r : rows) {
    std::cout << std::setw(16) << r.level << std::setw(16) << r.expected_size
              << std::setw(16) << r.eps_cnt << std::setw(16) << r.eps_exp
              << std::setw(16) << r.lambda << std::setw(16) << r.sensitivity
              << std::setw(16) << r.em_deficit << std::setw(16) << r.count_tail
              << std::setw(16) << r.minimal_emptiness << std::setw(16)
              << r.central_deficit << '\n';
  }
  return 0;
}

}  // namespace dpm::cli
