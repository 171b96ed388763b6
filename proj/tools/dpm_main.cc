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

// dpm: generate, fit, evaluate, sweep, analyze.
//
// Exit codes: 0 success, 1 data error, 2 usage or configuration error.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.h"
#include "dpm/errors.h"

namespace {

using dpm::cli::FitOptions;

constexpr int kDataError = 1;
constexpr int kUsageError = 2;

// Every subcommand accepts --config FILE with flat `key = value` lines.
// Keys are long option names; '_' and '-' are interchangeable. Flags given
// on the command line win over the file.
void AddConfig(CLI::App* app, std::string& path) {
  app->add_option("--config", path, "TOML-style key = value file");
}

void ApplyConfig(CLI::App* app, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dpm::ConfigError("cannot open config file " + path);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    throw dpm::ConfigError("cannot parse config file " + path + ": " + e.what());
  }
  for (const auto& item : items) {
    if (item.name.empty() || item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty() &&
        !(item.parents.size() == 1 && item.parents[0] == app->get_name())) {
      continue;  // belongs to another subcommand's section
    }
    std::string key = item.name;
    std::replace(key.begin(), key.end(), '_', '-');
    CLI::Option* opt = app->get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config") {
      throw dpm::ConfigError("unknown key '" + item.name + "' in " + path);
    }
    if (opt->count() > 0) continue;
    try {
      opt->add_result(item.inputs);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw dpm::ConfigError("bad value for '" + item.name + "' in " + path +
                             ": " + e.what());
    }
  }
}

void AddFitOptions(CLI::App* app, FitOptions& o, bool with_seed) {
  app->add_option("--range", o.range, "Public data range a b (else from sidecar)")
      ->expected(2);
  app->add_option("--label-column", o.label_column, "Label column name");
  if (with_seed) app->add_option("--seed", o.seed, "Master seed");
  app->add_option("--tau-r", o.tau_r, "Maximum recursion depth")->capture_default_str();
  app->add_option("--tau-e", o.tau_e, "Minimum noisy cluster size (default n~/2^tau_r)");
  app->add_option("--t", o.t, "Centreness t")->capture_default_str();
  app->add_option("--q", o.q, "Centreness q")->capture_default_str();
  app->add_option("--alpha", o.alpha, "Emptiness weight")->capture_default_str();
  app->add_option("--beta", o.beta, "Split interval size; skips calibration");
  app->add_option("--eps", o.eps, "Total epsilon")->capture_default_str();
  app->add_option("--eps-split", o.eps_split, "Shares for int cnt exp avg")
      ->expected(4)
      ->capture_default_str();
  app->add_option("--delta", o.delta, "Total delta (default 1/(n sqrt n))");
  app->add_option("--delta-split", o.delta_split, "Shares for cnt avg")
      ->expected(2)
      ->capture_default_str();
  app->add_option("--sigmas", o.sigmas, "Calibration sigma candidates")
      ->capture_default_str();
  app->add_option("--sigma-table", o.sigma_table,
                  "Cached calibration table (read if present, else written)");
}

void AddReferenceOptions(CLI::App* app, dpm::cli::ReferenceOptions& r) {
  app->add_option("--reference", r.reference, "Reference KMeans runs (JSON)");
  app->add_option("--save-reference", r.save_reference,
                  "Write computed reference runs here");
  app->add_option("--ref-k", r.k_candidates,
                  "Reference k candidates (default: label count, else 2..16)");
  app->add_option("--ref-runs", r.runs_per_k, "Restarts per k")->capture_default_str();
  app->add_option("--ref-top", r.top_l, "Runs kept by silhouette")->capture_default_str();
  app->add_option("--ref-seed", r.seed, "Seed for the reference runs");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private clustering by recursive separation"};
  app.require_subcommand(1);
  std::string config_path;

  dpm::cli::GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Write a labelled Gaussian mixture");
  AddConfig(generate, config_path);
  generate->add_option("--k", gen.k, "Number of Gaussians")->capture_default_str();
  generate->add_option("--n", gen.n, "Number of points")->capture_default_str();
  generate->add_option("--d", gen.d, "Dimensions")->capture_default_str();
  generate->add_option("--separation", gen.separation,
                       "Minimum mean distance in sigmas")->capture_default_str();
  generate->add_option("--sigma", gen.sigma, "Per-axis standard deviation")
      ->capture_default_str();
  generate->add_option("--range", gen.range, "Range a b")->expected(2)->capture_default_str();
  generate->add_option("--seed", gen.seed, "Seed");
  generate->add_option("-o,--output", gen.output, "Output CSV")->required();

  dpm::cli::FitCommand fit;
  auto* fit_cmd = app.add_subcommand("fit", "Run DPM on a CSV dataset");
  AddConfig(fit_cmd, config_path);
  fit_cmd->add_option("data", fit.data, "Dataset CSV")->required();
  fit_cmd->add_option("-o,--output", fit.output, "Result JSON")->required();
  AddFitOptions(fit_cmd, fit.fit, true);

  dpm::cli::EvaluateCommand eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score result documents");
  AddConfig(eval_cmd, config_path);
  eval_cmd->add_option("data", eval.data, "Dataset CSV")->required();
  eval_cmd->add_option("results", eval.results, "Result JSON files")->required();
  eval_cmd->add_option("--range", eval.range, "Public data range a b")->expected(2);
  eval_cmd->add_option("--label-column", eval.label_column, "Label column name");
  AddReferenceOptions(eval_cmd, eval.reference);
  eval_cmd->add_option("--silhouette-cap", eval.silhouette_cap,
                       "Silhouette subsample size (0 = all)")->capture_default_str();
  eval_cmd->add_flag("--squared", eval.squared, "Report squared inertia");
  eval_cmd->add_option("-o,--output", eval.output, "Metrics CSV (default stdout)");
  eval_cmd->add_option("--json", eval.json_output, "Metrics JSON");

  dpm::cli::SweepCommand sweep;
  sweep.eps_splits = {"0.04,0.18,0.18,0.6"};
  sweep.t_values = {0.3};
  sweep.q_values = {1.0 / 12.0};
  sweep.seeds = {0};
  auto* sweep_cmd = app.add_subcommand("sweep", "Grid of fits, one CSV row per run");
  AddConfig(sweep_cmd, config_path);
  sweep_cmd->add_option("data", sweep.data, "Dataset CSV")->required();
  sweep_cmd->add_option("-o,--output", sweep.output, "Long-form CSV")->required();
  AddFitOptions(sweep_cmd, sweep.base, false);
  sweep_cmd->add_option("--eps-splits", sweep.eps_splits,
                        "Budget splits, each \"int,cnt,exp,avg\"");
  sweep_cmd->add_option("--t-values", sweep.t_values, "Grid over t");
  sweep_cmd->add_option("--q-values", sweep.q_values, "Grid over q");
  sweep_cmd->add_option("--seeds", sweep.seeds, "Seeds per configuration");
  AddReferenceOptions(sweep_cmd, sweep.reference);
  sweep_cmd->add_option("--silhouette-cap", sweep.silhouette_cap,
                        "Silhouette subsample size (0 = all)")->capture_default_str();
  sweep_cmd->add_option("--journal", sweep.journal, "Resume journal (default OUTPUT.journal)");

  dpm::cli::AnalyzeCommand an;
  auto* analyze = app.add_subcommand("analyze", "Print per-level utility bounds");
  AddConfig(analyze, config_path);
  analyze->add_option("--n", an.n, "Dataset size")->capture_default_str();
  analyze->add_option("--d", an.d, "Dimensions")->capture_default_str();
  analyze->add_option("--tau-r", an.tau_r, "Maximum recursion depth")->capture_default_str();
  analyze->add_option("--t", an.t, "Centreness t")->capture_default_str();
  analyze->add_option("--q", an.q, "Centreness q")->capture_default_str();
  analyze->add_option("--alpha", an.alpha, "Emptiness weight")->capture_default_str();
  analyze->add_option("--range", an.range, "Range a b")->expected(2)->capture_default_str();
  analyze->add_option("--beta", an.beta, "Split interval size")->capture_default_str();
  analyze->add_option("--num-splits", an.num_splits, "Candidates per dimension");
  analyze->add_option("--kappa", an.kappa, "Tail parameter")->capture_default_str();
  analyze->add_option("--count-kappa", an.count_kappa,
                      "Count deviation for the Laplace tail bound")->capture_default_str();
  analyze->add_option("--t-prime", an.t_prime, "Centrality level t'")->capture_default_str();
  analyze->add_option("--eps", an.eps, "Total epsilon")->capture_default_str();
  analyze->add_option("--eps-split", an.eps_split, "Shares for int cnt exp avg")
      ->expected(4);
  analyze->add_option("--delta", an.delta, "Total delta (default 1/(n sqrt n))");
  analyze->add_option("--delta-split", an.delta_split, "Shares for cnt avg")->expected(2);
  analyze->add_flag("--csv", an.csv, "CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (!config_path.empty()) {
      for (CLI::App* sub : app.get_subcommands()) ApplyConfig(sub, config_path);
    }
    if (*generate) return dpm::cli::RunGenerate(gen);
    if (*fit_cmd) return dpm::cli::RunFit(fit);
    if (*eval_cmd) return dpm::cli::RunEvaluate(eval);
    if (*sweep_cmd) return dpm::cli::RunSweep(sweep);
    if (*analyze) return dpm::cli::RunAnalyze(an);
  } catch (const dpm::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const dpm::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const dpm::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const dpm::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}
