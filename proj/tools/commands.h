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

// Subcommand implementations behind the `dpm` executable.

#ifndef DPM_TOOLS_COMMANDS_H_
#define DPM_TOOLS_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpm/clustering.h"
#include "dpm/dataset.h"

namespace dpm::cli {

struct GenerateOptions {
  std::size_t k = 8;
  std::size_t n = 20000;
  std::size_t d = 10;
  double separation = 10.0;
  double sigma = 30.0;
  std::vector<double> range{-1000.0, 1000.0};
  std::uint64_t seed = 0;
  std::string output;
};

// Everything that shapes a single DPM run.
struct FitOptions {
  std::vector<double> range;  // empty: take it from the sidecar
  std::string label_column;
  std::uint64_t seed = 0;
  int tau_r = 7;
  std::optional<double> tau_e;
  double t = 0.3;
  double q = 1.0 / 12.0;
  double alpha = 5.0;
  std::optional<double> beta;
  double eps = 1.0;
  std::vector<double> eps_split{0.04, 0.18, 0.18, 0.6};
  std::optional<double> delta;  // unset: 1 / (n sqrt(n)) from the noisy count
  std::vector<double> delta_split{0.2, 0.8};
  std::vector<double> sigmas{30.0};
  std::string sigma_table;
};

struct FitCommand {
  std::string data;
  std::string output;
  FitOptions fit;
};

struct ReferenceOptions {
  std::string reference;       // load runs from this file
  std::string save_reference;  // write computed runs here
  std::vector<std::size_t> k_candidates;
  int runs_per_k = 20;
  std::size_t top_l = 20;
  std::uint64_t seed = 0;
};

struct EvaluateCommand {
  std::string data;
  std::vector<std::string> results;
  std::vector<double> range;
  std::string label_column;
  ReferenceOptions reference;
  std::size_t silhouette_cap = 5000;
  bool squared = false;
  std::string output;  // CSV; stdout when empty
  std::string json_output;
};

struct SweepCommand {
  std::string data;
  FitOptions base;
  std::vector<std::string> eps_splits;  // each "int,cnt,exp,avg"
  std::vector<double> t_values;
  std::vector<double> q_values;
  std::vector<std::uint64_t> seeds;
  ReferenceOptions reference;
  std::size_t silhouette_cap = 5000;
  std::string output;
  std::string journal;  // defaults to output + ".journal"
};

struct AnalyzeCommand {
  std::size_t n = 100000;
  std::size_t d = 10;
  int tau_r = 7;
  double t = 0.3;
  double q = 1.0 / 12.0;
  double alpha = 5.0;
  std::optional<std::size_t> num_splits;
  std::vector<double> range{-1000.0, 1000.0};
  double beta = 15.0;
  double kappa = 3.0;
  double count_kappa = 200.0;
  double t_prime = 0.3;
  double eps = 1.0;
  std::vector<double> eps_split{0.04, 0.18, 0.18, 0.6};
  std::optional<double> delta;
  std::vector<double> delta_split{0.2, 0.8};
  bool csv = false;
};

// Validates the options and maps them onto library parameters.
DpmParams MakeParams(const FitOptions& options);
nlohmann::json EchoConfig(const FitOptions& options);

int RunGenerate(const GenerateOptions& options);
int RunFit(const FitCommand& command);
int RunEvaluate(const EvaluateCommand& command);
int RunSweep(const SweepCommand& command);
int RunAnalyze(const AnalyzeCommand& command);

}  // namespace dpm::cli

#endif  // DPM_TOOLS_COMMANDS_H_
