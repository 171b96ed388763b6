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

// Differentially private clustering by recursive separation through sparse
// regions.
//
// Starting from the whole dataset, each node scores every split candidate,
// draws one with the exponential mechanism and cuts the node's points at
// that coordinate. Both halves get fresh noisy counts; if either falls below
// tau_e the cut is discarded and the node becomes a cluster, otherwise both
// halves recurse until depth tau_r. Every cluster is released as a noisy
// average together with its noisy count.
//
// Randomness is addressed by node path, so the result is a pure function of
// (seed, data, params) and independent of the order in which nodes run.

#ifndef DPM_CLUSTERING_H_
#define DPM_CLUSTERING_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpm/calibration.h"
#include "dpm/dataset.h"
#include "dpm/mechanisms.h"
#include "dpm/privacy.h"
#include "dpm/scoring.h"

namespace dpm {

struct DpmParams {
  int tau_r = 7;
  // Minimum noisy size of both halves; defaults to n_tilde / 2^tau_r.
  std::optional<double> tau_e;
  ScoreParams score;  // score.beta is ignored unless beta_override is set
  std::optional<double> beta_override;
  PrivacyBudget budget;
  // When set, delta = 1 / (n_tilde sqrt(n_tilde)) from the root count and
  // is split by delta_cnt_share; budget.delta_* are replaced.
  bool auto_delta = false;
  double delta_cnt_share = 0.2;
  std::vector<double> sigmas{30.0};
  std::uint64_t seed = 0;

  void Validate() const;
};

struct SplitDecision {
  std::size_t dimension = 0;
  double position = 0.0;
  int level = 0;
  bool applied = false;
  std::size_t chosen_flat_index = 0;
};

// Flat binary tree; nodes[0] is the root. A node has either two children or
// a leaf index into ClusteringResult::centres. Halting nodes that drew a
// split keep it with applied == false; depth-limited leaves have no decision.
struct SplitTreeNode {
  int level = 0;
  std::string path;
  double noisy_count = 0.0;
  std::optional<SplitDecision> decision;
  int left = -1;
  int right = -1;
  int leaf = -1;
};

struct ClusteringResult {
  std::vector<std::vector<double>> centres;
  std::vector<double> weights;  // noisy leaf sizes
  std::vector<SplitTreeNode> tree;
  PrivacyReport report;
  PrivacyBudget budget;  // effective budget (after auto delta)
  double beta = 0.0;
  std::optional<double> sigma_star;
  // Calibration table used for beta; kept in memory only.
  std::optional<SigmaTable> sigma_table;
  std::size_t num_splits = 0;
  double root_noisy_count = 0.0;
  double tau_e = 0.0;
  std::vector<std::string> warnings;

  std::size_t k() const { return centres.size(); }
};

// Runs the full algorithm. `ledger`, when given, receives one entry per
// budget-consuming call. `sigma_table` replaces the freshly built table.
ClusteringResult Fit(const Dataset& data, const DpmParams& params,
                     PrivacyLedger* ledger = nullptr,
                     const SigmaTable* sigma_table = nullptr);

// One split of a point subset, exposed for testing. `sorted` holds one
// index list per dimension, each ordered by that coordinate.
struct SplitOutcome {
  SplitDecision decision;
  std::vector<std::vector<std::uint32_t>> left;
  std::vector<std::vector<std::uint32_t>> right;
};

SplitOutcome SplitSubset(const Dataset& data,
                         const std::vector<std::vector<std::uint32_t>>& sorted,
                         const SplitGrid& grid, const ScoreParams& score,
                         double n_tilde, double lambda, double eps_exp,
                         int level, RandomSource& rng);

// All candidate scores of a subset, dimension-major.
std::vector<double> ScoreCandidates(
    const Dataset& data, const std::vector<std::vector<std::uint32_t>>& sorted,
    const SplitGrid& grid, const ScoreParams& score, double n_tilde);

// Index lists 0..n-1 ordered by each coordinate (ties by index).
std::vector<std::vector<std::uint32_t>> SortedProjections(const Dataset& data);

}  // namespace dpm

#endif  // DPM_CLUSTERING_H_
