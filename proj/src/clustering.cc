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

#include "dpm/clustering.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "dpm/errors.h"
#include "dpm/parallel.h"

namespace dpm {
namespace {

using IndexLists = std::vector<std::vector<std::uint32_t>>;

// A node waiting to be processed at the current level.
struct Pending {
  int node = -1;
  IndexLists sorted;
  NoisyCount count;
};

// What processing one node produced.
struct NodeOutcome {
  std::optional<SplitDecision> decision;
  bool is_leaf = true;
  IndexLists leaf_members;  // set when is_leaf
  Pending left;
  Pending right;
};

struct RunContext {
  const Dataset* data = nullptr;
  const DpmParams* params = nullptr;
  SplitGrid grid;
  ScoreParams score;
  double tau_e = 0.0;
  PrivacyReport report;
  RandomSource root{0};
  PrivacyLedger* ledger = nullptr;
};

void Record(PrivacyLedger* ledger, std::string mechanism, int level,
            std::string node, double eps, double delta = 0.0) {
  if (ledger) {
    ledger->Record({std::move(mechanism), level, std::move(node), eps, delta});
  }
}

NodeOutcome ProcessNode(const RunContext& ctx, const SplitTreeNode& node,
                        Pending&& work) {
  NodeOutcome out;
  const int level = node.level;
  if (level >= ctx.params->tau_r) {
    out.leaf_members = std::move(work.sorted);
    return out;
  }

  RandomSource exp_rng = ctx.root.Derive("dpm/node/" + node.path + "/exp");
  SplitOutcome split = SplitSubset(
      *ctx.data, work.sorted, ctx.grid, ctx.score, work.count.value,
      ctx.report.per_level_lambda[static_cast<std::size_t>(level)],
      ctx.report.per_level_eps_exp[static_cast<std::size_t>(level)], level,
      exp_rng);
  Record(ctx.ledger, "exp", level, node.path,
         ctx.report.per_level_eps_exp[static_cast<std::size_t>(level)]);

  const double child_eps =
      ctx.report.per_level_eps_cnt[static_cast<std::size_t>(level + 1)];
  RandomSource left_rng = ctx.root.Derive("dpm/node/" + node.path + "0/count");
  RandomSource right_rng = ctx.root.Derive("dpm/node/" + node.path + "1/count");
  const NoisyCount left_count =
      MakeNoisyCount(split.left[0].size(), child_eps, level + 1, left_rng);
  const NoisyCount right_count =
      MakeNoisyCount(split.right[0].size(), child_eps, level + 1, right_rng);
  Record(ctx.ledger, "count", level + 1, node.path + "0", child_eps);
  Record(ctx.ledger, "count", level + 1, node.path + "1", child_eps);

  if (left_count.value < ctx.tau_e || right_count.value < ctx.tau_e) {
    split.decision.applied = false;
    out.decision = split.decision;
    out.leaf_members = std::move(work.sorted);
    return out;
  }
  split.decision.applied = true;
  out.decision = split.decision;
  out.is_leaf = false;
  out.left = Pending{-1, std::move(split.left), left_count};
  out.right = Pending{-1, std::move(split.right), right_count};
  return out;
}

SplitTreeNode MakeNode(int level, std::string path, double noisy_count) {
  SplitTreeNode node;
  node.level = level;
  node.path = std::move(path);
  node.noisy_count = noisy_count;
  return node;
}

void AssignLeaves(std::vector<SplitTreeNode>& tree, int node, int& next_leaf,
                  std::vector<int>& order) {
  auto& n = tree[static_cast<std::size_t>(node)];
  if (n.left < 0) {
    n.leaf = next_leaf++;
    order.push_back(node);
    return;
  }
  const int left = n.left;
  const int right = n.right;
  AssignLeaves(tree, left, next_leaf, order);
  AssignLeaves(tree, right, next_leaf, order);
}

}  // namespace

void DpmParams::Validate() const {
  if (tau_r < 1) throw DomainError("tau_r must be at least 1");
  if (tau_r > 30) throw DomainError("tau_r above 30 is not supported");
  if (tau_e && !(*tau_e >= 0.0)) throw DomainError("tau_e must be non-negative");
  ScoreParams s = score;
  if (beta_override) s.beta = *beta_override;
  s.Validate();
  if (!auto_delta) {
    budget.Validate();
  } else {
    PrivacyBudget b = budget;
    b.delta_cnt = b.delta_avg = 0.5;
    b.Validate();
    if (!(delta_cnt_share > 0.0 && delta_cnt_share < 1.0)) {
      throw DomainError("delta_cnt_share must lie in (0, 1)");
    }
  }
  if (!beta_override) {
    if (sigmas.empty()) throw DomainError("at least one sigma candidate is required");
    for (double s : sigmas) {
      if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("sigmas must be positive");
    }
  }
}

std::vector<std::vector<std::uint32_t>> SortedProjections(const Dataset& data) {
  const std::size_t n = data.size();
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    throw DomainError("datasets above 2^32 points are not supported");
  }
  IndexLists sorted(data.dim());
  for (std::size_t j = 0; j < data.dim(); ++j) {
    auto& order = sorted[j];
    order.resize(n);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) {
                       return data.at(a, j) < data.at(b, j);
                     });
  }
  return sorted;
}

std::vector<double> ScoreCandidates(const Dataset& data,
                                    const IndexLists& sorted,
                                    const SplitGrid& grid,
                                    const ScoreParams& score, double n_tilde) {
  std::vector<double> scores(grid.size());
  std::vector<double> axis;
  for (std::size_t j = 0; j < grid.dim; ++j) {
    axis.resize(sorted[j].size());
    for (std::size_t i = 0; i < axis.size(); ++i) {
      axis[i] = data.at(sorted[j][i], j);
    }
    ScoreAxis(axis, grid, n_tilde, score,
              std::span<double>(scores).subspan(j * grid.num_splits,
                                                grid.num_splits));
  }
  return scores;
}

SplitOutcome SplitSubset(const Dataset& data, const IndexLists& sorted,
                         const SplitGrid& grid, const ScoreParams& score,
                         double n_tilde, double lambda, double eps_exp,
                         int level, RandomSource& rng) {
  const std::vector<double> scores =
      ScoreCandidates(data, sorted, grid, score, n_tilde);
  const double sensitivity = ScoreSensitivity(score, n_tilde, lambda);
  const std::size_t chosen =
      ExponentialMechanism(scores, sensitivity, eps_exp, rng);
  const SplitCandidate cand = DecodeSplitIndex(chosen, grid);

  SplitOutcome out;
  out.decision = SplitDecision{cand.dimension, cand.position, level, false,
                               chosen};
  out.left.resize(sorted.size());
  out.right.resize(sorted.size());
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    auto& left = out.left[j];
    auto& right = out.right[j];
    for (std::uint32_t i : sorted[j]) {
      (data.at(i, cand.dimension) <= cand.position ? left : right).push_back(i);
    }
  }
  return out;
}

ClusteringResult Fit(const Dataset& data, const DpmParams& params,
                     PrivacyLedger* ledger, const SigmaTable* sigma_table) {
  params.Validate();
  if (data.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw DomainError("datasets above 2^32 points are not supported");
  }

  RunContext ctx;
  ctx.data = &data;
  ctx.params = &params;
  ctx.root = RandomSource(params.seed);
  ctx.ledger = ledger;

  ClusteringResult result;
  result.budget = params.budget;

  // The root count is the level-0 count: drawn once, used for calibration,
  // tau_e and the first split.
  const double eps_cnt0 =
      MakeBudgetSchedule(params.budget.eps_cnt, params.tau_r + 1).per_level[0];
  RandomSource root_count_rng = ctx.root.Derive("dpm/node/r/count");
  const NoisyCount root_count =
      MakeNoisyCount(data.size(), eps_cnt0, 0, root_count_rng);
  Record(ledger, "count", 0, "r", eps_cnt0);
  result.root_noisy_count = root_count.value;

  if (params.auto_delta) {
    const double n = std::max(root_count.value, 2.0);
    const double delta = 1.0 / (n * std::sqrt(n));
    result.budget.delta_cnt = params.delta_cnt_share * delta;
    result.budget.delta_avg = (1.0 - params.delta_cnt_share) * delta;
  }

  const bool degenerate = data.size() < 2 && !params.beta_override;
  bool estimated = false;
  if (params.beta_override) {
    result.beta = *params.beta_override;
  } else if (!degenerate) {
    IntervalEstimate est = EstimateIntervalSize(
        data, root_count.value, params.budget.eps_int, params.sigmas,
        ctx.root.Derive("calibration"), sigma_table);
    Record(ledger, "interval", 0, "r", params.budget.eps_int);
    result.beta = est.beta;
    result.sigma_star = est.sigma;
    result.sigma_table = std::move(est.table);
    estimated = true;
  }

  ctx.report = ComposePrivacy(result.budget, params.tau_r, estimated);
  result.report = ctx.report;
  ctx.tau_e = params.tau_e.value_or(root_count.value /
                                    std::pow(2.0, params.tau_r));
  result.tau_e = ctx.tau_e;

  ctx.score = params.score;
  IndexLists all = SortedProjections(data);

  result.tree.push_back(MakeNode(0, "r", root_count.value));
  std::vector<IndexLists> leaf_members(1);

  if (degenerate) {
    result.warnings.push_back(
        "dataset has fewer than two points: emitting a single noise-only "
        "cluster without splitting");
    leaf_members[0] = std::move(all);
  } else {
    ctx.score.beta = result.beta;
    ctx.grid = MakeSplitGrid(data.range(), data.dim(), result.beta);
    result.num_splits = ctx.grid.num_splits;

    leaf_members.clear();
    std::vector<int> leaf_nodes;
    std::vector<Pending> frontier;
    frontier.push_back(Pending{0, std::move(all), root_count});
    while (!frontier.empty()) {
      std::vector<NodeOutcome> outcomes(frontier.size());
      internal::ParallelFor(frontier.size(), [&](std::size_t i) {
        const auto& node = result.tree[static_cast<std::size_t>(frontier[i].node)];
        outcomes[i] = ProcessNode(ctx, node, std::move(frontier[i]));
      });
      std::vector<Pending> next;
      for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const int id = frontier[i].node;
        auto& outcome = outcomes[i];
        result.tree[static_cast<std::size_t>(id)].decision = outcome.decision;
        if (outcome.is_leaf) {
          leaf_nodes.push_back(id);
          leaf_members.push_back(std::move(outcome.leaf_members));
          continue;
        }
        const SplitTreeNode parent = result.tree[static_cast<std::size_t>(id)];
        for (int side = 0; side < 2; ++side) {
          Pending& child = side == 0 ? outcome.left : outcome.right;
          const int child_id = static_cast<int>(result.tree.size());
          result.tree.push_back(MakeNode(parent.level + 1,
                                         parent.path + (side ? "1" : "0"),
                                         child.count.value));
          auto& p = result.tree[static_cast<std::size_t>(id)];
          (side == 0 ? p.left : p.right) = child_id;
          child.node = child_id;
          next.push_back(std::move(child));
        }
      }
      frontier = std::move(next);
    }

    // Leaves were collected level by level; re-order them left to right.
    std::vector<int> order;
    int next_leaf = 0;
    AssignLeaves(result.tree, 0, next_leaf, order);
    std::vector<IndexLists> ordered(order.size());
    for (std::size_t i = 0; i < leaf_nodes.size(); ++i) {
      const int leaf =
          result.tree[static_cast<std::size_t>(leaf_nodes[i])].leaf;
      ordered[static_cast<std::size_t>(leaf)] = std::move(leaf_members[i]);
    }
    leaf_members = std::move(ordered);
  }
  if (degenerate) result.tree[0].leaf = 0;

  // Leaves partition the data, so every average may spend the full eps_avg.
  const std::size_t k = leaf_members.size();
  result.centres.resize(k);
  result.weights.resize(k);
  std::vector<int> leaf_node(k, -1);
  for (std::size_t id = 0; id < result.tree.size(); ++id) {
    if (result.tree[id].leaf >= 0) {
      leaf_node[static_cast<std::size_t>(result.tree[id].leaf)] =
          static_cast<int>(id);
    }
  }
  for (std::size_t c = 0; c < k; ++c) {
    const auto& node = result.tree[static_cast<std::size_t>(leaf_node[c])];
    const NoisyCount count{node.noisy_count, 0.0, node.level};
    RandomSource avg_rng = ctx.root.Derive("avg/" + node.path);
    static const std::vector<std::uint32_t> kNone;
    const auto& members = leaf_members[c].empty() ? kNone : leaf_members[c][0];
    result.centres[c] =
        DpAverage(data, members, count, result.budget.eps_avg,
                  result.budget.delta_avg, avg_rng);
    result.weights[c] = node.noisy_count;
    Record(ledger, "avg", node.level, node.path, result.budget.eps_avg,
           result.budget.delta_avg);
  }
  return result;
}

}  // namespace dpm
