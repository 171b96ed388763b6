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
#include <map>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "dpm/baselines.h"
#include "dpm/errors.h"
#include "dpm/mechanisms.h"
#include "dpm/result_io.h"

namespace dpm {
namespace {

DpmParams Defaults(std::uint64_t seed) {
  DpmParams p;
  p.budget = PrivacyBudget::FromShares(1.0, {0.04, 0.18, 0.18, 0.6}, 1.0, {0.2, 0.8});
  p.auto_delta = true;
  p.seed = seed;
  return p;
}

Dataset TwoTightClusters(std::uint64_t seed) {
  RandomSource rng(seed, "two");
  std::vector<double> coords;
  for (int i = 0; i < 500; ++i) coords.push_back(0.1 + 0.002 * rng.StandardNormal());
  for (int i = 0; i < 500; ++i) coords.push_back(0.9 + 0.002 * rng.StandardNormal());
  return Dataset(coords, 1, Interval{0.0, 1.0});
}

int Depth(const ClusteringResult& r) {
  int depth = 0;
  for (const auto& n : r.tree) {
    if (n.leaf >= 0) depth = std::max(depth, n.level);
  }
  return depth;
}

TEST(FitTest, TwoSeparatedClustersGiveTwoLeaves) {
  int two = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    DpmParams p = Defaults(seed);
    p.tau_r = 3;
    p.beta_override = 0.02;
    const Dataset data = TwoTightClusters(seed);
    const auto r = Fit(data, p);
    if (r.k() != 2) continue;
    ++two;
    ASSERT_TRUE(r.tree[0].decision.has_value());
    const double cut = r.tree[0].decision->position;
    for (std::size_t i = 0; i < 1000; ++i) {
      ASSERT_EQ(data.at(i, 0) <= cut, i < 500) << "seed " << seed;
    }
    // Each centre is midpoint + (sum of shifted points + N(0, sigma^2)) / n~,
    // with n~ the leaf's published noisy count. Recover the Gaussian draw.
    const double sigma = AverageNoiseStddev(data.range(), 1, r.budget.eps_avg,
                                            r.report.delta_avg);
    for (std::size_t leaf = 0; leaf < 2; ++leaf) {
      double shifted_sum = 0.0;
      for (std::size_t i = leaf * 500; i < leaf * 500 + 500; ++i) {
        shifted_sum += data.at(i, 0) - 0.5;
      }
      const double w = std::max(r.weights[leaf], 1.0);
      const double z = ((r.centres[leaf][0] - 0.5) * w - shifted_sum) / sigma;
      EXPECT_LT(std::abs(z), 4.5) << "seed " << seed << " leaf " << leaf;
    }
  }
  EXPECT_GE(two, 18);
}

TEST(FitTest, MinimumCountRuleKeepsOneCluster) {
  int single = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomSource rng(seed, "tight");
    std::vector<double> coords(2000);
    for (double& x : coords) x = std::clamp(0.5 + 0.01 * rng.StandardNormal(), 0.0, 1.0);
    DpmParams p = Defaults(seed);
    p.tau_r = 1;
    p.beta_override = 0.005;
    const Dataset data(coords, 2, Interval{0.0, 1.0});
    // With tau_r = 1 the default tau_e is n~ / 2: only an exact halving
    // with favourable noise on both sides could survive.
    const auto r = Fit(data, p);
    EXPECT_DOUBLE_EQ(r.tau_e, r.root_noisy_count / 2.0);
    single += r.k() == 1;
  }
  EXPECT_GE(single, 18);
}

TEST(FitTest, ReportMatchesAccountant) {
  MixtureConfig mc;
  mc.n = 2000;
  mc.d = 3;
  mc.k = 4;
  const auto mix = GenerateMixture(mc);
  const DpmParams p = Defaults(1);
  const auto r = Fit(mix.dataset, p);
  const PrivacyReport want = ComposePrivacy(r.budget, p.tau_r, true);
  EXPECT_EQ(r.report.eps_total, want.eps_total);
  EXPECT_EQ(r.report.delta_total, want.delta_total);
  EXPECT_NEAR(r.report.eps_total, 1.0, 1e-12);
  const double n = std::max(r.root_noisy_count, 2.0);
  EXPECT_NEAR(r.report.delta_total, 1.0 / (n * std::sqrt(n)), 1e-20);
  ASSERT_TRUE(r.sigma_star.has_value());
  EXPECT_EQ(r.beta, *r.sigma_star / 2.0);
}

TEST(FitTest, BetaOverrideSkipsCalibration) {
  MixtureConfig mc;
  mc.n = 1000;
  const auto mix = GenerateMixture(mc);
  DpmParams p = Defaults(2);
  p.beta_override = 0.5;
  PrivacyLedger ledger;
  const auto r = Fit(mix.dataset, p, &ledger);
  EXPECT_EQ(r.beta, 0.5);
  EXPECT_FALSE(r.sigma_star.has_value());
  EXPECT_NEAR(r.report.eps_total, 0.96, 1e-12);
  EXPECT_NEAR(r.report.eps_unspent, 0.04, 1e-12);
  for (const auto& e : ledger.entries()) EXPECT_NE(e.mechanism, "interval");
}

TEST(FitTest, TreeShapeInvariants) {
  for (int tau_r : {1, 2, 4, 7}) {
    MixtureConfig mc;
    mc.n = 4000;
    mc.k = 12;
    mc.seed = static_cast<std::uint64_t>(tau_r);
    const auto mix = GenerateMixture(mc);
    DpmParams p = Defaults(static_cast<std::uint64_t>(tau_r));
    p.tau_r = tau_r;
    const auto r = Fit(mix.dataset, p);
    EXPECT_GE(r.k(), 1u);
    EXPECT_LE(r.k(), std::size_t{1} << tau_r);
    EXPECT_LE(Depth(r), tau_r);
    EXPECT_EQ(r.centres.size(), r.weights.size());
    std::set<int> leaf_ids;
    for (const auto& n : r.tree) {
      const bool internal = n.left >= 0;
      EXPECT_EQ(internal, n.right >= 0);
      if (internal) {
        ASSERT_TRUE(n.decision.has_value());
        EXPECT_TRUE(n.decision->applied);
        EXPECT_EQ(r.tree[n.left].path, n.path + "0");
        EXPECT_EQ(r.tree[n.right].path, n.path + "1");
        EXPECT_EQ(r.tree[n.left].level, n.level + 1);
        EXPECT_EQ(n.leaf, -1);
      } else {
        EXPECT_GE(n.leaf, 0);
        leaf_ids.insert(n.leaf);
        if (n.level == tau_r) {
          EXPECT_FALSE(n.decision.has_value());
        } else {
          ASSERT_TRUE(n.decision.has_value());
          EXPECT_FALSE(n.decision->applied);
        }
      }
    }
    EXPECT_EQ(leaf_ids.size(), r.k());
  }
}

TEST(FitTest, LeavesAreNumberedLeftToRight) {
  MixtureConfig mc;
  mc.n = 3000;
  mc.k = 6;
  const auto mix = GenerateMixture(mc);
  const auto r = Fit(mix.dataset, Defaults(3));
  std::vector<std::pair<std::string, int>> leaves;
  for (const auto& n : r.tree) {
    if (n.leaf >= 0) leaves.push_back({n.path, n.leaf});
  }
  std::sort(leaves.begin(), leaves.end());
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    EXPECT_EQ(leaves[i].second, static_cast<int>(i));
  }
}

TEST(FitTest, LedgerRespectsParallelComposition) {
  MixtureConfig mc;
  mc.n = 6000;
  mc.k = 10;
  const auto mix = GenerateMixture(mc);
  const DpmParams p = Defaults(4);
  PrivacyLedger ledger;
  const auto r = Fit(mix.dataset, p, &ledger);
  // Sibling calls at one level touch disjoint subsets, so each level costs
  // the largest single charge at that level.
  std::map<std::pair<std::string, int>, double> level_cost;
  std::map<std::pair<std::string, int>, std::set<std::string>> nodes;
  for (const auto& e : ledger.entries()) {
    auto key = std::make_pair(e.mechanism, e.level);
    if (e.mechanism == "avg") key.second = 0;  // leaves partition the data
    level_cost[key] = std::max(level_cost[key], e.eps);
    EXPECT_TRUE(nodes[std::make_pair(e.mechanism, e.level)].insert(e.node).second)
        << "node charged twice: " << e.mechanism << " " << e.node;
  }
  double spent = 0.0;
  for (const auto& [key, eps] : level_cost) {
    spent += eps;
    if (key.first == "count") {
      EXPECT_DOUBLE_EQ(eps, r.report.per_level_eps_cnt[key.second]);
    } else if (key.first == "exp") {
      EXPECT_DOUBLE_EQ(eps, r.report.per_level_eps_exp[key.second]);
    }
  }
  EXPECT_LE(spent, r.report.eps_total * (1.0 + 1e-12));
}

TEST(FitTest, DeterministicForSeed) {
  MixtureConfig mc;
  mc.n = 3000;
  mc.k = 5;
  const auto mix = GenerateMixture(mc);
  const auto a = Fit(mix.dataset, Defaults(5));
  const auto b = Fit(mix.dataset, Defaults(5));
  const auto c = Fit(mix.dataset, Defaults(6));
  ResultDocument da{a, 5, 10, mix.dataset.range()};
  ResultDocument db{b, 5, 10, mix.dataset.range()};
  ResultDocument dc{c, 6, 10, mix.dataset.range()};
  dc.seed = 5;
  EXPECT_EQ(SerializeResult(da), SerializeResult(db));
  EXPECT_NE(SerializeResult(da), SerializeResult(dc));
}

TEST(FitTest, SeparatingSplitAtRoot) {
  int between = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RandomSource rng(seed, "pair");
    std::vector<double> coords;
    for (int i = 0; i < 600; ++i) coords.push_back(-5.0 + rng.StandardNormal());
    for (int i = 0; i < 600; ++i) coords.push_back(5.0 + rng.StandardNormal());
    for (double& x : coords) x = std::clamp(x, -20.0, 20.0);
    DpmParams p = Defaults(seed);
    p.tau_r = 1;  // a small count offset keeps the root selection sharp
    p.sigmas = {1.0};
    const auto r = Fit(Dataset(coords, 1, Interval{-20.0, 20.0}), p);
    ASSERT_TRUE(r.tree[0].decision.has_value());
    const double s = r.tree[0].decision->position;
    between += s > -5.0 && s < 5.0;
  }
  EXPECT_GE(between, 90);
}

TEST(SplitSubsetTest, PicksEmptyCentralGapWithLargeEpsilon) {
  std::vector<double> coords;
  for (int i = 0; i < 300; ++i) coords.push_back(0.05 + 0.0001 * i);
  for (int i = 0; i < 300; ++i) coords.push_back(0.92 + 0.0001 * i);
  const Dataset data(coords, 1, Interval{0.0, 1.0});
  const auto sorted = SortedProjections(data);
  const SplitGrid grid = MakeSplitGrid(data.range(), 1, 0.1);
  const ScoreParams score{0.3, 1.0 / 12.0, 5.0, 0.1};
  const auto scores = ScoreCandidates(data, sorted, grid, score, 600.0);
  // Every empty interval between the groups ties for the top score.
  const double best = *std::max_element(scores.begin(), scores.end());
  int hits = 0;
  for (int i = 0; i < 1000; ++i) {
    RandomSource rng(7, std::to_string(i));
    const auto out = SplitSubset(data, sorted, grid, score, 600.0, 0.0, 50.0, 0, rng);
    hits += scores[out.decision.chosen_flat_index] == best;
    if (i == 0) {
      // Partition: every point on exactly one side, by the <= rule.
      std::vector<int> seen(600, 0);
      for (auto idx : out.left[0]) {
        EXPECT_LE(data.at(idx, 0), out.decision.position);
        ++seen[idx];
      }
      for (auto idx : out.right[0]) {
        EXPECT_GT(data.at(idx, 0), out.decision.position);
        ++seen[idx];
      }
      EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
      EXPECT_TRUE(std::is_sorted(out.left[0].begin(), out.left[0].end(),
                                 [&](auto a, auto b) { return data.at(a, 0) < data.at(b, 0); }));
    }
  }
  EXPECT_GE(hits, 990);
}

TEST(SplitSubsetTest, ScoresUseOnlyTheSubset) {
  // A subset's candidate scores equal the scores of a dataset holding only
  // that subset.
  std::vector<double> coords{0.1, 0.2, 0.3, 0.7, 0.8, 0.9, 0.95};
  const Dataset data(coords, 1, Interval{0.0, 1.0});
  const std::vector<std::vector<std::uint32_t>> subset{{0, 1, 2}};
  const Dataset alone({0.1, 0.2, 0.3}, 1, Interval{0.0, 1.0});
  const SplitGrid grid = MakeSplitGrid(data.range(), 1, 0.05);
  const ScoreParams score{0.3, 1.0 / 12.0, 5.0, 0.05};
  EXPECT_EQ(ScoreCandidates(data, subset, grid, score, 3.0),
            ScoreCandidates(alone, SortedProjections(alone), grid, score, 3.0));
}

TEST(FitTest, HugeMinimumCountHaltsAtRoot) {
  MixtureConfig mc;
  mc.n = 1000;
  const auto mix = GenerateMixture(mc);
  DpmParams p = Defaults(8);
  p.tau_e = 1e9;
  const auto r = Fit(mix.dataset, p);
  ASSERT_EQ(r.k(), 1u);
  ASSERT_TRUE(r.tree[0].decision.has_value());
  EXPECT_FALSE(r.tree[0].decision->applied);
  EXPECT_EQ(r.tree.size(), 1u);
}

TEST(FitTest, EmptyDatasetGivesNoiseOnlyCluster) {
  const Dataset empty(std::vector<double>{}, 3, Interval{-1.0, 1.0});
  const auto r = Fit(empty, Defaults(9));
  EXPECT_EQ(r.k(), 1u);
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_EQ(r.centres[0].size(), 3u);
}

TEST(FitTest, RejectsInvalidParams) {
  const Dataset data({0.1, 0.2, 0.3}, 1, Interval{0.0, 1.0});
  DpmParams p = Defaults(0);
  p.tau_r = 0;
  EXPECT_THROW(Fit(data, p), DomainError);
  p = Defaults(0);
  p.score.t = 0.1;
  EXPECT_THROW(Fit(data, p), DomainError);
  p = Defaults(0);
  p.tau_e = -1.0;
  EXPECT_THROW(Fit(data, p), DomainError);
  p = Defaults(0);
  p.sigmas.clear();
  EXPECT_THROW(Fit(data, p), DomainError);
  p = Defaults(0);
  p.budget.eps_exp = 0.0;
  EXPECT_THROW(Fit(data, p), DomainError);
}

}  // namespace
}  // namespace dpm
