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


// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Each check prints the numbers it measured.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "dpm/analysis.h"
#include "dpm/baselines.h"
#include "dpm/calibration.h"
#include "dpm/clustering.h"
#include "dpm/mechanisms.h"
#include "dpm/metrics.h"
#include "dpm/privacy.h"
#include "dpm/random.h"
#include "dpm/result_io.h"
#include "oracles.h"
#include "sensitivity_harness.h"
#include "validators.h"

namespace dpm {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, double a, double b = 0.0, double c = 0.0,
                double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

double RelErr(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

// 1. Composition against an independent closed form.
Outcome Accountant() {
  std::mt19937_64 gen(2026);
  std::uniform_real_distribution<double> unif(0.01, 1.0);
  double worst = 0.0;
  int cases = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    PrivacyBudget b;
    b.eps_int = unif(gen);
    b.eps_cnt = unif(gen);
    b.eps_exp = unif(gen);
    b.eps_avg = unif(gen);
    b.delta_cnt = 1e-3 * unif(gen);
    b.delta_avg = 1e-3 * unif(gen);
    for (int tau_r = 1; tau_r <= 10; ++tau_r) {
      const PrivacyReport r = ComposePrivacy(b, tau_r);
      // Schedule weights sqrt(2^i), normalised per mechanism.
      long double wc = 0.0L;
      long double we = 0.0L;
      for (int i = 0; i <= tau_r; ++i) wc += std::sqrt(std::pow(2.0L, i));
      for (int i = 0; i < tau_r; ++i) we += std::sqrt(std::pow(2.0L, i));
      long double eps_total = b.eps_int + b.eps_avg;
      for (int i = 0; i <= tau_r; ++i) {
        const long double e = b.eps_cnt * std::sqrt(std::pow(2.0L, i)) / wc;
        eps_total += e;
        const long double level_delta = b.delta_cnt / (tau_r + 1.0L);
        worst = std::max(worst, RelErr(r.per_level_eps_cnt[i], static_cast<double>(e)));
        worst = std::max(worst, RelErr(r.per_level_lambda[i],
                                       static_cast<double>(-std::log(2.0L * level_delta) / e)));
      }
      for (int i = 0; i < tau_r; ++i) {
        const long double e = b.eps_exp * std::sqrt(std::pow(2.0L, i)) / we;
        eps_total += e;
        worst = std::max(worst, RelErr(r.per_level_eps_exp[i], static_cast<double>(e)));
      }
      worst = std::max(worst, RelErr(r.eps_total, static_cast<double>(eps_total)));
      worst = std::max(worst, RelErr(r.delta_total, b.delta_cnt + b.delta_avg));
      ++cases;
    }
  }
  return {worst <= 1e-12, Fmt("%.0f budgets, worst relative error %.3g", cases, worst)};
}

// 2. Exhaustive neighbouring-dataset sensitivity search.
Outcome Sensitivity() {
  const testing::SensitivityOutcome o = testing::RunSensitivityHarness({});
  const double worst = std::max({o.worst_total, o.worst_empty, o.worst_centre});
  return {worst <= 1.0 + 1e-9,
          Fmt("%.0f cases, max |df|/bound %.6f (emptiness %.6f, centreness %.6f)",
              static_cast<double>(o.cases), o.worst_total, o.worst_empty, o.worst_centre)};
}

// 3. Exponential-mechanism pmf and the shifted-count tail.
Outcome Distributions() {
  RandomSource rng(3, "acceptance/em");
  const std::vector<double> scores{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 0.25};
  const auto pmf = ExponentialMechanismPmf(scores, 1.0, 1.0);
  // Closed form, computed here from the definition.
  std::vector<double> expected(scores.size());
  double z = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) z += std::exp(scores[i] / 2.0);
  for (std::size_t i = 0; i < scores.size(); ++i) expected[i] = std::exp(scores[i] / 2.0) / z;
  double pmf_err = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) pmf_err = std::max(pmf_err, RelErr(pmf[i], expected[i]));
  const std::size_t draws = 100000;
  std::vector<std::size_t> counts(scores.size(), 0);
  for (std::size_t i = 0; i < draws; ++i) ++counts[ExponentialMechanism(scores, 1.0, 1.0, rng)];
  const double p = testing::ChiSquarePValue(counts, expected, draws);

  bool tails = true;
  double worst_excess = -1e300;
  int informative = 0;
  for (double kappa : {5.0, 20.0, 60.0}) {
    for (double eps : {0.1, 0.5}) {
      for (double delta : {1e-2, 1e-3}) {
        const auto c = testing::ShiftedCountTail(kappa, eps, delta, 1000000, 7);
        tails = tails && c.Holds();
        if (c.bound >= 1.0) continue;  // saturated, holds trivially
        ++informative;
        worst_excess = std::max(worst_excess, c.rate / c.bound);
      }
    }
  }
  return {p > 1e-3 && pmf_err < 1e-12 && tails,
          Fmt("EM chi2 p=%.4f, pmf err %.2g; count tail over %.0f unsaturated cells, "
              "max rate/bound %.3f",
              p, pmf_err, informative, worst_excess)};
}

// 4. Exponential-mechanism utility deficit.
Outcome EmUtility() {
  bool ok = true;
  std::string detail;
  for (double kappa : {1.0, 2.0, 3.0}) {
    double worst = 0.0;
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
      const double df = 0.05 + 0.05 * static_cast<double>(trial);
      const auto scores = testing::RandomScoreVector(20 + 40 * trial, df, 100 + trial);
      const auto c = testing::EmUtilityViolation(scores, 0.0, kappa, df, 1.0, 20000,
                                                 static_cast<std::uint64_t>(kappa) * 1000 + trial);
      ok = ok && c.Holds();
      worst = std::max(worst, c.rate);
    }
    detail += Fmt("kappa=%.0f max rate %.4f vs %.4f; ", kappa, worst, std::exp(-kappa));
  }
  return {ok, detail};
}

// 5 and 6. Desk-scale synthetic benchmark.
struct SynthOutcome {
  Outcome quality;
  Outcome leaves;
};

SynthOutcome Synth() {
  constexpr int kSeeds = 20;
  double acc = 0.0;
  double sil = 0.0;
  double base_sil = 0.0;
  double kd = 0.0;
  int leaves_ok = 0;
  std::string ks;
  for (int seed = 0; seed < kSeeds; ++seed) {
    MixtureConfig mc;
    mc.k = 16;
    mc.seed = 500 + static_cast<std::uint64_t>(seed);
    const Mixture mix = GenerateMixture(mc);
    DpmParams p;
    p.seed = static_cast<std::uint64_t>(seed);
    const ClusteringResult r = Fit(mix.dataset, p);
    const auto runs = ReferenceRuns(mix.dataset, {16}, 20, 10, 900 + static_cast<std::uint64_t>(seed));
    std::vector<Centres> refs;
    for (const auto& run : runs) refs.push_back(run.centres);
    const MetricReport m = Evaluate(mix.dataset, r.centres, &mix.labels, &refs);
    acc += m.accuracy.value_or(0.0);
    sil += m.silhouette;
    base_sil += Silhouette(mix.dataset, runs.front().centres);
    kd += m.kmeans_distance_normalized.value_or(1.0);
    leaves_ok += r.k() >= 12 && r.k() <= 24;
    ks += std::to_string(r.k()) + (seed + 1 < kSeeds ? "," : "");
  }
  acc /= kSeeds;
  sil /= kSeeds;
  base_sil /= kSeeds;
  kd /= kSeeds;
  SynthOutcome out;
  out.quality = {acc >= 0.90 && std::abs(sil - base_sil) <= 0.1 && kd <= 0.05,
                 Fmt("accuracy %.3f, silhouette %.3f vs KMeans %.3f, normalized KD %.4f", acc,
                     sil, base_sil, kd)};
  out.leaves = {leaves_ok >= 16, Fmt("%.0f/20 seeds in [12, 24]; k = ", leaves_ok) + ks};
  return out;
}

// 7. Metrics against brute-force oracles.
Outcome Metrics() {
  double worst = 0.0;
  auto rel = [](double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
  };
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto inst = testing::RandomMetricInstance(7000 + seed);
    const Dataset data(testing::Flatten(inst.points), inst.d, Interval{-5.0, 5.0});
    worst = std::max(worst, rel(Inertia(data, inst.centres),
                                testing::InertiaOracle(inst.points, inst.centres)));
    worst = std::max(worst, rel(Silhouette(data, inst.centres, 0),
                                testing::SilhouetteOracle(inst.points, inst.centres)));
    worst = std::max(worst, rel(Accuracy(data, inst.labels, inst.centres),
                                testing::AccuracyOracle(inst.points, inst.labels, inst.centres)));
    worst = std::max(worst, rel(KMeansDistance(inst.references, inst.centres),
                                testing::KdOracle(inst.references, inst.centres)));
  }
  return {worst <= 1e-9, Fmt("200 instances, worst relative error %.3g", worst)};
}

// 8. Interval-size calibration.
Outcome Calibration() {
  const std::vector<double> sigmas{5.0, 10.0, 20.0};
  int hits = 0;
  bool exact_half = true;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RandomSource gen(seed, "acceptance/gauss");
    const std::size_t n = 10000;
    const std::size_t d = 10;
    std::vector<double> coords(n * d);
    for (double& x : coords) x = std::clamp(10.0 * gen.StandardNormal(), -100.0, 100.0);
    const Dataset data(coords, d, Interval{-100.0, 100.0});
    const IntervalEstimate e =
        EstimateIntervalSize(data, static_cast<double>(n), 0.04, sigmas, RandomSource(seed));
    hits += e.sigma == 10.0;
    exact_half = exact_half && e.beta == e.sigma / 2.0;
  }
  return {hits >= 90 && exact_half,
          Fmt("%.0f/100 runs chose sigma 10; beta == sigma/2 in every run: ", hits) +
              (exact_half ? "yes" : "no")};
}

// 9. Byte-identical result documents.
Outcome Determinism() {
  MixtureConfig mc;
  mc.n = 5000;
  mc.seed = 77;
  const Mixture mix = GenerateMixture(mc);
  DpmParams p;
  p.seed = 77;
  auto run = [&] {
    ResultDocument doc;
    doc.result = Fit(mix.dataset, p);
    doc.seed = p.seed;
    doc.d = mix.dataset.dim();
    doc.range = mix.dataset.range();
    return SerializeResult(doc);
  };
  const std::string a = run();
  const std::string b = run();
  return {a == b, Fmt("%.0f bytes, identical: ", static_cast<double>(a.size())) +
                      (a == b ? "yes" : "no")};
}

// 10. Runtime at n = 1e5, d = 10.
Outcome Performance() {
  MixtureConfig mc;
  mc.n = 100000;
  mc.k = 64;
  mc.seed = 10;
  const Mixture mix = GenerateMixture(mc);
  DpmParams p;
  p.tau_r = 7;
  p.sigmas = {30.0};
  const auto start = std::chrono::steady_clock::now();
  const ClusteringResult r = Fit(mix.dataset, p);
  const double s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {s < 60.0, Fmt("fit took %.2f s, k = %.0f", s, static_cast<double>(r.k()))};
}

void Report(int index, const char* name, const Outcome& o, double seconds, bool& all) {
  std::printf("%s %d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", index, name,
              o.detail.c_str(), seconds);
  std::fflush(stdout);
  all = all && o.pass;
}

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int Main() {
  bool all = true;
  using Check = std::function<Outcome()>;
  const std::vector<std::pair<const char*, Check>> first{
      {"privacy accountant", Accountant},
      {"score sensitivity", Sensitivity},
      {"mechanism distributions", Distributions},
      {"exponential mechanism utility", EmUtility},
  };
  int index = 1;
  for (const auto& [name, check] : first) {
    const auto start = std::chrono::steady_clock::now();
    const Outcome o = check();
    Report(index++, name, o, Seconds(start), all);
  }
  {
    const auto start = std::chrono::steady_clock::now();
    const SynthOutcome s = Synth();
    const double t = Seconds(start);
    Report(5, "synthetic benchmark quality", s.quality, t, all);
    Report(6, "cluster count discovery", s.leaves, 0.0, all);
  }
  const std::vector<std::pair<const char*, Check>> rest{
      {"metric oracles", Metrics},
      {"interval-size calibration", Calibration},
      {"determinism", Determinism},
      {"performance", Performance},
  };
  index = 7;
  for (const auto& [name, check] : rest) {
    const auto start = std::chrono::steady_clock::now();
    const Outcome o = check();
    Report(index++, name, o, Seconds(start), all);
  }
  return all ? 0 : 1;
}

}  // namespace
}  // namespace dpm

int main() { return dpm::Main(); }
