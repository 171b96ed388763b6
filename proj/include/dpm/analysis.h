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

// Closed-form utility bounds, used for diagnostics and validated
// statistically in the test suite.

#ifndef DPM_ANALYSIS_H_
#define DPM_ANALYSIS_H_

#include <cstddef>
#include <string>
#include <vector>

#include "dpm/privacy.h"
#include "dpm/scoring.h"

namespace dpm {

// Bound on P[|shifted noisy count - true count| > kappa]:
// min(1, exp(-kappa * eps_cnt) / (2 delta)).
double NoisyCountTail(double kappa, double eps_cnt, double delta);

// Score deficit that the exponential mechanism exceeds with probability at
// most exp(-kappa): omega + (2 delta_f / eps) (ln(W / W_opt) + kappa).
double EmUtilityBound(std::size_t num_candidates, std::size_t num_near_optimal,
                      double omega, double kappa, double delta_f, double eps);

// Upper bound on e(s*) - e(s) for a selected t'-central split s.
double CentralEmptinessDeficit(double t_prime, double t, double q, double alpha,
                               double n_tilde, double lambda, double eps,
                               std::size_t num_candidates,
                               std::size_t num_near_optimal, double kappa,
                               double omega);

// Probability mass on the t'-central candidates given the summed weights
// below (l_lt) and at or above (l_ge) t': 1 / (l_lt / l_ge + 1).
double CentralSelectionProbability(double l_lt, double l_ge);

// One row of the per-level diagnostic table printed by `dpm analyze`.
struct LevelDiagnostics {
  int level = 0;
  double expected_size = 0.0;  // n / 2^level
  double eps_cnt = 0.0;
  double eps_exp = 0.0;  // 0 at level tau_r
  double lambda = 0.0;
  double sensitivity = 0.0;
  double em_deficit = 0.0;
  double count_tail = 0.0;
  double minimal_emptiness = 0.0;
  double central_deficit = 0.0;
};

struct AnalysisConfig {
  std::size_t n = 100000;
  std::size_t d = 10;
  int tau_r = 7;
  ScoreParams score;
  std::size_t num_splits = 100;
  double kappa = 3.0;          // exponential-mechanism tail, e^-kappa
  double count_kappa = 200.0;  // count deviation for the Laplace tail
  double t_prime = 0.3;
  double base_fill = 1.0 - 0.80258;
};

std::vector<LevelDiagnostics> AnalyzeLevels(const AnalysisConfig& config,
                                            const PrivacyBudget& budget);

}  // namespace dpm

#endif  // DPM_ANALYSIS_H_
