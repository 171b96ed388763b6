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

#include "dpm/analysis.h"

#include <algorithm>
#include <cmath>

#include "dpm/calibration.h"
#include "dpm/errors.h"

namespace dpm {

double NoisyCountTail(double kappa, double eps_cnt, double delta) {
  return std::min(1.0, 0.5 * std::exp(-kappa * eps_cnt) / delta);
}

double EmUtilityBound(std::size_t num_candidates, std::size_t num_near_optimal,
                      double omega, double kappa, double delta_f, double eps) {
  if (num_near_optimal < 1 || num_near_optimal > num_candidates) {
    throw DomainError("need 1 <= |W_opt| <= |W|");
  }
  const double log_ratio = std::log(static_cast<double>(num_candidates) /
                                    static_cast<double>(num_near_optimal));
  return omega + (2.0 * delta_f / eps) * (log_ratio + kappa);
}

double CentralEmptinessDeficit(double t_prime, double t, double q, double alpha,
                               double n_tilde, double lambda, double eps,
                               std::size_t num_candidates,
                               std::size_t num_near_optimal, double kappa,
                               double omega) {
  if (num_near_optimal < 1 || num_near_optimal > num_candidates) {
    throw DomainError("need 1 <= |W_opt| <= |W|");
  }
  const double shifted = std::max(n_tilde - lambda, 1.0);
  const double log_ratio = std::log(static_cast<double>(num_candidates) /
                                    static_cast<double>(num_near_optimal));
  const double lead = (2.0 * t / (q * alpha) + 2.0) / (shifted * eps);
  return lead * (log_ratio + kappa + omega) + (1.0 - t_prime) / alpha;
}

double CentralSelectionProbability(double l_lt, double l_ge) {
  return 1.0 / (l_lt / l_ge + 1.0);
}

std::vector<LevelDiagnostics> AnalyzeLevels(const AnalysisConfig& config,
                                            const PrivacyBudget& budget) {
  const PrivacyReport report = ComposePrivacy(budget, config.tau_r);
  const std::size_t candidates = config.num_splits * config.d;
  std::vector<LevelDiagnostics> rows;
  for (int level = 0; level <= config.tau_r; ++level) {
    const auto i = static_cast<std::size_t>(level);
    LevelDiagnostics row;
    row.level = level;
    row.expected_size = static_cast<double>(config.n) / std::pow(2.0, level);
    row.eps_cnt = report.per_level_eps_cnt[i];
    row.eps_exp = level < config.tau_r ? report.per_level_eps_exp[i] : 0.0;
    row.lambda = report.per_level_lambda[i];
    row.sensitivity = ScoreSensitivity(config.score, row.expected_size, row.lambda);
    row.count_tail =
        NoisyCountTail(config.count_kappa, row.eps_cnt, report.delta_cnt_level);
    row.minimal_emptiness = MinimalEmptiness(level, config.base_fill);
    if (row.eps_exp > 0.0) {
      row.em_deficit = EmUtilityBound(candidates, 1, 0.0, config.kappa,
                                      row.sensitivity, row.eps_exp);
      row.central_deficit = CentralEmptinessDeficit(
          config.t_prime, config.score.t, config.score.q, config.score.alpha,
          row.expected_size, row.lambda, row.eps_exp, candidates, 1,
          config.kappa, 0.0);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dpm
