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

#include "dpm/privacy.h"

#include <cmath>
#include <numeric>

#include "dpm/errors.h"
#include "dpm/mechanisms.h"

namespace dpm {

void PrivacyBudget::Validate() const {
  for (double eps : {eps_int, eps_cnt, eps_exp, eps_avg}) {
    if (!(eps > 0.0) || !std::isfinite(eps)) {
      throw DomainError("every epsilon component must be positive");
    }
  }
  for (double delta : {delta_cnt, delta_avg}) {
    if (!(delta > 0.0 && delta <= 1.0)) {
      throw DomainError("every delta component must lie in (0, 1]");
    }
  }
}

PrivacyBudget PrivacyBudget::FromShares(double eps,
                                        const std::vector<double>& eps_shares,
                                        double delta,
                                        const std::vector<double>& delta_shares) {
  if (eps_shares.size() != 4) {
    throw DomainError("epsilon split needs four shares (int, cnt, exp, avg)");
  }
  if (delta_shares.size() != 2) {
    throw DomainError("delta split needs two shares (cnt, avg)");
  }
  PrivacyBudget b;
  b.eps_int = eps * eps_shares[0];
  b.eps_cnt = eps * eps_shares[1];
  b.eps_exp = eps * eps_shares[2];
  b.eps_avg = eps * eps_shares[3];
  b.delta_cnt = delta * delta_shares[0];
  b.delta_avg = delta * delta_shares[1];
  b.Validate();
  return b;
}

PrivacyReport ComposePrivacy(const PrivacyBudget& budget, int tau_r,
                             bool interval_size_estimated) {
  budget.Validate();
  if (tau_r < 1) throw DomainError("tau_r must be at least 1");

  PrivacyReport report;
  report.per_level_eps_cnt = MakeBudgetSchedule(budget.eps_cnt, tau_r + 1).per_level;
  report.per_level_eps_exp = MakeBudgetSchedule(budget.eps_exp, tau_r).per_level;
  report.delta_cnt_level = budget.delta_cnt / (tau_r + 1);
  report.delta_avg = budget.delta_avg;
  report.per_level_lambda.reserve(report.per_level_eps_cnt.size());
  for (double eps : report.per_level_eps_cnt) {
    report.per_level_lambda.push_back(CountOffset(report.delta_cnt_level, eps));
  }

  report.eps_int = interval_size_estimated ? budget.eps_int : 0.0;
  report.eps_unspent = interval_size_estimated ? 0.0 : budget.eps_int;
  report.eps_avg = budget.eps_avg;
  const double cnt = std::accumulate(report.per_level_eps_cnt.begin(),
                                     report.per_level_eps_cnt.end(), 0.0);
  const double exp = std::accumulate(report.per_level_eps_exp.begin(),
                                     report.per_level_eps_exp.end(), 0.0);
  report.eps_total = cnt + exp + report.eps_avg + report.eps_int;
  report.delta_total =
      (tau_r + 1) * report.delta_cnt_level + report.delta_avg;
  return report;
}

void PrivacyLedger::Record(Entry entry) {
  std::lock_guard<std::mutex> lock(mu_);
  entries_.push_back(std::move(entry));
}

std::vector<PrivacyLedger::Entry> PrivacyLedger::entries() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_;
}

}  // namespace dpm
