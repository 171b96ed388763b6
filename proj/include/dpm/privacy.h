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

#ifndef DPM_PRIVACY_H_
#define DPM_PRIVACY_H_

#include <mutex>
#include <string>
#include <vector>

namespace dpm {

// The budget consumed by one clustering run.
//
//   eps_int  interval-size calibration
//   eps_cnt  all noisy counts, spread over tau_r + 1 levels
//   eps_exp  split selection, spread over tau_r levels
//   eps_avg  final noisy averages
//   delta_cnt  failure probability of all count offsets together
//   delta_avg  Gaussian averaging
struct PrivacyBudget {
  double eps_int = 0.04;
  double eps_cnt = 0.18;
  double eps_exp = 0.18;
  double eps_avg = 0.6;
  double delta_cnt = 1e-6;
  double delta_avg = 1e-6;

  // Throws DomainError unless every eps is positive and every delta in (0, 1].
  void Validate() const;

  double eps_sum() const { return eps_int + eps_cnt + eps_exp + eps_avg; }

  // Splits `eps` as (int, cnt, exp, avg) shares and `delta` as (cnt, avg).
  static PrivacyBudget FromShares(double eps, const std::vector<double>& eps_shares,
                                  double delta,
                                  const std::vector<double>& delta_shares);
};

struct PrivacyReport {
  double eps_total = 0.0;
  double delta_total = 0.0;
  // eps_int is 0 here when the interval size was supplied instead of
  // estimated, and the unused amount is reported in eps_unspent.
  double eps_int = 0.0;
  double eps_avg = 0.0;
  double eps_unspent = 0.0;
  double delta_cnt_level = 0.0;
  double delta_avg = 0.0;
  std::vector<double> per_level_eps_cnt;  // tau_r + 1 entries
  std::vector<double> per_level_eps_exp;  // tau_r entries
  std::vector<double> per_level_lambda;   // tau_r + 1 entries
};

// Composes the guarantee of a run with maximum depth tau_r. Counts use
// delta_cnt / (tau_r + 1) per level so that the total delta is exactly
// delta_cnt + delta_avg.
PrivacyReport ComposePrivacy(const PrivacyBudget& budget, int tau_r,
                             bool interval_size_estimated = true);

// Records every budget-consuming call of a run, for auditing.
class PrivacyLedger {
 public:
  struct Entry {
    std::string mechanism;  // "count", "exp", "interval", "avg"
    int level = 0;
    std::string node;
    double eps = 0.0;
    double delta = 0.0;
  };

  void Record(Entry entry);
  std::vector<Entry> entries() const;

 private:
  mutable std::mutex mu_;
  std::vector<Entry> entries_;
};

}  // namespace dpm

#endif  // DPM_PRIVACY_H_
