// Copyright 2026 The dpsos Authors
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


// Empirical checks of the stability and privacy statements on concrete
// adjacent datasets. Reports are one-sided: a pass means that no violation
// was detected at the power of the experiment, never that privacy holds.

#ifndef DPSOS_AUDIT_HPP_
#define DPSOS_AUDIT_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dpsos/estimator.hpp"
#include "dpsos/rng.hpp"

namespace dpsos::audit {

struct StabilityParams {
  double C = 2.0;
  int k = 2;
  double L = 2.0;
  // Common outlier-rate numerator used on both datasets.
  int tau = 1;
  estimator::NoiseConstants constants;
  pseudo::SystemConfig system;
};

struct StabilityReport {
  // "ok", or which side was infeasible at tau.
  std::string status = "ok";
  // Stab(tau, 1) on Y and Y'; the coupling lemma assumes both are < 20L.
  double stab_y = 0.0;
  double stab_y_prime = 0.0;
  bool stable = false;

  double pot_diff = 0.0;
  double weight_l1 = 0.0;
  double mean_mahalanobis = 0.0;
  double cov_multiplicative = 0.0;

  double pot_bound = 0.0;     // 20 L
  double weight_bound = 0.0;  // 120 sqrt(L / n)
  double mean_bound = 0.0;    // 10 c1 C k theta^{1 - 1/2k}
  double cov_bound = 0.0;     // 10 ct C k theta^{1 - 1/k}
  double tol = 0.0;

  bool pot_pass = false;
  bool weight_pass = false;
  bool mean_pass = false;
  bool cov_pass = false;
};

StabilityReport stability_audit(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& Y_prime,
                                const StabilityParams& params);

// One mechanism run, reduced to a scalar statistic; nullopt is a reject.
using Mechanism = std::function<std::optional<double>(const Eigen::MatrixXd&, Rng&)>;

struct EpsilonConfig {
  long trials = 100000;
  int buckets = 20;
  double delta = 0.0;
  // Flag when the lower confidence bound exceeds this.
  double eps = 1.0;
  // Family-wise error of the confidence interval.
  double alpha = 0.05;
  // Buckets are merged until each holds this many pooled outcomes.
  long min_bucket_count = 100;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string statistic = "statistic";
};

struct EpsilonEstimate {
  double eps_hat = 0.0;
  // Raw plug-in max log-ratio (no slack); non-decreasing under bucket
  // refinement, but biased upward by the max over noisy buckets.
  double eps_histogram = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::string method = "histogram-lr";
  long trials = 0;
  std::string statistic;
  int buckets = 0;
  long rejects_y = 0;
  long rejects_y_prime = 0;
  bool violation = false;
};

// Histograms the mechanism outputs on Y and Y' over shared buckets (rejects
// form their own bucket) and takes max ln((p_i - delta')_+ / q_i) in both
// directions, delta' = delta / buckets. The point estimate uses per-bucket
// Clopper-Pearson bounds at level alpha (p_i from below, q_i from above), so
// the max over buckets is not biased upward by sampling noise; the interval
// uses Bonferroni-corrected bounds at family-wise level alpha.
EpsilonEstimate empirical_epsilon(const Mechanism& mech, const Eigen::MatrixXd& Y,
                                  const Eigen::MatrixXd& Y_prime, const EpsilonConfig& cfg);

// empirical_epsilon of the private estimator with statistic = first mean
// coordinate (rejects are their own atom).
EpsilonEstimate audit_private_estimate(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& Y_prime,
                                       const estimator::Params& params, EpsilonConfig cfg);

// Same estimate from already collected outcomes.
EpsilonEstimate epsilon_from_samples(const std::vector<std::optional<double>>& a,
                                     const std::vector<std::optional<double>>& b,
                                     const EpsilonConfig& cfg);

// Exact two-sided Clopper-Pearson interval for k successes out of n.
std::pair<double, double> clopper_pearson(long k, long n, double alpha);

struct LemmaConfig {
  pseudo::Mode mode = pseudo::Mode::kPinned;
  int n = 32;
  int pairs = 5;
  double eta = 0.25;
  double C = 2.0;
  double L = 2.0;
  double gap_tol = 1e-6;
  long selection_trials = 20000;
  long tlap_samples = 200000;
  long hockey_samples = 200000;
  // Privacy audit of the full mechanism on a distinguishing pair.
  long audit_trials = 20000;
  int audit_n = 200;
  double audit_eta = 0.25;
  double audit_C = 8.0;
  double audit_L = 10.0;
  double audit_eps = 1.0;
  double audit_delta = 0.5;
  estimator::NoiseConstants constants;
  std::uint64_t seed = 2026;
  int workers = 1;
};

struct LemmaCheck {
  std::string name;
  bool applicable = true;
  bool pass = false;
  // Slack to the bound (positive = satisfied).
  double margin = 0.0;
  std::string detail;
};

struct LemmaReport {
  std::vector<LemmaCheck> checks;
  bool all_pass() const;
};

LemmaReport lemma_suite(const LemmaConfig& cfg);

std::string to_json(const StabilityReport& r);
std::string to_json(const EpsilonEstimate& e);
std::string to_json(const LemmaReport& r);
// Fixed-width text table, one row per check.
std::string summary_table(const LemmaReport& r);

}  // namespace dpsos::audit

#endif  // DPSOS_AUDIT_HPP_
