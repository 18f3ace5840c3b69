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

// Differential-privacy primitives: truncated Laplace noise, approximate-DP
// selection, hockey-stick divergences between Gaussians, noise calibration
// bounds and budget composition.
//
// Floating-point caveat: samplers use doubles and are subject to the usual
// precision attacks on floating-point DP; this is not mitigated.

#ifndef DPSOS_DP_HPP_
#define DPSOS_DP_HPP_

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dpsos/rng.hpp"

namespace dpsos::dp {

// Laplace(mu, b) conditioned on being negative.
struct TruncatedLaplaceParams {
  double mu = -1.0;
  double b = 1.0;
};

// tLap(-Delta (1 + ln(1/delta)/eps), Delta/eps).
TruncatedLaplaceParams tlap_params(double sensitivity, double eps, double delta);

// Inverse-CDF sampling; always strictly negative. Throws
// std::invalid_argument unless mu < 0 and b > 0.
double sample_tlap(const TruncatedLaplaceParams& params, Rng& rng);

// Pr[X < y] = e^{(y-mu)/b} / (2 - e^{mu/b}) for y < mu; throws
// std::domain_error otherwise.
double tlap_tail(const TruncatedLaplaceParams& params, double y);

// Full CDF of the truncated distribution (any y).
double tlap_cdf(const TruncatedLaplaceParams& params, double y);

struct SelectionConfig {
  // Constant in the utility margin c (Delta/eps) ln(|C|/(beta delta)).
  double utility_constant = 12.0;
};

struct SelectionResult {
  // Index of the released candidate; empty for "bottom".
  std::optional<std::size_t> index;
  // The candidate drawn by the exponential mechanism and its noisy test.
  std::size_t drawn = 0;
  double score = 0.0;
  double noise = 0.0;
};

// Exponential mechanism with weights exp(eps/(4 Delta) score) followed by a
// truncated-Laplace threshold test score + N >= kappa,
// N ~ tLap(-Delta (1 + 2 ln(1/delta)/eps), 2 Delta/eps). Scores are queried
// once per candidate.
SelectionResult select(std::size_t num_candidates,
                       const std::function<double(std::size_t)>& score, double sensitivity,
                       double eps, double delta, double kappa, Rng& rng);
SelectionResult select(const std::vector<double>& scores, double sensitivity, double eps,
                       double delta, double kappa, Rng& rng);

// Score margin above kappa that guarantees failure probability <= beta.
double selection_margin(double sensitivity, double eps, std::size_t num_candidates,
                        double beta, double delta, const SelectionConfig& cfg = {});

struct GaussianSpec {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

struct DivergenceEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  long samples = 0;
  bool exact = false;
};

struct HockeyStickConfig {
  long samples = 1000000;
  std::uint64_t seed = 0x5eed;
  int workers = 1;
};

// D_alpha(p, q) = int [p - alpha q]_+. Closed form in 1-d; importance
// sampling under p (95% CI) in higher dimension. Singular covariances must
// share their column space (std::invalid_argument otherwise).
DivergenceEstimate hockey_stick(const GaussianSpec& p, const GaussianSpec& q, double alpha,
                                const HockeyStickConfig& cfg = {});

struct TriangleCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
};

// D_{e^eps}(p, r) <= D_{e^{eps/2}}(p, q) + e^{eps/2} D_{e^{eps/2}}(q, r), 1-d.
TriangleCheck hockey_triangle_check(const GaussianSpec& p, const GaussianSpec& q,
                                    const GaussianSpec& r, double eps);

double linear_noise_threshold(int d, double eps, double delta);
double tensored_noise_threshold(int d, int t, double eps, double delta);
// beta <= eps / (3 d ln(d/delta)).
bool linear_noise_admissible(double beta, int d, double eps, double delta);
// beta <= eps / (8 t^2 d^t ln(d^t/delta)).
bool tensored_noise_admissible(double beta, int d, int t, double eps, double delta);

struct BudgetStage {
  std::string label;
  double eps = 0.0;
  double delta = 0.0;
};

class PrivacyBudget {
 public:
  // Throws std::invalid_argument on negative or non-finite entries.
  void append(std::string label, double eps, double delta);
  const std::vector<BudgetStage>& stages() const { return stages_; }
  double total_eps() const { return total_eps_; }
  double total_delta() const { return total_delta_; }
  std::string to_json() const;

 private:
  std::vector<BudgetStage> stages_;
  double total_eps_ = 0.0;
  double total_delta_ = 0.0;
};

// Basic composition: componentwise sums.
std::pair<double, double> compose(const PrivacyBudget& budget);

}  // namespace dpsos::dp

#endif  // DPSOS_DP_HPP_
