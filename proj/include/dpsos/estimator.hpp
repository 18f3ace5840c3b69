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


// Witness-producing robust moment estimation and the private pipeline:
// stable outlier-rate selection, witness checking and estimate-dependent
// noise.

#ifndef DPSOS_ESTIMATOR_HPP_
#define DPSOS_ESTIMATOR_HPP_

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "dpsos/certify.hpp"
#include "dpsos/dp.hpp"
#include "dpsos/pseudo.hpp"
#include "dpsos/rng.hpp"
#include "dpsos/tensor.hpp"

namespace dpsos::estimator {

// Multipliers standing in for the unspecified constants in the noise widths
// and the selection utility margin.
struct NoiseConstants {
  double c1 = 2.0;
  double ct = 2.0;
  double select_util = 12.0;
};

struct Params {
  double eta = 0.1;
  double C = 2.0;
  int k = 2;
  double eps = 1.0;
  double delta = 1e-6;
  double L = 2.0;
  NoiseConstants constants;
  pseudo::SystemConfig system;
  certify::CertifyConfig certify;
  // Clamp the released covariance to PSD (post-processing).
  bool psd_project = false;
  // Threads used to prefetch Pot values while scoring.
  int workers = 1;
};

// Robust estimation without privacy. On success holds normalized weights.
struct RobustResult {
  bool rejected = false;
  pseudo::WeightVector weights;
  pseudo::PotentialValue pot;
};

RobustResult robust_estimate(const Eigen::MatrixXd& Y, double eta, double C, int k,
                             const pseudo::SystemConfig& cfg = {});

// Pot_{m/n}(Y) for integer numerators m, memoized. Rates m >= n are the
// trivial all-zero witness with Pot 0. Thread-safe.
class PotentialOracle {
 public:
  PotentialOracle(Eigen::MatrixXd Y, double C, int k, pseudo::SystemConfig cfg = {});

  int n() const { return static_cast<int>(Y_.rows()); }
  const Eigen::MatrixXd& data() const { return Y_; }

  pseudo::PotentialValue pot(int m);
  // Full solution (weights) at rate m/n.
  pseudo::PotentialResult solve(int m);
  // Solves the given numerators on up to `workers` threads.
  void prefetch(const std::vector<int>& numerators, int workers);
  std::size_t solves() const;

 private:
  std::shared_ptr<const pseudo::PotentialResult> lookup(int m);

  Eigen::MatrixXd Y_;
  double C_;
  int k_;
  pseudo::SystemConfig cfg_;
  mutable std::mutex mu_;
  std::map<int, std::shared_ptr<const pseudo::PotentialResult>> cache_;
};

// Pot_{(tau-gamma)/n} - Pot_{(tau+gamma)/n}. Throws std::domain_error when
// the lower rate is infeasible or gamma is out of range.
double stab(PotentialOracle& oracle, int tau, int gamma);

struct ScoreResult {
  double score = 0.0;
  int gamma_star = 0;
  double stab = 0.0;  // Stab at gamma_star
};

// max over gamma of min(gamma, 20L - Stab(tau, gamma)); 0 when tau/n is
// infeasible.
ScoreResult score(PotentialOracle& oracle, int tau, double L);

struct NoiseScales {
  double theta = 0.0;
  // Keyed by order t (1 = mean, 2 = covariance, then moment orders).
  std::map<int, double> gamma;
  std::map<int, double> sigma;
};

// Widths for the orders {1, 2} and every entry of `orders`.
NoiseScales noise_scales(double C_prime, int k, double L, int n, int d, double eps,
                         double delta, const NoiseConstants& constants,
                         const std::vector<int>& orders = {});

// Even t < 2k dividing 2k.
std::vector<int> moment_orders(int k);

struct Moments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  std::map<int, SymmetricTensor> moments;
};

// Weighted mean, covariance and raw moment tensors of the given orders.
Moments extract_moments(const Eigen::VectorXd& p, const Eigen::MatrixXd& Y,
                        const std::vector<int>& orders);

// mean + S z, cov + S Z S, M_t + R^{(x)t} Z_t with S = cov^{1/2},
// R = (cov + mean mean^T)^{1/2}; a zero width leaves that part unchanged.
Moments add_noise(const Moments& tilde, const NoiseScales& scales, Rng& rng);

enum class Status { kOk, kRejectSelection, kRejectWitness, kNumerical };
std::string to_string(Status s);

struct EstimateBundle {
  Status status = Status::kOk;
  std::string message;
  std::vector<std::string> warnings;
  Moments estimates;
  bool noised = false;
  int tau = 0;
  double eta_used = 0.0;
  double tlap_shift = 0.0;
  double C_prime = 0.0;
  double selection_score = 0.0;
  NoiseScales scales;
  dp::PrivacyBudget budget;
  pseudo::Mode mode = pseudo::Mode::kExact;
  Eigen::VectorXd weights;
};

EstimateBundle private_estimate(const Eigen::MatrixXd& Y, const Params& params, Rng& rng);

// The same mechanism with its deterministic parts (Pot solutions, selection
// scores, certification verdicts) memoized so it can be re-run many times on
// one dataset. Certification is monotone in C', so verdicts are cached as an
// accept/reject bracket per selected rate. run() is thread-safe and has the
// same output distribution as private_estimate.
class PrivateMechanism {
 public:
  PrivateMechanism(Eigen::MatrixXd Y, Params params);

  EstimateBundle run(Rng& rng);
  const std::vector<double>& scores();
  PotentialOracle& oracle() { return oracle_; }
  std::size_t certify_calls() const;

 private:
  bool certified(int tau, const Eigen::VectorXd& p, double c_prime);

  Eigen::MatrixXd Y_;
  Params params_;
  PotentialOracle oracle_;
  std::once_flag scores_once_;
  std::vector<double> scores_;
  mutable std::mutex mu_;
  // Per rate: largest rejected and smallest accepted C'.
  std::map<int, std::pair<double, double>> bracket_;
  std::size_t certify_calls_ = 0;
};

// Scores of tau = 1..floor(eta n).
std::vector<double> selection_scores(PotentialOracle& oracle, double eta, double L,
                                     int workers = 1);

// Schema-versioned output; `seed` is echoed when given.
std::string to_json(const EstimateBundle& b, const Params& params,
                    std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace dpsos::estimator

#endif  // DPSOS_ESTIMATOR_HPP_
