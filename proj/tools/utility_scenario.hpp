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


// The desk-scale robust-utility experiment shared by the envelope
// calibration tool and the acceptance gate: 1-d standard Gaussian inliers,
// n = 2000, a 5% far-cluster adversary, pinned mode, eps = 1, delta = 1e-6.

#ifndef DPSOS_TOOLS_UTILITY_SCENARIO_HPP_
#define DPSOS_TOOLS_UTILITY_SCENARIO_HPP_

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdint>

#include "dpsos/contamination.hpp"
#include "dpsos/estimator.hpp"

namespace dpsos::scenario {

struct UtilityOutcome {
  estimator::Status status = estimator::Status::kOk;
  // Against the inlier law N(0, 1): |Sigma^{-1/2} (mu_hat - mu)| and
  // ||Sigma^{-1/2} Sigma_hat Sigma^{-1/2} - I||_op.
  double mean_error = 0.0;
  double cov_error = 0.0;
  dp::PrivacyBudget budget;
};

inline estimator::Params utility_params() {
  estimator::Params p;
  p.eta = 0.05;
  p.C = 2.0;
  p.k = 2;
  p.eps = 1.0;
  p.delta = 1e-6;
  p.L = 2.0;
  p.system.mode = pseudo::Mode::kPinned;
  return p;
}

inline UtilityOutcome run_utility(std::uint64_t seed, int workers = 1) {
  Rng root(seed);
  Rng data_rng = root.split(1), adv_rng = root.split(2), mech_rng = root.split(3);
  contamination::CleanSpec spec;
  spec.n = 2000;
  spec.d = 1;
  const Eigen::MatrixXd X = contamination::sample_clean(spec, data_rng);
  contamination::Adversary adv;
  adv.kind = contamination::AdversaryKind::kFarCluster;
  adv.eta = 0.05;
  const Eigen::MatrixXd Y = contamination::corrupt(X, adv, adv_rng).Y;
  estimator::Params p = utility_params();
  p.workers = workers;
  const estimator::EstimateBundle b = estimator::private_estimate(Y, p, mech_rng);
  UtilityOutcome out;
  out.status = b.status;
  out.budget = b.budget;
  if (b.status == estimator::Status::kOk) {
    out.mean_error = b.estimates.mean.norm();
    const Eigen::MatrixXd diff =
        b.estimates.cov - Eigen::MatrixXd::Identity(b.estimates.cov.rows(), b.estimates.cov.cols());
    out.cov_error = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(diff)
                        .eigenvalues()
                        .cwiseAbs()
                        .maxCoeff();
  }
  return out;
}

}  // namespace dpsos::scenario

#endif  // DPSOS_TOOLS_UTILITY_SCENARIO_HPP_
