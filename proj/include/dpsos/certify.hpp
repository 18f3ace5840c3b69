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

// Sum-of-squares certificates of subgaussianity for weighted datasets.
//
// A weighted dataset (p, Y) is 2k-certifiably C-subgaussian when
//
//     q(v) = (Ck)^k (sum_i p_i <y_i - mu, v>^2)^k - sum_i p_i <y_i - mu, v>^{2k}
//
// is a sum of squares in v, mu = sum_i p_i y_i. We whiten by the weighted
// covariance (restricted to its column space) and search for a Gram matrix.

#ifndef DPSOS_CERTIFY_HPP_
#define DPSOS_CERTIFY_HPP_

#include <Eigen/Dense>
#include <string>

#include "dpsos/poly.hpp"
#include "dpsos/sdp.hpp"

namespace dpsos::certify {

struct SubgaussianCertificate {
  bool accepted = false;
  double c_tested = 0.0;
  int k = 2;
  // Gram matrix over degree-k monomials of the whitened direction; q equals
  // z^T gram z. Present (non-empty) iff accepted.
  Eigen::MatrixXd gram;
  // Smallest eigenvalue of the Gram matrix (best achievable).
  double slack = 0.0;
  // Rank of the weighted covariance the check was restricted to.
  int rank = 0;
  sdp::SolveStatus status = sdp::SolveStatus::kOptimal;
};

struct CertifyConfig {
  // Accept when the Gram slack is >= -accept_tol.
  double accept_tol = 1e-7;
  // Relative eigenvalue cut for the covariance column space.
  double rank_tol = 1e-10;
  sdp::SolverConfig solver;
};

// Largest lambda such that form(v) - lambda * |z(v)|^2 is a sum of squares,
// z(v) = degree-`half` monomials in v_1..v_d. Optionally returns the Gram
// matrix G with form = z^T G z (so lambda_min(G) = lambda at the optimum).
double sos_margin(const poly::Polynomial& form, int d, int half,
                  const sdp::SolverConfig& cfg, Eigen::MatrixXd* gram = nullptr,
                  sdp::SolveStatus* status = nullptr);

// The (whitened) difference polynomial q for C and k. Rows of `whitened`
// are the points mapped to coordinates where the weighted covariance is I.
poly::Polynomial difference_polynomial(const Eigen::VectorXd& p,
                                       const Eigen::MatrixXd& whitened, double C,
                                       int k);

// Weighted centering + whitening. Returns the transformed rows (n x r).
Eigen::MatrixXd whiten(const Eigen::VectorXd& p, const Eigen::MatrixXd& Y,
                       double rank_tol = 1e-10);

SubgaussianCertificate check_subgaussian(const Eigen::VectorXd& p,
                                         const Eigen::MatrixXd& Y, double C,
                                         int k, const CertifyConfig& cfg = {});

// Smallest accepted C in [1e-6, c_max] by bisection to within tol; +inf
// when even c_max is rejected.
double min_certifiable_C(const Eigen::VectorXd& p, const Eigen::MatrixXd& Y,
                         int k, double tol = 1e-4, double c_max = 1e3,
                         const CertifyConfig& cfg = {});

std::string to_json(const SubgaussianCertificate& cert);

}  // namespace dpsos::certify

#endif  // DPSOS_CERTIFY_HPP_
