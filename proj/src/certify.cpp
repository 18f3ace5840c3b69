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

#include "dpsos/certify.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gram.hpp"
#include "json.hpp"

namespace dpsos::certify {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double sos_margin(const poly::Polynomial& form, int d, int half,
                  const sdp::SolverConfig& cfg, MatrixXd* gram,
                  sdp::SolveStatus* status) {
  detail::GramLayout lay(d, half);
  const int side = lay.side();
  const int nh = sdp::svec_size(side);
  const int rows = lay.rows();
  std::vector<double> target = lay.coefficients(form);

  // Variables: svec(H) then lambda; form = z^T (H + lambda I) z, H PSD.
  sdp::ConeProgram prog;
  prog.cones.zero = rows;
  prog.cones.psd = {side};
  const int m = prog.cones.rows();
  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& e : lay.entries) trip.emplace_back(e.row, e.svec_pos, e.coef);
  for (int a = 0; a < side; ++a) {
    trip.emplace_back(lay.row_of.at(lay.half[a] * lay.half[a]), nh, 1.0);
  }
  for (int i = 0; i < nh; ++i) trip.emplace_back(rows + i, i, -1.0);
  prog.A.resize(m, nh + 1);
  prog.A.setFromTriplets(trip.begin(), trip.end());
  prog.b = VectorXd::Zero(m);
  for (int r = 0; r < rows; ++r) prog.b(r) = target[r];
  prog.c = VectorXd::Zero(nh + 1);
  prog.c(nh) = -1.0;

  sdp::SolverConfig c = cfg;
  c.phase1 = false;
  sdp::ConeSolution sol = sdp::solve_cone(prog, c);
  if (status) *status = sol.status;
  if (sol.x.size() != nh + 1) {
    if (gram) *gram = MatrixXd();
    return -std::numeric_limits<double>::infinity();
  }
  const double lambda = sol.x(nh);
  if (gram) {
    *gram = sdp::smat(sol.x.head(nh), side) + lambda * MatrixXd::Identity(side, side);
  }
  return lambda;
}

MatrixXd whiten(const VectorXd& p, const MatrixXd& Y, double rank_tol) {
  const int d = static_cast<int>(Y.cols());
  VectorXd mu = Y.transpose() * p;
  MatrixXd centered = Y.rowwise() - mu.transpose();
  MatrixXd cov = centered.transpose() * p.asDiagonal() * centered;
  cov = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(cov);
  const VectorXd& ev = es.eigenvalues();
  const double top = d > 0 ? ev(d - 1) : 0.0;
  // Spread below rounding noise of the centering counts as a point mass.
  const double floor = 64 * std::numeric_limits<double>::epsilon() * Y.cwiseAbs().maxCoeff();
  if (!(top > floor * floor)) return MatrixXd(Y.rows(), 0);
  std::vector<int> keep;
  for (int j = 0; j < d; ++j) {
    if (ev(j) > rank_tol * top) keep.push_back(j);
  }
  MatrixXd t(d, keep.size());
  for (std::size_t c = 0; c < keep.size(); ++c) {
    t.col(c) = es.eigenvectors().col(keep[c]) / std::sqrt(ev(keep[c]));
  }
  return centered * t;
}

poly::Polynomial difference_polynomial(const VectorXd& p, const MatrixXd& z, double C,
                                       int k) {
  const int r = static_cast<int>(z.cols());
  const double big_k = std::pow(C * k, k);
  poly::Polynomial q = detail::norm_power(r, k) * big_k;
  std::vector<double> row(r);
  for (int i = 0; i < z.rows(); ++i) {
    if (p(i) == 0.0) continue;
    for (int j = 0; j < r; ++j) row[j] = z(i, j);
    q = q - detail::linear_power(row.data(), r, 2 * k) * p(i);
  }
  return q;
}

namespace {

void check_inputs(const VectorXd& p, const MatrixXd& Y, int k) {
  if (p.size() != Y.rows()) throw std::invalid_argument("weight/data size mismatch");
  if (p.size() == 0) throw std::invalid_argument("empty dataset");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (p.minCoeff() < 0.0) throw std::invalid_argument("negative weight");
  if (std::abs(p.sum() - 1.0) > 1e-6) throw std::invalid_argument("weights must sum to 1");
}

}  // namespace

SubgaussianCertificate check_subgaussian(const VectorXd& p, const MatrixXd& Y, double C,
                                         int k, const CertifyConfig& cfg) {
  check_inputs(p, Y, k);
  if (!(C > 0.0)) throw std::invalid_argument("C must be positive");
  SubgaussianCertificate cert;
  cert.c_tested = C;
  cert.k = k;
  MatrixXd z = whiten(p, Y, cfg.rank_tol);
  cert.rank = static_cast<int>(z.cols());
  if (cert.rank == 0) {
    // Point mass: the difference polynomial vanishes identically.
    cert.accepted = true;
    return cert;
  }
  // SoS-ness is scale invariant; solve on q / max(1, (Ck)^k) for conditioning.
  const double scale = std::max(1.0, std::pow(C * k, k));
  poly::Polynomial q = difference_polynomial(p, z, C, k) * (1.0 / scale);
  MatrixXd gram;
  sdp::SolveStatus st;
  const double lambda = sos_margin(q, cert.rank, k, cfg.solver, &gram, &st);
  cert.status = st;
  cert.slack = lambda * scale;
  cert.accepted = st == sdp::SolveStatus::kOptimal && lambda >= -cfg.accept_tol;
  if (cert.accepted) cert.gram = gram * scale;
  return cert;
}

double min_certifiable_C(const VectorXd& p, const MatrixXd& Y, int k, double tol,
                         double c_max, const CertifyConfig& cfg) {
  check_inputs(p, Y, k);
  double lo = 1e-6;
  double hi = c_max;
  if (check_subgaussian(p, Y, lo, k, cfg).accepted) return lo;
  if (!check_subgaussian(p, Y, hi, k, cfg).accepted) {
    return std::numeric_limits<double>::infinity();
  }
  for (int it = 0; it < 40 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    (check_subgaussian(p, Y, mid, k, cfg).accepted ? hi : lo) = mid;
  }
  return hi;
}

std::string to_json(const SubgaussianCertificate& cert) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["accepted"] = cert.accepted;
  j["C_tested"] = cert.c_tested;
  j["k"] = cert.k;
  j["slack"] = cert.slack;
  j["rank"] = cert.rank;
  j["solver_status"] = sdp::to_string(cert.status);
  nlohmann::json g = nlohmann::json::array();
  for (int i = 0; i < cert.gram.rows(); ++i) {
    std::vector<double> row(cert.gram.cols());
    for (int c = 0; c < cert.gram.cols(); ++c) row[c] = cert.gram(i, c);
    g.push_back(row);
  }
  j["gram"] = g;
  return j.dump();
}

}  // namespace dpsos::certify
