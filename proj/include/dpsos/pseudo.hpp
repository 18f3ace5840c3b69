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

// Moment relaxations of the robust-estimation constraint system and the
// potential (squared norm of the expected weights) minimized over them.
//
// The program asks for weights w in {0,1}^n keeping at least (1-eta)n
// points such that the kept points are 2k-subgaussian with constant C:
//
//   (1) w_i^2 = w_i                        (2) sum_i w_i >= (1-eta) n
//   (3) mu' = (1/n) sum_i x'_i             (4) w_i (x'_i - y_i) = 0
//   (5) (1/n) sum_i <x'_i - mu', v>^{2k} <= (Ck)^k ((1/n) sum_i <x'_i - mu', v>^2)^k
//
// Two relaxations are provided:
//
// Exact mode (k = 2): a degree-4 pseudo-distribution over w. Booleanity is
// built in by indexing moments with subsets (multilinear monomials). The
// witness x' is identified with the kept points, which turns (5) into the
// center-free pairwise form
//
//   ((K+3)/2) (sum_ij w_i w_j <y_i-y_j,v>^2)^2 >= (sum_l w_l)^2 sum_ij w_i w_j <y_i-y_j,v>^4,
//
// K = (2C)^2, whose pseudo-expectation must be a sum of squares in v.
//
// Pinned mode: a degree-1 relaxation m in [0,1]^n with the mean and
// covariance inside (5) frozen at the previous iterate's weighted estimates,
// iterated to a fixed point. Scales to thousands of points.

#ifndef DPSOS_PSEUDO_HPP_
#define DPSOS_PSEUDO_HPP_

#include <Eigen/Dense>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "dpsos/sdp.hpp"

namespace dpsos::pseudo {

enum class Mode { kExact, kPinned };

std::string to_string(Mode m);
// Accepts "exact", "exact-sdp", "pinned", "pinned-witness".
Mode mode_from_string(const std::string& s);

struct SystemConfig {
  Mode mode = Mode::kExact;
  sdp::SolverConfig solver;
  // Exact-mode instance caps.
  int max_n_exact = 24;
  int max_d_exact = 3;
  // Pinned-mode fixed point.
  int pinned_max_rounds = 10;
  double pinned_tol = 1e-6;
  // Pinned mode: solve rank <= 1 instances as an exact QP instead of an SDP.
  bool scalar_fast_path = true;
  // Relative eigenvalue cut when whitening by the frozen covariance.
  double rank_tol = 1e-10;
};

// Number of constraints in each family of the symbolic system.
struct ConstraintCounts {
  int booleanity = 0;
  int mass = 0;
  int mean = 0;
  int complementarity = 0;
  int subgaussian = 0;
};

class ConstraintSystem {
 public:
  // Throws std::invalid_argument on bad parameters and
  // std::length_error("instance cap") past the exact-mode caps.
  ConstraintSystem(Eigen::MatrixXd Y, double eta, double C, int k, SystemConfig cfg = {});

  const Eigen::MatrixXd& data() const { return Y_; }
  int n() const { return static_cast<int>(Y_.rows()); }
  int d() const { return static_cast<int>(Y_.cols()); }
  double eta() const { return eta_; }
  double C() const { return C_; }
  int k() const { return k_; }
  Mode mode() const { return cfg_.mode; }
  const SystemConfig& config() const { return cfg_; }

  // (Ck)^k.
  double subgaussian_constant() const;
  ConstraintCounts counts() const;

  // Same data and constants at another outlier rate.
  ConstraintSystem with_eta(double eta) const;
  // Same parameters on another dataset of the same shape.
  ConstraintSystem with_data(Eigen::MatrixXd Y) const;

 private:
  Eigen::MatrixXd Y_;
  double eta_;
  double C_;
  int k_;
  SystemConfig cfg_;
};

ConstraintSystem build_system(const Eigen::MatrixXd& Y, double eta, double C, int k,
                              const SystemConfig& cfg = {});

// Pseudo-expectation over multilinear monomials w_S = prod_{i in S} w_i.
struct PseudoExpectation {
  Mode mode = Mode::kExact;
  int n = 0;
  int degree = 0;
  // sets[0] is the empty set (pE[1] = 1).
  std::vector<std::vector<int>> sets;
  Eigen::VectorXd values;
  // Pinned mode: mean/covariance frozen in the last round of the fixed
  // point, its round count and whether it converged.
  Eigen::VectorXd center;
  Eigen::MatrixXd covariance;
  int rounds = 0;
  bool converged = true;

  // pE[w_S] for a sorted set S; 0 when S is not tracked.
  double value(const std::vector<int>& set) const;
  // (pE[w_1], ..., pE[w_n]).
  Eigen::VectorXd first_moments() const;
  // Moment matrix indexed by sets of size <= degree/2 (exact mode only).
  Eigen::MatrixXd moment_matrix() const;

  void build_index();
  std::map<std::vector<int>, int> index;
};

struct PotentialValue {
  // +inf when the system is infeasible.
  double value = std::numeric_limits<double>::infinity();
  double eta = 0.0;
  sdp::SolveStatus status = sdp::SolveStatus::kOptimal;
  bool feasible() const { return value < std::numeric_limits<double>::infinity(); }
};

struct PotentialResult {
  PseudoExpectation pe;
  PotentialValue pot;
};

// True iff a pseudo-distribution of the given degree (must be 2k) satisfies
// the system within the solver tolerance.
bool feasible(const ConstraintSystem& sys, int degree);

// Minimizes sum_i pE[w_i]^2. Infeasible systems return value = +inf; a
// solver that runs out of iterations returns its best iterate with status
// kMaxIter.
PotentialResult minimize_potential(const ConstraintSystem& sys);

// Sets every moment involving w_i to zero.
PseudoExpectation zero_out(const PseudoExpectation& pe, int i);

struct WeightVector {
  Eigen::VectorXd p;
  Mode mode = Mode::kExact;
};

// p_i = pE[w_i] / sum_j pE[w_j]; throws std::domain_error("degenerate
// weights") when the mass vanishes. Tiny negative solver noise is clipped.
WeightVector extract_weights(const PseudoExpectation& pe);

// x / sum(x) for a nonnegative vector.
Eigen::VectorXd normalize_weights(const Eigen::VectorXd& x);

// Constraint residuals of a pseudo-expectation against a system (which may
// use a different dataset or rate than the one that produced it).
struct ResidualReport {
  double booleanity = 0.0;     // exact by construction in the subset basis
  double mass_slack = 0.0;     // sum pE[w_i] - (1-eta) n
  double moment_min_eig = 0.0; // exact mode: smallest eigenvalue of the moment matrix
  double box_violation = 0.0;  // pinned mode: distance of pE[w] from [0,1]^n
  double sos_margin = 0.0;     // best Gram slack of the subgaussianity form (scaled)
  bool ok = false;
};

ResidualReport check_residuals(const PseudoExpectation& pe, const ConstraintSystem& sys,
                               double tol = 1e-5);

std::string to_json(const ConstraintSystem& sys);
std::string to_json(const PseudoExpectation& pe);
PseudoExpectation pseudo_expectation_from_json(const std::string& text);

}  // namespace dpsos::pseudo

#endif  // DPSOS_PSEUDO_HPP_
