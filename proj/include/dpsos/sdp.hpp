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

// Dense/sparse conic solver used by the moment relaxations and the SoS
// certificate checks.
//
// Internally every problem is brought to the conic form
//
//     minimize    c^T x
//     subject to  A x + s = b,   s in K
//
// where K is a product of a zero cone, a nonnegative orthant, second-order
// cones and PSD cones (stored as svec: lower triangle, column major,
// off-diagonals scaled by sqrt(2)). It is solved by ADMM applied to the
// homogeneous self-dual embedding, which also yields infeasibility
// certificates. Iterations are fully deterministic.

#ifndef DPSOS_SDP_HPP_
#define DPSOS_SDP_HPP_

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <iosfwd>
#include <string>
#include <vector>

namespace dpsos::sdp {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

enum class SolveStatus { kOptimal, kInfeasible, kMaxIter };

std::string to_string(SolveStatus s);

struct SolverConfig {
  double feas_tol = 1e-7;
  double gap_tol = 1e-6;
  int max_iter = 50000;
  // Over-relaxation parameter of the ADMM iteration.
  double alpha = 1.5;
  // Residuals are evaluated every `check_every` iterations.
  int check_every = 20;
  // Cap on the summed dimension of all PSD blocks.
  int dim_cap = 400;
  // Relative tolerance for the infeasibility certificate.
  double infeas_tol = 1e-8;
  // Run a slack-minimization phase-1 when max_iter is hit.
  bool phase1 = true;
  int equilibration_passes = 12;
  // Anderson acceleration memory (0 disables).
  int anderson_memory = 10;
};

struct ConeDims {
  int zero = 0;
  int nonneg = 0;
  std::vector<int> soc;  // sizes of second-order cones (t, x) with |x| <= t
  std::vector<int> psd;  // matrix sides of PSD cones

  int rows() const;
  int psd_total() const;
};

struct ConeProgram {
  SparseMatrix A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  ConeDims cones;
};

struct ConeSolution {
  SolveStatus status = SolveStatus::kMaxIter;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd s;
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
  // For kMaxIter: optimal value of the phase-1 problem (max constraint
  // violation needed for feasibility), when it ran.
  double phase1_slack = 0.0;
};

// Solves a conic program. Throws std::invalid_argument on inconsistent
// dimensions and std::length_error("dimension cap exceeded") when the PSD
// blocks exceed cfg.dim_cap.
ConeSolution solve_cone(const ConeProgram& prog, const SolverConfig& cfg = {});

// Dense multi-block SDP in primal standard form:
//
//     minimize    sum_b <C_b, X_b>
//     subject to  sum_b <A_jb, X_b>  (=, >=, <=)  r_j,   X_b PSD.
enum class Sense { kEq, kGeq, kLeq };

struct SdpConstraint {
  std::vector<Eigen::MatrixXd> blocks;
  double rhs = 0.0;
  Sense sense = Sense::kEq;
};

struct SdpProblem {
  std::vector<int> block_dims;
  std::vector<Eigen::MatrixXd> objective;
  std::vector<SdpConstraint> constraints;
};

struct SdpSolution {
  SolveStatus status = SolveStatus::kMaxIter;
  std::vector<Eigen::MatrixXd> blocks;
  double objective_value = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double dual_gap = 0.0;
  int iterations = 0;
};

// Throws std::invalid_argument("non-symmetric input") if any matrix is
// asymmetric beyond 1e-12, and std::length_error past cfg.dim_cap.
SdpSolution solve(const SdpProblem& problem, const SolverConfig& cfg = {});

// Writes the problem as plain-text sparse triplets:
//   "objective <block> <i> <j> <value>"
//   "constraint <index> <sense> <rhs>" followed by "<block> <i> <j> <value>"
// Only the upper triangle (i <= j) of each matrix is emitted, 1-based.
void dump_triplets(const SdpProblem& problem, std::ostream& os);

// svec helpers (lower triangle, column major, sqrt(2)-scaled off-diagonal).
Eigen::VectorXd svec(const Eigen::MatrixXd& m);
Eigen::MatrixXd smat(const Eigen::Ref<const Eigen::VectorXd>& v, int n);
inline int svec_size(int n) { return n * (n + 1) / 2; }
// Position of entry (i, j), i >= j, inside svec of an n x n matrix.
inline int svec_index(int n, int i, int j) {
  return j * n - j * (j - 1) / 2 + (i - j);
}

}  // namespace dpsos::sdp

#endif  // DPSOS_SDP_HPP_
