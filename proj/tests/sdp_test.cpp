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


#include "dpsos/sdp.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <random>
#include <sstream>

namespace dpsos::sdp {
namespace {

using Eigen::MatrixXd;

MatrixXd unit(int n, int i, int j) {
  MatrixXd m = MatrixXd::Zero(n, n);
  m(i, j) = m(j, i) = (i == j) ? 1.0 : 0.5;
  return m;
}

MatrixXd random_symmetric(int n, std::mt19937& gen) {
  std::normal_distribution<double> g;
  MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(gen);
  return (a + a.transpose()) / 2.0;
}

TEST(Svec, RoundTripAndInnerProduct) {
  std::mt19937 gen(1);
  for (int n = 1; n <= 5; ++n) {
    MatrixXd a = random_symmetric(n, gen), b = random_symmetric(n, gen);
    EXPECT_LT((smat(svec(a), n) - a).norm(), 1e-12);
    EXPECT_NEAR(svec(a).dot(svec(b)), (a.array() * b.array()).sum(), 1e-10);
    ASSERT_EQ(svec(a).size(), svec_size(n));
    for (int j = 0; j < n; ++j)
      for (int i = j; i < n; ++i) {
        const double scale = i == j ? 1.0 : std::sqrt(2.0);
        EXPECT_NEAR(svec(a)(svec_index(n, i, j)), scale * a(i, j), 1e-12);
      }
  }
}

// min t  s.t.  t I - A PSD  has value lambda_max(A); posed as the dual
// max <A, X> s.t. tr X = 1, X PSD (minimize -<A, X>).
TEST(Solve, LargestEigenvalueMatchesEigenSolver) {
  std::mt19937 gen(3);
  for (int n : {2, 3, 5, 8}) {
    MatrixXd A = random_symmetric(n, gen);
    SdpProblem p;
    p.block_dims = {n};
    p.objective = {-A};
    p.constraints.push_back({{MatrixXd::Identity(n, n)}, 1.0, Sense::kEq});
    SdpSolution s = solve(p);
    ASSERT_EQ(s.status, SolveStatus::kOptimal);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(A);
    EXPECT_NEAR(-s.objective_value, es.eigenvalues()(n - 1), 1e-4);
  }
}

TEST(Solve, TwoByTwoWithFixedOffDiagonal) {
  // min X00 s.t. X01 = 1, X00 = X11, X PSD  -> 1.
  SdpProblem p;
  p.block_dims = {2};
  p.objective = {unit(2, 0, 0)};
  p.constraints.push_back({{unit(2, 0, 1)}, 1.0, Sense::kEq});
  p.constraints.push_back({{unit(2, 0, 0) - unit(2, 1, 1)}, 0.0, Sense::kEq});
  SdpSolution s = solve(p);
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_NEAR(s.objective_value, 1.0, 1e-5);
}

TEST(Solve, InequalitySensesAndMultipleBlocks) {
  // Two 1x1 blocks: min x + 2y s.t. x + y >= 3, x <= 1  -> x = 1, y = 2, value 5.
  SdpProblem p;
  p.block_dims = {1, 1};
  p.objective = {MatrixXd::Constant(1, 1, 1.0), MatrixXd::Constant(1, 1, 2.0)};
  p.constraints.push_back(
      {{MatrixXd::Constant(1, 1, 1.0), MatrixXd::Constant(1, 1, 1.0)}, 3.0, Sense::kGeq});
  p.constraints.push_back(
      {{MatrixXd::Constant(1, 1, 1.0), MatrixXd::Zero(1, 1)}, 1.0, Sense::kLeq});
  SdpSolution s = solve(p);
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_NEAR(s.objective_value, 5.0, 1e-4);
  EXPECT_NEAR(s.blocks[0](0, 0), 1.0, 1e-4);
  EXPECT_NEAR(s.blocks[1](0, 0), 2.0, 1e-4);
}

TEST(Solve, DetectsInfeasibility) {
  // X00 = -1 with X PSD.
  SdpProblem p;
  p.block_dims = {2};
  p.objective = {MatrixXd::Identity(2, 2)};
  p.constraints.push_back({{unit(2, 0, 0)}, -1.0, Sense::kEq});
  EXPECT_EQ(solve(p).status, SolveStatus::kInfeasible);
}

TEST(Solve, RejectsAsymmetricInputAndDimensionCap) {
  SdpProblem p;
  p.block_dims = {2};
  MatrixXd a = MatrixXd::Zero(2, 2);
  a(0, 1) = 1.0;
  p.objective = {a};
  EXPECT_THROW(solve(p), std::invalid_argument);

  SdpProblem big;
  big.block_dims = {30};
  big.objective = {MatrixXd::Identity(30, 30)};
  SolverConfig cfg;
  cfg.dim_cap = 20;
  EXPECT_THROW(solve(big, cfg), std::length_error);
}

TEST(SolveCone, LinearProgramMatchesVertexEnumeration) {
  // min c^T x s.t. G x <= h over the orthant, brute-forced on a grid of
  // vertices of a 2-d polytope.
  SparseMatrix A(4, 2);
  std::vector<Eigen::Triplet<double>> t = {{0, 0, 1}, {0, 1, 2}, {1, 0, 3}, {1, 1, 1},
                                           {2, 0, -1}, {3, 1, -1}};
  A.setFromTriplets(t.begin(), t.end());
  ConeProgram prog;
  prog.A = A;
  prog.b = Eigen::Vector4d(4, 6, 0, 0);
  prog.c = Eigen::Vector2d(-1, -1);
  prog.cones.nonneg = 4;
  ConeSolution s = solve_cone(prog);
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  // Vertices: (0,0), (2,0), (0,2), (1.6, 1.2); best -2.8.
  EXPECT_NEAR(s.objective, -2.8, 1e-5);
}

TEST(SolveCone, SecondOrderCone) {
  // min t s.t. ||(x - 3, y + 4)|| <= t  -> 0 at the free point; with x fixed
  // to 0 and y fixed to 0 the value is 5.
  ConeProgram prog;
  SparseMatrix A(3, 1);
  A.insert(0, 0) = -1.0;
  prog.A = A;
  prog.b = Eigen::Vector3d(0, -3, 4);
  prog.c = Eigen::VectorXd::Ones(1);
  prog.cones.soc = {3};
  ConeSolution s = solve_cone(prog);
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_NEAR(s.objective, 5.0, 1e-5);
}

TEST(SolveCone, DeterministicIterates) {
  std::mt19937 gen(9);
  MatrixXd A = random_symmetric(4, gen);
  SdpProblem p;
  p.block_dims = {4};
  p.objective = {-A};
  p.constraints.push_back({{MatrixXd::Identity(4, 4)}, 1.0, Sense::kEq});
  SdpSolution a = solve(p), b = solve(p);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.objective_value, b.objective_value);
}

TEST(DumpTriplets, UpperTriangleOneBased) {
  SdpProblem p;
  p.block_dims = {2};
  MatrixXd c(2, 2);
  c << 1, 2, 2, 3;
  p.objective = {c};
  p.constraints.push_back({{MatrixXd::Identity(2, 2)}, 1.0, Sense::kGeq});
  std::ostringstream os;
  dump_triplets(p, os);
  const std::string s = os.str();
  EXPECT_NE(s.find("objective 1 1 1 1"), std::string::npos);
  EXPECT_NE(s.find("objective 1 1 2 2"), std::string::npos);
  EXPECT_EQ(s.find("objective 1 2 1"), std::string::npos);
  EXPECT_NE(s.find("objective 1 2 2 3"), std::string::npos);
  EXPECT_NE(s.find("constraint 1"), std::string::npos);
}

}  // namespace
}  // namespace dpsos::sdp
