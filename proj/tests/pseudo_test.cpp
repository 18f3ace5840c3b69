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


#include "dpsos/pseudo.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "dpsos/contamination.hpp"
#include "dpsos/rng.hpp"

namespace dpsos::pseudo {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd gaussian(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  contamination::CleanSpec spec;
  spec.n = n;
  spec.d = d;
  return contamination::sample_clean(spec, rng);
}

TEST(ConstraintSystem, ValidatesParametersAndCaps) {
  const MatrixXd Y = gaussian(8, 1, 1);
  EXPECT_THROW(build_system(Y, -0.1, 2, 2), std::invalid_argument);
  EXPECT_THROW(build_system(Y, 1.0, 2, 2), std::invalid_argument);
  EXPECT_THROW(build_system(Y, 0.1, 0.0, 2), std::invalid_argument);
  EXPECT_THROW(build_system(Y, 0.1, 2, 0), std::invalid_argument);
  EXPECT_THROW(build_system(gaussian(30, 1, 1), 0.1, 2, 2), std::length_error);
  SystemConfig pinned;
  pinned.mode = Mode::kPinned;
  EXPECT_NO_THROW(build_system(gaussian(30, 1, 1), 0.1, 2, 2, pinned));
}

TEST(ConstraintSystem, SubgaussianConstantAndRateChanges) {
  ConstraintSystem sys = build_system(gaussian(6, 1, 2), 0.25, 1.5, 2);
  EXPECT_DOUBLE_EQ(sys.subgaussian_constant(), 9.0);
  EXPECT_DOUBLE_EQ(sys.with_eta(0.5).eta(), 0.5);
  EXPECT_EQ(sys.counts().booleanity, 6);
  EXPECT_EQ(sys.counts().mass, 1);
}

// Cauchy-Schwarz gives Pot >= (sum pE[w])^2 / n >= (1-eta)^2 n, and any
// feasible integral witness bounds it above.
TEST(MinimizePotential, ExactModeBoundsAndMonotonicity) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const MatrixXd Y = gaussian(10, 1, seed);
    double last = 0.0;
    for (double eta : {0.1, 0.2, 0.3}) {
      PotentialResult r = minimize_potential(build_system(Y, eta, 2.0, 2));
      ASSERT_TRUE(r.pot.feasible());
      const double n = 10;
      EXPECT_GE(r.pot.value, (1 - eta) * (1 - eta) * n - 1e-3 * n);
      EXPECT_LE(r.pot.value, (1 - eta) * n + 1e-3 * n);
      if (eta > 0.1) EXPECT_LE(r.pot.value, last + 1e-3 * n);
      last = r.pot.value;
    }
  }
}

// With every subset certifiable, the uniform mixture over subsets of size
// m = (1 - eta) n is feasible and attains the Cauchy-Schwarz bound m^2 / n.
TEST(MinimizePotential, ConstantDataAttainsLowerBound) {
  const MatrixXd Y = MatrixXd::Ones(8, 1);
  PotentialResult r = minimize_potential(build_system(Y, 0.25, 1.0, 2));
  EXPECT_NEAR(r.pot.value, 36.0 / 8.0, 1e-3);
  EXPECT_LT((r.pe.first_moments() - VectorXd::Constant(8, 0.75)).norm(), 1e-3);
}

TEST(MinimizePotential, InfeasibleTwoPointAtTinyC) {
  // Two far points without removal: the two-point law is 4-certifiably
  // C-subgaussian only for (2C)^2 >= 1.
  MatrixXd Y(2, 1);
  Y << 0, 1e6;
  EXPECT_FALSE(minimize_potential(build_system(Y, 0.0, 0.1, 2)).pot.feasible());
  EXPECT_FALSE(feasible(build_system(Y, 0.0, 0.1, 2), 4));
  EXPECT_TRUE(minimize_potential(build_system(Y, 0.0, 1.0, 2)).pot.feasible());
}

TEST(MinimizePotential, PinnedModeDownweightsOutlier) {
  MatrixXd Y(21, 1);
  for (int i = 0; i < 10; ++i) {
    Y(i, 0) = 1;
    Y(10 + i, 0) = -1;
  }
  Y(20, 0) = 1000;
  SystemConfig cfg;
  cfg.mode = Mode::kPinned;
  PotentialResult r = minimize_potential(build_system(Y, 0.1, 2, 2, cfg));
  ASSERT_TRUE(r.pot.feasible());
  WeightVector w = extract_weights(r.pe);
  EXPECT_LT(w.p(20), 1e-6);
  EXPECT_NEAR(w.p.sum(), 1.0, 1e-12);
}

TEST(MinimizePotential, ScalarFastPathMatchesConicRoute) {
  Rng rng(3);
  contamination::CleanSpec spec;
  spec.n = 60;
  MatrixXd X = contamination::sample_clean(spec, rng);
  contamination::Adversary adv;
  adv.eta = 0.1;
  adv.offset = 6;
  const MatrixXd Y = contamination::corrupt(X, adv, rng).Y;
  for (double eta : {0.05, 0.1, 0.2}) {
    for (double C : {0.6, 1.0, 2.0}) {
      SystemConfig fast, slow;
      fast.mode = slow.mode = Mode::kPinned;
      slow.scalar_fast_path = false;
      PotentialResult a = minimize_potential(build_system(Y, eta, C, 2, fast));
      PotentialResult b = minimize_potential(build_system(Y, eta, C, 2, slow));
      ASSERT_EQ(a.pot.feasible(), b.pot.feasible()) << "eta " << eta << " C " << C;
      if (a.pot.feasible()) EXPECT_NEAR(a.pot.value, b.pot.value, 1e-3 * 60);
    }
  }
}

TEST(PseudoExpectation, ZeroOutAndWeights) {
  PotentialResult r = minimize_potential(build_system(gaussian(6, 1, 5), 0.2, 2.0, 2));
  PseudoExpectation z = zero_out(r.pe, 2);
  EXPECT_EQ(z.value({2}), 0.0);
  for (const auto& s : z.sets) {
    if (std::find(s.begin(), s.end(), 2) != s.end()) EXPECT_EQ(z.value(s), 0.0);
  }
  EXPECT_EQ(z.value({}), 1.0);
  WeightVector w = extract_weights(z);
  EXPECT_EQ(w.p(2), 0.0);
  EXPECT_NEAR(w.p.sum(), 1.0, 1e-12);
  // Moment matrix of a valid pseudo-expectation is PSD.
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(r.pe.moment_matrix());
  EXPECT_GT(es.eigenvalues()(0), -1e-5);
}

TEST(PseudoExpectation, DegenerateWeightsThrow) {
  PseudoExpectation pe;
  pe.n = 2;
  pe.degree = 2;
  pe.sets = {{}, {0}, {1}};
  pe.values = Eigen::Vector3d(1, 0, 0);
  pe.build_index();
  EXPECT_THROW(extract_weights(pe), std::domain_error);
  EXPECT_THROW(normalize_weights(VectorXd::Zero(3)), std::domain_error);
}

TEST(PseudoExpectation, JsonRoundTrip) {
  PotentialResult r = minimize_potential(build_system(gaussian(5, 1, 6), 0.2, 2.0, 2));
  PseudoExpectation back = pseudo_expectation_from_json(to_json(r.pe));
  EXPECT_EQ(back.sets, r.pe.sets);
  EXPECT_LT((back.values - r.pe.values).norm(), 1e-12);
  EXPECT_EQ(back.degree, r.pe.degree);
}

TEST(Residuals, OwnSolutionSatisfiesItsSystem) {
  ConstraintSystem sys = build_system(gaussian(6, 1, 7), 0.2, 2.0, 2);
  PotentialResult r = minimize_potential(sys);
  ResidualReport rep = check_residuals(r.pe, sys);
  EXPECT_TRUE(rep.ok);
  EXPECT_GE(rep.mass_slack, -1e-4);
  EXPECT_GE(rep.moment_min_eig, -1e-5);
}

TEST(Mode, StringRoundTrip) {
  EXPECT_EQ(mode_from_string(to_string(Mode::kExact)), Mode::kExact);
  EXPECT_EQ(mode_from_string(to_string(Mode::kPinned)), Mode::kPinned);
  EXPECT_EQ(mode_from_string("pinned"), Mode::kPinned);
  EXPECT_THROW(mode_from_string("bogus"), std::invalid_argument);
}

}  // namespace
}  // namespace dpsos::pseudo
