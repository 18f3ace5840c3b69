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


#include "dpsos/audit.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "dpsos/contamination.hpp"
#include "json.hpp"

namespace dpsos::audit {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd gaussian(int n, std::uint64_t seed) {
  Rng rng(seed);
  contamination::CleanSpec spec;
  spec.n = n;
  return contamination::sample_clean(spec, rng);
}

TEST(ClopperPearson, BoundaryCasesHaveClosedForms) {
  const double a = 0.05;
  auto [lo0, hi0] = clopper_pearson(0, 50, a);
  EXPECT_EQ(lo0, 0.0);
  EXPECT_NEAR(hi0, 1 - std::pow(a / 2, 1.0 / 50), 1e-12);
  auto [lon, hin] = clopper_pearson(50, 50, a);
  EXPECT_NEAR(lon, std::pow(a / 2, 1.0 / 50), 1e-12);
  EXPECT_EQ(hin, 1.0);
  auto [l, h] = clopper_pearson(20, 50, a);
  auto [l2, h2] = clopper_pearson(30, 50, a);
  EXPECT_NEAR(l, 1 - h2, 1e-12);
  EXPECT_NEAR(h, 1 - l2, 1e-12);
  EXPECT_LT(l, 0.4);
  EXPECT_GT(h, 0.4);
  EXPECT_THROW(clopper_pearson(3, 2, a), std::invalid_argument);
}

TEST(EmpiricalEpsilon, IndependentCoinGivesNearZero) {
  Mechanism coin = [](const MatrixXd&, Rng& r) -> std::optional<double> {
    return r.uniform() < 0.5 ? std::optional<double>() : std::optional<double>(r.normal());
  };
  const MatrixXd Y = MatrixXd::Zero(1, 1), Yp = MatrixXd::Ones(1, 1);
  EpsilonConfig cfg;
  cfg.trials = 20000;
  cfg.eps = 0.5;
  EpsilonEstimate e = empirical_epsilon(coin, Y, Yp, cfg);
  EXPECT_LT(e.eps_hat, 0.15);
  EXPECT_FALSE(e.violation);
  EXPECT_LE(e.ci_lo, e.eps_hat);
  EXPECT_LE(e.eps_hat, e.ci_hi);
  EXPECT_GT(e.rejects_y, 9000);
  EXPECT_EQ(e.method, "histogram-lr");
}

Mechanism laplace(double eps0) {
  return [eps0](const MatrixXd& Y, Rng& r) -> std::optional<double> {
    return Y(0, 0) + r.laplace(1.0 / eps0);
  };
}

// The Laplace likelihood ratio is exactly e^{eps0} on the tails.
TEST(EmpiricalEpsilon, LaplaceMechanismRecoversItsEpsilon) {
  const double eps0 = 1.0;
  EpsilonConfig cfg;
  cfg.trials = 1000000;
  cfg.eps = eps0;
  EpsilonEstimate e =
      empirical_epsilon(laplace(eps0), MatrixXd::Zero(1, 1), MatrixXd::Ones(1, 1), cfg);
  EXPECT_GE(e.eps_hat, 0.8 * eps0);
  EXPECT_LE(e.eps_hat, eps0);
  EXPECT_FALSE(e.violation);
}

TEST(EmpiricalEpsilon, FlagsAMechanismThatLeaksMoreThanClaimed) {
  EpsilonConfig cfg;
  cfg.trials = 50000;
  cfg.eps = 1.0;
  EpsilonEstimate e =
      empirical_epsilon(laplace(3.0), MatrixXd::Zero(1, 1), MatrixXd::Ones(1, 1), cfg);
  EXPECT_TRUE(e.violation);
  EXPECT_GT(e.ci_lo, 1.0);
}

TEST(EmpiricalEpsilon, WorkerCountDoesNotChangeTheResult) {
  EpsilonConfig cfg;
  cfg.trials = 20000;
  EpsilonEstimate a =
      empirical_epsilon(laplace(1.0), MatrixXd::Zero(1, 1), MatrixXd::Ones(1, 1), cfg);
  cfg.workers = 3;
  EpsilonEstimate b =
      empirical_epsilon(laplace(1.0), MatrixXd::Zero(1, 1), MatrixXd::Ones(1, 1), cfg);
  EXPECT_EQ(a.eps_hat, b.eps_hat);
  EXPECT_EQ(a.ci_lo, b.ci_lo);
}

// Coarse quantile edges are a subset of the fine ones, and a merged
// bucket's likelihood ratio lies between its parts'.
TEST(EpsilonFromSamples, RefiningBucketsDoesNotDecreaseTheHistogramRatio) {
  Rng rng(4);
  std::vector<std::optional<double>> a, b;
  for (int i = 0; i < 200000; ++i) {
    a.push_back(rng.laplace(1.0));
    b.push_back(1.0 + rng.laplace(1.0));
  }
  double last = 0;
  for (int buckets : {5, 10, 20, 40}) {
    EpsilonConfig cfg;
    cfg.buckets = buckets;
    cfg.delta = 0;
    EpsilonEstimate e = epsilon_from_samples(a, b, cfg);
    EXPECT_GE(e.eps_histogram, last - 1e-12) << buckets;
    EXPECT_LE(e.eps_hat, e.eps_histogram);
    last = e.eps_histogram;
  }
}

TEST(EpsilonFromSamples, SparseBucketsAreMerged) {
  std::vector<std::optional<double>> a(150, 0.0), b(150, 1.0);
  EpsilonConfig cfg;
  cfg.buckets = 20;
  EpsilonEstimate e = epsilon_from_samples(a, b, cfg);
  EXPECT_LE(e.buckets, 4);
}

TEST(StabilityAudit, IdenticalDatasetsHaveZeroDistances) {
  const MatrixXd Y = gaussian(40, 1);
  StabilityParams p;
  p.tau = 3;
  p.system.mode = pseudo::Mode::kPinned;
  StabilityReport r = stability_audit(Y, Y, p);
  ASSERT_EQ(r.status, "ok");
  EXPECT_EQ(r.pot_diff, 0.0);
  EXPECT_EQ(r.weight_l1, 0.0);
  EXPECT_EQ(r.mean_mahalanobis, 0.0);
  EXPECT_NEAR(r.cov_multiplicative, 0.0, 1e-12);
  EXPECT_TRUE(r.pot_pass && r.weight_pass && r.mean_pass && r.cov_pass);
  EXPECT_DOUBLE_EQ(r.pot_bound, 20 * p.L);
  EXPECT_DOUBLE_EQ(r.weight_bound, 120 * std::sqrt(p.L / 40));
}

TEST(StabilityAudit, SymmetricInThePair) {
  const MatrixXd Y = gaussian(60, 2);
  const auto [A, B] = contamination::adjacent_pair(Y, 5, VectorXd::Constant(1, 40.0));
  StabilityParams p;
  p.tau = 4;
  p.system.mode = pseudo::Mode::kPinned;
  StabilityReport ab = stability_audit(A, B, p), ba = stability_audit(B, A, p);
  ASSERT_EQ(ab.status, "ok");
  EXPECT_NEAR(ab.pot_diff, ba.pot_diff, ab.tol);
  EXPECT_NEAR(ab.weight_l1, ba.weight_l1, 1e-6);
  EXPECT_NEAR(ab.mean_mahalanobis, ba.mean_mahalanobis, 1e-6);
  EXPECT_NEAR(ab.cov_multiplicative, ba.cov_multiplicative, 1e-6);
}

TEST(StabilityAudit, InfeasibleSideReportsStatusWithoutPassFlags) {
  MatrixXd Y = MatrixXd::Zero(4, 1);
  Y(3, 0) = 1;
  MatrixXd Yp = Y;
  Yp(0, 0) = 1e6;
  StabilityParams p;
  p.C = 0.1;
  p.tau = 0;
  p.system.mode = pseudo::Mode::kPinned;
  StabilityReport r = stability_audit(Y, Yp, p);
  EXPECT_NE(r.status, "ok");
  EXPECT_FALSE(r.pot_pass || r.weight_pass || r.mean_pass || r.cov_pass);
}

TEST(LemmaSuite, DefaultConfigAllChecksPass) {
  LemmaReport r = lemma_suite(LemmaConfig{});
  for (const LemmaCheck& c : r.checks) {
    if (c.applicable) EXPECT_TRUE(c.pass) << c.name << ": " << c.detail;
  }
  EXPECT_TRUE(r.all_pass());
}

TEST(LemmaSuite, ZeroNoiseMutantIsFlaggedByThePrivacyAudit) {
  LemmaConfig cfg;
  cfg.constants.c1 = 0;
  cfg.constants.ct = 0;
  LemmaReport r = lemma_suite(cfg);
  const auto it = std::find_if(r.checks.begin(), r.checks.end(),
                               [](const LemmaCheck& c) { return c.name == "privacy-audit"; });
  ASSERT_NE(it, r.checks.end());
  EXPECT_FALSE(it->pass) << it->detail;
}

TEST(LemmaSuite, GoodIntervalNotApplicableWhenLTooLarge) {
  LemmaConfig cfg;
  cfg.n = 8;
  cfg.L = 2;
  cfg.eta = 0.25;
  LemmaReport r = lemma_suite(cfg);
  const auto it = std::find_if(r.checks.begin(), r.checks.end(),
                               [](const LemmaCheck& c) { return c.name == "good-interval"; });
  ASSERT_NE(it, r.checks.end());
  EXPECT_FALSE(it->applicable);
  EXPECT_NE(summary_table(r).find("n/a"), std::string::npos);
}

TEST(ReportJson, SchemaVersionAndNullForInfinity) {
  EpsilonEstimate e;
  e.eps_hat = std::numeric_limits<double>::infinity();
  nlohmann::json j = nlohmann::json::parse(to_json(e));
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_TRUE(j["eps_hat"].is_null());
}

}  // namespace
}  // namespace dpsos::audit
