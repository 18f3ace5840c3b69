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


#include "dpsos/dp.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "json.hpp"

namespace dpsos::dp {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double normal_pdf(double x, double mu, double var) {
  return std::exp(-0.5 * (x - mu) * (x - mu) / var) / std::sqrt(2 * M_PI * var);
}

// Composite Simpson rule for int [p - alpha q]_+ over a wide window.
double hockey_quadrature(double mp, double vp, double mq, double vq, double alpha) {
  const double sd = std::sqrt(std::max(vp, vq));
  const double lo = std::min(mp, mq) - 40 * sd, hi = std::max(mp, mq) + 40 * sd;
  const int m = 400000;
  const double h = (hi - lo) / m;
  double s = 0;
  for (int i = 0; i <= m; ++i) {
    const double x = lo + i * h;
    const double f = std::max(0.0, normal_pdf(x, mp, vp) - alpha * normal_pdf(x, mq, vq));
    s += f * (i == 0 || i == m ? 1 : (i % 2 ? 4 : 2));
  }
  return s * h / 3;
}

TEST(TruncatedLaplace, ParamsTailAndCdf) {
  const TruncatedLaplaceParams t = tlap_params(2.0, 0.5, 1e-3);
  EXPECT_DOUBLE_EQ(t.mu, -2.0 * (1 + std::log(1e3) / 0.5));
  EXPECT_DOUBLE_EQ(t.b, 4.0);
  const double y = t.mu - 3.0;
  const double expect = std::exp((y - t.mu) / t.b) / (2 - std::exp(t.mu / t.b));
  EXPECT_NEAR(tlap_tail(t, y), expect, 1e-15);
  EXPECT_NEAR(tlap_cdf(t, y), expect, 1e-15);
  EXPECT_DOUBLE_EQ(tlap_cdf(t, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(tlap_cdf(t, 1.0), 1.0);
  EXPECT_THROW(tlap_tail(t, t.mu + 1), std::domain_error);
  Rng rng(1);
  EXPECT_THROW(sample_tlap({1.0, 1.0}, rng), std::invalid_argument);
  EXPECT_THROW(sample_tlap({-1.0, 0.0}, rng), std::invalid_argument);
}

TEST(TruncatedLaplace, CdfIsMonotoneAndContinuousAtMu) {
  const TruncatedLaplaceParams t{-3.0, 1.5};
  double last = 0;
  for (double y = -30; y <= 0; y += 0.01) {
    const double c = tlap_cdf(t, y);
    EXPECT_GE(c, last - 1e-15);
    last = c;
  }
  EXPECT_NEAR(tlap_cdf(t, -3.0 - 1e-9), tlap_cdf(t, -3.0 + 1e-9), 1e-8);
}

TEST(TruncatedLaplace, EmpiricalCdfAndNegativity) {
  const TruncatedLaplaceParams t = tlap_params(1.0, 1.0, 1e-2);
  Rng rng(17);
  const int N = 200000;
  std::vector<double> xs(N);
  for (double& x : xs) {
    x = sample_tlap(t, rng);
    ASSERT_LT(x, 0.0);
  }
  for (double y : {t.mu - 4, t.mu - 1, t.mu, t.mu + 1, t.mu / 4}) {
    const double p = tlap_cdf(t, y);
    const double emp = std::count_if(xs.begin(), xs.end(), [&](double x) { return x < y; }) /
                       static_cast<double>(N);
    EXPECT_LE(std::abs(emp - p), 4 * std::sqrt(p * (1 - p) / N) + 1e-12) << "y " << y;
  }
}

TEST(Select, ReleasesOnlyAboveThresholdAndPrefersHighScores) {
  Rng rng(3);
  std::vector<double> scores = {0, 5, 60, 2};
  const double kappa = 10;
  int released = 0, top = 0;
  for (int i = 0; i < 5000; ++i) {
    SelectionResult r = select(scores, 1.0, 1.0, 1e-3, kappa, rng);
    EXPECT_EQ(r.score, scores[r.drawn]);
    if (r.index) {
      ++released;
      EXPECT_GE(scores[*r.index], kappa);
      EXPECT_GE(r.score + r.noise, kappa);
      top += *r.index == 2;
    }
    EXPECT_LT(r.noise, 0.0);
  }
  EXPECT_EQ(released, top);
  EXPECT_GT(released, 4900);
}

TEST(Select, QueriesEachScoreOnce) {
  Rng rng(1);
  int calls = 0;
  select(7, [&](std::size_t i) { ++calls; return static_cast<double>(i); }, 1.0, 1.0, 1e-3,
         0.0, rng);
  EXPECT_EQ(calls, 7);
}

TEST(Select, MarginFormula) {
  EXPECT_NEAR(selection_margin(2.0, 0.5, 10, 0.1, 1e-3),
              12 * (2.0 / 0.5) * std::log(10 / (0.1 * 1e-3)), 1e-9);
  SelectionConfig cfg;
  cfg.utility_constant = 3;
  EXPECT_NEAR(selection_margin(1.0, 1.0, 4, 0.5, 0.5, cfg), 3 * std::log(16.0), 1e-12);
}

TEST(HockeyStick, OneDimensionMatchesQuadrature) {
  struct Case {
    double mp, vp, mq, vq, alpha;
  };
  for (const Case& c : {Case{0, 1, 0.5, 1, std::exp(0.5)}, Case{0, 1, 0, 1.3, 1.0},
                        Case{1, 2, -1, 0.5, std::exp(1.0)}, Case{0, 1, 0, 1, 1.0},
                        Case{0, 1, 3, 1, std::exp(2.0)}}) {
    GaussianSpec p{VectorXd::Constant(1, c.mp), MatrixXd::Constant(1, 1, c.vp)};
    GaussianSpec q{VectorXd::Constant(1, c.mq), MatrixXd::Constant(1, 1, c.vq)};
    DivergenceEstimate e = hockey_stick(p, q, c.alpha);
    EXPECT_TRUE(e.exact);
    EXPECT_NEAR(e.value, hockey_quadrature(c.mp, c.vp, c.mq, c.vq, c.alpha), 1e-6);
  }
}

TEST(HockeyStick, MonteCarloAgreesWithProductClosedForm) {
  // Independent coordinates where only the first differs: reduces to 1-d.
  GaussianSpec p{VectorXd::Zero(3), MatrixXd::Identity(3, 3)};
  GaussianSpec q = p;
  q.mean(0) = 0.8;
  const double alpha = std::exp(0.3);
  HockeyStickConfig cfg;
  cfg.samples = 400000;
  DivergenceEstimate e = hockey_stick(p, q, alpha, cfg);
  EXPECT_FALSE(e.exact);
  const double truth = hockey_quadrature(0, 1, 0.8, 1, alpha);
  EXPECT_LE(e.ci_lo - 1e-3, truth);
  EXPECT_GE(e.ci_hi + 1e-3, truth);
}

TEST(HockeyStick, SingularCovariancesMustShareColumnSpace) {
  GaussianSpec p{VectorXd::Zero(2), MatrixXd::Zero(2, 2)};
  p.cov(0, 0) = 1;
  GaussianSpec q{VectorXd::Zero(2), MatrixXd::Zero(2, 2)};
  q.cov(1, 1) = 1;
  EXPECT_THROW(hockey_stick(p, q, 1.0), std::invalid_argument);
}

TEST(HockeyStick, TriangleInequality) {
  GaussianSpec p{VectorXd::Zero(1), MatrixXd::Identity(1, 1)};
  GaussianSpec q{VectorXd::Constant(1, 0.3), MatrixXd::Constant(1, 1, 1.1)};
  GaussianSpec r{VectorXd::Constant(1, 0.7), MatrixXd::Constant(1, 1, 0.9)};
  for (double eps : {0.1, 0.5, 1.0, 2.0}) EXPECT_TRUE(hockey_triangle_check(p, q, r, eps).ok);
}

TEST(NoiseThresholds, Formulas) {
  EXPECT_NEAR(linear_noise_threshold(2, 1.0, 1e-6), 1.0 / (3 * 2 * std::log(2e6)), 1e-15);
  EXPECT_NEAR(tensored_noise_threshold(2, 2, 1.0, 1e-6), 1.0 / (8 * 4 * 4 * std::log(4e6)),
              1e-15);
  EXPECT_TRUE(linear_noise_admissible(0.01, 2, 1.0, 1e-6));
  EXPECT_FALSE(linear_noise_admissible(0.02, 2, 1.0, 1e-6));
  EXPECT_TRUE(tensored_noise_admissible(5e-4, 2, 2, 1.0, 1e-6));
  EXPECT_FALSE(tensored_noise_admissible(6e-4, 2, 2, 1.0, 1e-6));
}

TEST(PrivacyBudget, ComposesBySummation) {
  PrivacyBudget b;
  b.append("a", 0.25, 1e-7);
  b.append("b", 0.5, 2e-7);
  const auto [e, d] = compose(b);
  EXPECT_DOUBLE_EQ(e, 0.75);
  EXPECT_DOUBLE_EQ(d, 3e-7);
  EXPECT_EQ(b.stages().size(), 2u);
  EXPECT_THROW(b.append("bad", -1, 0), std::invalid_argument);
  EXPECT_THROW(b.append("bad", 0, std::nan("")), std::invalid_argument);
  nlohmann::json j = nlohmann::json::parse(b.to_json());
  EXPECT_EQ(j["stages"][1]["label"], "b");
  EXPECT_DOUBLE_EQ(j["total"]["eps"].get<double>(), 0.75);
}

}  // namespace
}  // namespace dpsos::dp
