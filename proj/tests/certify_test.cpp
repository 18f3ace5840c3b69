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

#include <gtest/gtest.h>

#include <cmath>

#include "dpsos/rng.hpp"
#include "json.hpp"

namespace dpsos::certify {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Weighted central moments of a 1-d dataset.
std::pair<double, double> central_moments(const VectorXd& p, const VectorXd& y) {
  const double mu = p.dot(y);
  double m2 = 0, m4 = 0;
  for (int i = 0; i < y.size(); ++i) {
    const double c = y(i) - mu;
    m2 += p(i) * c * c;
    m4 += p(i) * c * c * c * c;
  }
  return {m2, m4};
}

VectorXd random_weights(int n, Rng& rng) {
  VectorXd p(n);
  for (int i = 0; i < n; ++i) p(i) = rng.uniform();
  return p / p.sum();
}

// In one dimension q(v) = ((2C)^2 m2^2 - m4) v^4, so the test is the
// closed-form moment ratio m4 / m2^2 <= (2C)^2.
TEST(CheckSubgaussian, OneDimensionMatchesMomentRatio) {
  Rng rng(21);
  int compared = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 5 + trial % 20;
    MatrixXd Y(n, 1);
    for (int i = 0; i < n; ++i) Y(i, 0) = trial % 3 == 0 ? rng.laplace(1.0) : rng.normal();
    const VectorXd p = random_weights(n, rng);
    const double C = 0.4 + 1.6 * rng.uniform();
    const auto [m2, m4] = central_moments(p, Y.col(0));
    const double ratio = m4 / (m2 * m2) / (4 * C * C);
    if (std::abs(ratio - 1.0) < 1e-4) continue;
    SubgaussianCertificate cert = check_subgaussian(p, Y, C, 2);
    EXPECT_EQ(cert.accepted, ratio <= 1.0) << "trial " << trial << " ratio " << ratio;
    EXPECT_EQ(cert.accepted, cert.gram.size() > 0);
    ++compared;
  }
  EXPECT_GE(compared, 55);
}

TEST(MinCertifiableC, OneDimensionClosedForm) {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    MatrixXd Y(12, 1);
    for (int i = 0; i < 12; ++i) Y(i, 0) = rng.normal();
    const VectorXd p = random_weights(12, rng);
    const auto [m2, m4] = central_moments(p, Y.col(0));
    EXPECT_NEAR(min_certifiable_C(p, Y, 2, 1e-6), std::sqrt(m4) / (2 * m2), 1e-4);
  }
}

// Nonnegative binary quartics are sums of squares, so in two dimensions the
// certificate exists iff q(cos a, sin a) >= 0 on the circle.
TEST(CheckSubgaussian, TwoDimensionsMatchesNonnegativityOnCircle) {
  Rng rng(8);
  int compared = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 8 + trial;
    MatrixXd Y(n, 2);
    for (int i = 0; i < n; ++i) {
      Y(i, 0) = rng.normal();
      Y(i, 1) = trial % 2 ? rng.laplace(1.0) + 0.5 * Y(i, 0) : rng.normal();
    }
    const VectorXd p = VectorXd::Constant(n, 1.0 / n);
    const double C = 0.6 + 0.8 * rng.uniform();
    const VectorXd mu = Y.transpose() * p;
    double worst = 1e300;
    for (int a = 0; a < 20000; ++a) {
      const double ang = M_PI * a / 20000.0;
      Eigen::Vector2d v(std::cos(ang), std::sin(ang));
      double s2 = 0, s4 = 0;
      for (int i = 0; i < n; ++i) {
        const double x = (Y.row(i).transpose() - mu).dot(v);
        s2 += p(i) * x * x;
        s4 += p(i) * x * x * x * x;
      }
      worst = std::min(worst, (4 * C * C * s2 * s2 - s4) / (s2 * s2));
    }
    if (std::abs(worst) < 1e-2) continue;
    SubgaussianCertificate cert = check_subgaussian(p, Y, C, 2);
    EXPECT_EQ(cert.accepted, worst > 0) << "trial " << trial << " worst " << worst;
    ++compared;
  }
  EXPECT_GE(compared, 20);
}

TEST(CheckSubgaussian, GramReproducesPolynomialWhenAccepted) {
  Rng rng(2);
  MatrixXd Y(15, 1);
  for (int i = 0; i < 15; ++i) Y(i, 0) = rng.normal();
  const VectorXd p = VectorXd::Constant(15, 1.0 / 15);
  SubgaussianCertificate cert = check_subgaussian(p, Y, 2.0, 2);
  ASSERT_TRUE(cert.accepted);
  ASSERT_EQ(cert.gram.rows(), 1);
  // q(v) = ((2C)^2 - m4) v^4 for whitened data; z = (v^2).
  const auto [m2, m4] = central_moments(p, certify::whiten(p, Y).col(0));
  EXPECT_NEAR(m2, 1.0, 1e-9);
  EXPECT_NEAR(cert.gram(0, 0), 16.0 - m4, 1e-5 * 16);
  EXPECT_EQ(cert.rank, 1);
}

TEST(Whiten, GivesIdentityCovarianceOnColumnSpace) {
  Rng rng(4);
  MatrixXd Y(20, 3);
  for (int i = 0; i < 20; ++i) {
    Y(i, 0) = rng.normal();
    Y(i, 1) = rng.normal();
    Y(i, 2) = Y(i, 0) - Y(i, 1);  // rank 2
  }
  const VectorXd p = random_weights(20, rng);
  const MatrixXd Z = whiten(p, Y);
  ASSERT_EQ(Z.cols(), 2);
  const VectorXd mu = Z.transpose() * p;
  EXPECT_LT(mu.norm(), 1e-10);
  const MatrixXd cov = Z.transpose() * p.asDiagonal() * Z;
  EXPECT_LT((cov - MatrixXd::Identity(2, 2)).norm(), 1e-9);
}

TEST(CheckSubgaussian, DegenerateDataIsTriviallyCertified) {
  const MatrixXd Y = MatrixXd::Constant(5, 2, 3.0);
  SubgaussianCertificate cert = check_subgaussian(VectorXd::Constant(5, 0.2), Y, 0.5, 2);
  EXPECT_TRUE(cert.accepted);
  EXPECT_EQ(cert.rank, 0);
}

TEST(CertificateJson, Fields) {
  MatrixXd Y(3, 1);
  Y << -1, 0, 1;
  nlohmann::json j = nlohmann::json::parse(
      to_json(check_subgaussian(VectorXd::Constant(3, 1.0 / 3), Y, 2.0, 2)));
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["accepted"], true);
  EXPECT_EQ(j["C_tested"], 2.0);
  EXPECT_EQ(j["k"], 2);
}

}  // namespace
}  // namespace dpsos::certify
