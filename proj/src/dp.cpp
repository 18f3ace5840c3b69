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

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace dpsos::dp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

void check_tlap(const TruncatedLaplaceParams& p) {
  if (!(p.mu < 0.0) || !(p.b > 0.0)) throw std::invalid_argument("tLap needs mu < 0 and b > 0");
}

void check_privacy(double eps, double delta) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("eps must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
}

// Laplace(mu, b) CDF at y.
double laplace_cdf(double mu, double b, double y) {
  return y < mu ? 0.5 * std::exp((y - mu) / b) : 1.0 - 0.5 * std::exp(-(y - mu) / b);
}

}  // namespace

TruncatedLaplaceParams tlap_params(double sensitivity, double eps, double delta) {
  check_privacy(eps, delta);
  if (!(sensitivity > 0.0)) throw std::invalid_argument("sensitivity must be positive");
  return {-sensitivity * (1.0 + std::log(1.0 / delta) / eps), sensitivity / eps};
}

double sample_tlap(const TruncatedLaplaceParams& params, Rng& rng) {
  check_tlap(params);
  const double f0 = laplace_cdf(params.mu, params.b, 0.0);
  while (true) {
    const double t = rng.uniform() * f0;
    const double y = t < 0.5 ? params.mu + params.b * std::log(2.0 * t)
                             : params.mu - params.b * std::log(2.0 * (1.0 - t));
    if (y < 0.0) return y;
  }
}

double tlap_tail(const TruncatedLaplaceParams& params, double y) {
  check_tlap(params);
  if (!(y < params.mu)) throw std::domain_error("tail formula needs y < mu");
  return std::exp((y - params.mu) / params.b) / (2.0 - std::exp(params.mu / params.b));
}

double tlap_cdf(const TruncatedLaplaceParams& params, double y) {
  check_tlap(params);
  if (y >= 0.0) return 1.0;
  return laplace_cdf(params.mu, params.b, y) / laplace_cdf(params.mu, params.b, 0.0);
}

SelectionResult select(const std::vector<double>& scores, double sensitivity, double eps,
                       double delta, double kappa, Rng& rng) {
  check_privacy(eps, delta);
  if (!(sensitivity > 0.0)) throw std::invalid_argument("sensitivity must be positive");
  SelectionResult res;
  if (scores.empty()) return res;
  const double f = eps / (4.0 * sensitivity);
  std::vector<double> logit(scores.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double s = scores[i];
    logit[i] = (std::isnan(s) || s <= std::numeric_limits<double>::lowest())
                   ? -std::numeric_limits<double>::infinity()
                   : f * s;
    top = std::max(top, logit[i]);
  }
  std::vector<double> w(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    w[i] = std::isinf(top) ? 1.0 : std::exp(logit[i] - top);
    total += w[i];
  }
  double u = rng.uniform() * total;
  std::size_t pick = scores.size() - 1;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (u < w[i]) {
      pick = i;
      break;
    }
    u -= w[i];
  }
  res.drawn = pick;
  res.score = scores[pick];
  TruncatedLaplaceParams noise{-sensitivity * (1.0 + 2.0 * std::log(1.0 / delta) / eps),
                               2.0 * sensitivity / eps};
  res.noise = sample_tlap(noise, rng);
  if (res.score + res.noise >= kappa) res.index = pick;
  return res;
}

SelectionResult select(std::size_t num_candidates,
                       const std::function<double(std::size_t)>& score, double sensitivity,
                       double eps, double delta, double kappa, Rng& rng) {
  std::vector<double> s(num_candidates);
  for (std::size_t i = 0; i < num_candidates; ++i) s[i] = score(i);
  return select(s, sensitivity, eps, delta, kappa, rng);
}

double selection_margin(double sensitivity, double eps, std::size_t num_candidates,
                        double beta, double delta, const SelectionConfig& cfg) {
  return cfg.utility_constant * (sensitivity / eps) *
         std::log(static_cast<double>(num_candidates) / (beta * delta));
}

namespace {

// Normal mass of (a, b) under N(mu, s^2), accurate in both tails.
double normal_mass(double mu, double s, double a, double b) {
  if (!(a < b)) return 0.0;
  const double za = (a - mu) / s;
  const double zb = (b - mu) / s;
  if (za >= 0.0) return 0.5 * (std::erfc(za * M_SQRT1_2) - std::erfc(zb * M_SQRT1_2));
  return 0.5 * (std::erfc(-zb * M_SQRT1_2) - std::erfc(-za * M_SQRT1_2));
}

double hockey_1d(double mp, double vp, double mq, double vq, double alpha) {
  if (alpha == 0.0) return 1.0;
  if (vp <= 0.0 && vq <= 0.0) return mp == mq ? std::max(0.0, 1.0 - alpha) : 1.0;
  if (vp <= 0.0 || vq <= 0.0) throw std::invalid_argument("supports differ");
  const double sp = std::sqrt(vp), sq = std::sqrt(vq);
  // log p - log q - log alpha = A x^2 + B x + C.
  const double A = 0.5 / vq - 0.5 / vp;
  const double B = mp / vp - mq / vq;
  const double C = 0.5 * mq * mq / vq - 0.5 * mp * mp / vp + std::log(sq / sp) - std::log(alpha);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, double>> region;
  if (A == 0.0) {
    if (B == 0.0) {
      if (C > 0.0) region.emplace_back(-inf, inf);
    } else if (B > 0.0) {
      region.emplace_back(-C / B, inf);
    } else {
      region.emplace_back(-inf, -C / B);
    }
  } else {
    const double disc = B * B - 4.0 * A * C;
    if (disc <= 0.0) {
      if (A > 0.0) region.emplace_back(-inf, inf);
    } else {
      const double q = -0.5 * (B + std::copysign(std::sqrt(disc), B));
      double r1 = q / A, r2 = C / q;
      if (r1 > r2) std::swap(r1, r2);
      if (A > 0.0) {
        region.emplace_back(-inf, r1);
        region.emplace_back(r2, inf);
      } else {
        region.emplace_back(r1, r2);
      }
    }
  }
  double d = 0.0;
  for (const auto& [a, b] : region) d += normal_mass(mp, sp, a, b) - alpha * normal_mass(mq, sq, a, b);
  return std::clamp(d, 0.0, 1.0);
}

DivergenceEstimate monte_carlo(const VectorXd& mp, const MatrixXd& cp, const VectorXd& mq,
                               const MatrixXd& cq, double alpha, const HockeyStickConfig& cfg) {
  const int d = static_cast<int>(mp.size());
  Eigen::LLT<MatrixXd> lp(cp), lq(cq);
  if (lp.info() != Eigen::Success || lq.info() != Eigen::Success) {
    throw std::invalid_argument("covariance not positive definite");
  }
  const MatrixXd Lp = lp.matrixL();
  const MatrixXd Lq = lq.matrixL();
  const double logdet_p = Lp.diagonal().array().log().sum();
  const double logdet_q = Lq.diagonal().array().log().sum();
  const double log_alpha = std::log(alpha);
  constexpr long kChunk = 1 << 15;
  const long chunks = (cfg.samples + kChunk - 1) / kChunk;
  std::vector<double> sum(chunks, 0.0), sumsq(chunks, 0.0);
  std::atomic<long> next{0};
  const Rng base(cfg.seed);
  auto work = [&] {
    VectorXd z(d), x(d);
    for (long c; (c = next.fetch_add(1)) < chunks;) {
      Rng rng = base.split(static_cast<std::uint64_t>(c));
      const long count = std::min(kChunk, cfg.samples - c * kChunk);
      double s = 0.0, s2 = 0.0;
      for (long i = 0; i < count; ++i) {
        for (int j = 0; j < d; ++j) z(j) = rng.normal();
        x = mp + Lp * z;
        const double log_p = -0.5 * z.squaredNorm() - logdet_p;
        const double log_q =
            -0.5 * Lq.triangularView<Eigen::Lower>().solve(x - mq).squaredNorm() - logdet_q;
        const double v = std::max(0.0, 1.0 - std::exp(log_alpha + log_q - log_p));
        s += v;
        s2 += v * v;
      }
      sum[c] = s;
      sumsq[c] = s2;
    }
  };
  const int workers = std::max(1, cfg.workers);
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  double s = 0.0, s2 = 0.0;
  for (long c = 0; c < chunks; ++c) {
    s += sum[c];
    s2 += sumsq[c];
  }
  const double n = static_cast<double>(cfg.samples);
  DivergenceEstimate est;
  est.samples = cfg.samples;
  est.value = s / n;
  const double var = std::max(0.0, s2 / n - est.value * est.value);
  est.std_error = std::sqrt(var / n);
  est.ci_lo = std::max(0.0, est.value - 1.96 * est.std_error);
  est.ci_hi = est.value + 1.96 * est.std_error;
  return est;
}

}  // namespace

DivergenceEstimate hockey_stick(const GaussianSpec& p, const GaussianSpec& q, double alpha,
                                const HockeyStickConfig& cfg) {
  const int d = static_cast<int>(p.mean.size());
  if (q.mean.size() != d || p.cov.rows() != d || p.cov.cols() != d || q.cov.rows() != d ||
      q.cov.cols() != d) {
    throw std::invalid_argument("dimension mismatch");
  }
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
  auto exact = [](double v) {
    DivergenceEstimate e;
    e.value = e.ci_lo = e.ci_hi = v;
    e.exact = true;
    return e;
  };
  if (d == 1) return exact(hockey_1d(p.mean(0), p.cov(0, 0), q.mean(0), q.cov(0, 0), alpha));

  // Restrict to the common support.
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (p.cov + p.cov.transpose()));
  const VectorXd& ev = es.eigenvalues();
  const double top = std::max(ev(d - 1), 0.0);
  std::vector<int> keep;
  for (int j = 0; j < d; ++j) {
    if (ev(j) > 1e-12 * top) keep.push_back(j);
  }
  const int r = static_cast<int>(keep.size());
  if (r < d) {
    MatrixXd U(d, r), N(d, d - r);
    int a = 0, b = 0;
    for (int j = 0; j < d; ++j) {
      if (a < r && keep[a] == j) {
        U.col(a++) = es.eigenvectors().col(j);
      } else {
        N.col(b++) = es.eigenvectors().col(j);
      }
    }
    const double scale = std::max(1.0, q.cov.norm());
    if ((N.transpose() * q.cov * N).norm() > 1e-9 * scale) {
      throw std::invalid_argument("supports differ");
    }
    if ((N.transpose() * (p.mean - q.mean)).norm() > 1e-9 * std::max(1.0, p.mean.norm())) {
      return exact(1.0);  // disjoint affine supports
    }
    GaussianSpec pr{U.transpose() * p.mean, U.transpose() * p.cov * U};
    GaussianSpec qr{U.transpose() * q.mean, U.transpose() * q.cov * U};
    if (r == 0) return exact(std::max(0.0, 1.0 - alpha));
    if (r == 1) {
      return exact(hockey_1d(pr.mean(0), pr.cov(0, 0), qr.mean(0), qr.cov(0, 0), alpha));
    }
    return monte_carlo(pr.mean, pr.cov, qr.mean, qr.cov, alpha, cfg);
  }
  return monte_carlo(p.mean, p.cov, q.mean, q.cov, alpha, cfg);
}

TriangleCheck hockey_triangle_check(const GaussianSpec& p, const GaussianSpec& q,
                                    const GaussianSpec& r, double eps) {
  if (p.mean.size() != 1 || q.mean.size() != 1 || r.mean.size() != 1) {
    throw std::invalid_argument("triangle check is 1-d");
  }
  TriangleCheck t;
  const double half = std::exp(eps / 2.0);
  t.lhs = hockey_stick(p, r, std::exp(eps)).value;
  t.rhs = hockey_stick(p, q, half).value + half * hockey_stick(q, r, half).value;
  t.ok = t.lhs <= t.rhs + 1e-6;
  return t;
}

double linear_noise_threshold(int d, double eps, double delta) {
  return eps / (3.0 * d * std::log(d / delta));
}

double tensored_noise_threshold(int d, int t, double eps, double delta) {
  const double dt = std::pow(static_cast<double>(d), t);
  return eps / (8.0 * t * t * dt * std::log(dt / delta));
}

bool linear_noise_admissible(double beta, int d, double eps, double delta) {
  return beta <= linear_noise_threshold(d, eps, delta);
}

bool tensored_noise_admissible(double beta, int d, int t, double eps, double delta) {
  return beta <= tensored_noise_threshold(d, t, eps, delta);
}

void PrivacyBudget::append(std::string label, double eps, double delta) {
  if (!(eps >= 0.0) || !(delta >= 0.0) || !std::isfinite(eps) || !std::isfinite(delta)) {
    throw std::invalid_argument("budget entries must be finite and >= 0");
  }
  stages_.push_back({std::move(label), eps, delta});
  total_eps_ = 0.0;
  total_delta_ = 0.0;
  for (const auto& s : stages_) {
    total_eps_ += s.eps;
    total_delta_ += s.delta;
  }
}

std::string PrivacyBudget::to_json() const {
  nlohmann::json j;
  j["stages"] = nlohmann::json::array();
  for (const auto& s : stages_) {
    j["stages"].push_back({{"label", s.label}, {"eps", s.eps}, {"delta", s.delta}});
  }
  j["total"] = {{"eps", total_eps_}, {"delta", total_delta_}};
  return j.dump();
}

std::pair<double, double> compose(const PrivacyBudget& budget) {
  return {budget.total_eps(), budget.total_delta()};
}

}  // namespace dpsos::dp
