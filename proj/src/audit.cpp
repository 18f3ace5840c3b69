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

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

#include "dpsos/contamination.hpp"
#include "dpsos/dp.hpp"
#include "dpsos/tensor.hpp"
#include "json.hpp"

namespace dpsos::audit {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Pseudo-inverse square root on the column space of a PSD matrix, plus the
// projector onto its orthogonal complement.
void range_whitening(const MatrixXd& cov, MatrixXd& w, MatrixXd& perp) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (cov + cov.transpose()));
  const VectorXd& ev = es.eigenvalues();
  const double top = std::max(ev.maxCoeff(), 0.0);
  const int d = static_cast<int>(cov.rows());
  std::vector<int> keep, drop;
  for (int j = 0; j < d; ++j) (ev(j) > 1e-12 * top && top > 0.0 ? keep : drop).push_back(j);
  w.resize(keep.size(), d);
  for (std::size_t r = 0; r < keep.size(); ++r) {
    w.row(r) = es.eigenvectors().col(keep[r]).transpose() / std::sqrt(ev(keep[r]));
  }
  perp = MatrixXd::Zero(d, d);
  for (int j : drop) perp += es.eigenvectors().col(j) * es.eigenvectors().col(j).transpose();
}

// sqrt(delta^T cov^+ delta), infinite when delta leaves the column space.
double mahalanobis(const VectorXd& delta, const MatrixXd& cov) {
  MatrixXd w, perp;
  range_whitening(cov, w, perp);
  const double scale = std::max(1.0, delta.norm());
  if ((perp * delta).norm() > 1e-9 * scale) return kInf;
  return (w * delta).norm();
}

// max |eig(W other W^T) - 1| over the column space of `base`.
double multiplicative_gap(const MatrixXd& base, const MatrixXd& other) {
  MatrixXd w, perp;
  range_whitening(base, w, perp);
  const double scale = std::max(1.0, other.cwiseAbs().maxCoeff());
  if ((perp * other * perp).cwiseAbs().maxCoeff() > 1e-9 * scale) return kInf;
  if (w.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(w * other * w.transpose());
  return (es.eigenvalues().array() - 1.0).abs().maxCoeff();
}

}  // namespace

StabilityReport stability_audit(const MatrixXd& Y, const MatrixXd& Y_prime,
                                const StabilityParams& params) {
  if (Y.rows() != Y_prime.rows() || Y.cols() != Y_prime.cols()) {
    throw std::invalid_argument("datasets must have the same shape");
  }
  const int n = static_cast<int>(Y.rows());
  if (params.tau < 0 || params.tau >= n) throw std::invalid_argument("tau out of range");
  StabilityReport r;
  const double theta = std::sqrt(params.L / n);
  r.pot_bound = 20.0 * params.L;
  r.weight_bound = 120.0 * theta;
  r.mean_bound = 10.0 * params.constants.c1 * params.C * params.k *
                 std::pow(theta, 1.0 - 1.0 / (2.0 * params.k));
  r.cov_bound = 10.0 * params.constants.ct * params.C * params.k *
                std::pow(theta, 1.0 - 1.0 / params.k);
  r.tol = 10.0 * params.system.solver.gap_tol;

  estimator::PotentialOracle oy(Y, params.C, params.k, params.system);
  estimator::PotentialOracle oyp(Y_prime, params.C, params.k, params.system);
  const pseudo::PotentialResult a = oy.solve(params.tau);
  const pseudo::PotentialResult b = oyp.solve(params.tau);
  if (!a.pot.feasible() || !b.pot.feasible()) {
    r.status = !a.pot.feasible() ? "infeasible-y" : "infeasible-y-prime";
    return r;
  }
  auto stab1 = [&](estimator::PotentialOracle& o) {
    try {
      return estimator::stab(o, params.tau, 1);
    } catch (const std::domain_error&) {
      return kInf;
    }
  };
  r.stab_y = stab1(oy);
  r.stab_y_prime = stab1(oyp);
  r.stable = r.stab_y < r.pot_bound && r.stab_y_prime < r.pot_bound;

  const VectorXd p = pseudo::extract_weights(a.pe).p;
  const VectorXd q = pseudo::extract_weights(b.pe).p;
  r.pot_diff = std::abs(a.pot.value - b.pot.value);
  r.weight_l1 = (p - q).lpNorm<1>();
  const estimator::Moments m = estimator::extract_moments(p, Y, {});
  const estimator::Moments mp = estimator::extract_moments(q, Y_prime, {});
  const VectorXd dm = m.mean - mp.mean;
  r.mean_mahalanobis = std::max(mahalanobis(dm, m.cov), mahalanobis(dm, mp.cov));
  r.cov_multiplicative =
      std::max(multiplicative_gap(m.cov, mp.cov), multiplicative_gap(mp.cov, m.cov));

  // Pot is a sum of n squares, so its solver error scales with n.
  r.pot_pass = r.pot_diff <= r.pot_bound + r.tol * n;
  r.weight_pass = r.weight_l1 <= r.weight_bound + r.tol;
  r.mean_pass = r.mean_mahalanobis <= r.mean_bound + r.tol;
  r.cov_pass = r.cov_multiplicative <= r.cov_bound + r.tol;
  return r;
}

std::pair<double, double> clopper_pearson(long k, long n, double alpha) {
  if (n <= 0 || k < 0 || k > n) throw std::invalid_argument("bad binomial counts");
  const double lo = k == 0 ? 0.0 : boost::math::ibeta_inv(double(k), double(n - k + 1), alpha / 2);
  const double hi =
      k == n ? 1.0 : boost::math::ibeta_inv(double(k + 1), double(n - k), 1.0 - alpha / 2);
  return {lo, hi};
}

EpsilonEstimate epsilon_from_samples(const std::vector<std::optional<double>>& a,
                                     const std::vector<std::optional<double>>& b,
                                     const EpsilonConfig& cfg) {
  if (a.empty() || b.empty()) throw std::invalid_argument("no samples");
  EpsilonEstimate out;
  out.trials = static_cast<long>(std::min(a.size(), b.size()));
  out.statistic = cfg.statistic;
  std::vector<double> va, vb, pooled;
  for (const auto& x : a) {
    if (x) va.push_back(*x); else ++out.rejects_y;
  }
  for (const auto& x : b) {
    if (x) vb.push_back(*x); else ++out.rejects_y_prime;
  }
  pooled = va;
  pooled.insert(pooled.end(), vb.begin(), vb.end());
  std::sort(pooled.begin(), pooled.end());
  std::sort(va.begin(), va.end());
  std::sort(vb.begin(), vb.end());

  // Shared equal-mass bucket edges; bucket j is (edge[j-1], edge[j]].
  std::vector<double> edges;
  const long total = static_cast<long>(pooled.size());
  const int want = std::max(1, cfg.buckets);
  for (int j = 1; j < want && total > 0; ++j) {
    const double e = pooled[static_cast<std::size_t>((j * total) / want)];
    if (edges.empty() || e > edges.back()) edges.push_back(e);
  }
  auto count = [](const std::vector<double>& v, double lo, double hi) {
    return static_cast<long>(std::upper_bound(v.begin(), v.end(), hi) -
                             std::upper_bound(v.begin(), v.end(), lo));
  };
  auto bucket_counts = [&](std::vector<long>& ca, std::vector<long>& cb) {
    ca.clear();
    cb.clear();
    for (std::size_t j = 0; j <= edges.size(); ++j) {
      const double lo = j == 0 ? -kInf : edges[j - 1];
      const double hi = j == edges.size() ? kInf : edges[j];
      ca.push_back(count(va, lo, hi));
      cb.push_back(count(vb, lo, hi));
    }
  };
  std::vector<long> ca, cb;
  bucket_counts(ca, cb);
  // Widen: merge the sparsest under-filled bucket into its smaller neighbor.
  while (!edges.empty()) {
    std::size_t worst = 0;
    long worst_count = std::numeric_limits<long>::max();
    for (std::size_t j = 0; j < ca.size(); ++j) {
      if (ca[j] + cb[j] < worst_count) {
        worst_count = ca[j] + cb[j];
        worst = j;
      }
    }
    if (worst_count >= cfg.min_bucket_count) break;
    std::size_t edge;
    if (worst == 0) {
      edge = 0;
    } else if (worst == ca.size() - 1) {
      edge = worst - 1;
    } else {
      edge = (ca[worst - 1] + cb[worst - 1] <= ca[worst + 1] + cb[worst + 1]) ? worst - 1 : worst;
    }
    edges.erase(edges.begin() + static_cast<long>(edge));
    bucket_counts(ca, cb);
  }
  ca.push_back(out.rejects_y);
  cb.push_back(out.rejects_y_prime);
  out.buckets = static_cast<int>(ca.size());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double dprime = cfg.delta / out.buckets;
  const double level = cfg.alpha / (2.0 * out.buckets);

  double point = 0.0, raw = 0.0, lo = 0.0, hi = 0.0;
  auto ratio = [&](double num, double den) {
    if (num <= 0.0) return 0.0;
    if (den <= 0.0) return kInf;
    return std::log(num / den);
  };
  for (std::size_t j = 0; j < ca.size(); ++j) {
    if (ca[j] == 0 && cb[j] == 0) continue;
    const auto [pa_lo, pa_hi] = clopper_pearson(ca[j], static_cast<long>(na), level);
    const auto [pb_lo, pb_hi] = clopper_pearson(cb[j], static_cast<long>(nb), level);
    const auto [qa_lo, qa_hi] = clopper_pearson(ca[j], static_cast<long>(na), cfg.alpha);
    const auto [qb_lo, qb_hi] = clopper_pearson(cb[j], static_cast<long>(nb), cfg.alpha);
    const double pa = ca[j] / na, pb = cb[j] / nb;
    raw = std::max({raw, ratio(pa - dprime, pb), ratio(pb - dprime, pa)});
    point = std::max({point, ratio(qa_lo - dprime, qb_hi), ratio(qb_lo - dprime, qa_hi)});
    lo = std::max({lo, ratio(pa_lo - dprime, pb_hi), ratio(pb_lo - dprime, pa_hi)});
    hi = std::max({hi, ratio(pa_hi - dprime, pb_lo), ratio(pb_hi - dprime, pa_lo)});
  }
  out.eps_hat = point;
  out.eps_histogram = raw;
  out.ci_lo = lo;
  out.ci_hi = hi;
  out.violation = out.ci_lo > cfg.eps;
  return out;
}

EpsilonEstimate audit_private_estimate(const MatrixXd& Y, const MatrixXd& Y_prime,
                                       const estimator::Params& params, EpsilonConfig cfg) {
  estimator::PrivateMechanism ma(Y, params), mb(Y_prime, params);
  // empirical_epsilon passes back the very matrices it was given.
  Mechanism mech = [&](const MatrixXd& data, Rng& r) -> std::optional<double> {
    estimator::PrivateMechanism& m = (&data == &Y) ? ma : mb;
    const estimator::EstimateBundle b = m.run(r);
    if (b.status != estimator::Status::kOk) return std::nullopt;
    return b.estimates.mean(0);
  };
  cfg.statistic = "mean[0]";
  return empirical_epsilon(mech, Y, Y_prime, cfg);
}

EpsilonEstimate empirical_epsilon(const Mechanism& mech, const MatrixXd& Y,
                                  const MatrixXd& Y_prime, const EpsilonConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("trials must be positive");
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  std::vector<std::optional<double>> a(trials), b(trials);
  const Rng base(cfg.seed);
  const int workers = std::max(1, cfg.workers);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      Rng ra = base.split(2 * j);
      Rng rb = base.split(2 * j + 1);
      a[j] = mech(Y, ra);
      b[j] = mech(Y_prime, rb);
    }
  };
  if (workers == 1) {
    work(0, trials);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (trials + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(trials, w * chunk);
      const std::size_t end = std::min(trials, begin + chunk);
      pool.emplace_back([&, w, begin, end] {
        try {
          work(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return epsilon_from_samples(a, b, cfg);
}

bool LemmaReport::all_pass() const {
  for (const auto& c : checks) {
    if (c.applicable && !c.pass) return false;
  }
  return true;
}

namespace {

MatrixXd random_orthogonal(int d, Rng& rng) {
  MatrixXd g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<MatrixXd> qr(g);
  return qr.householderQ() * MatrixXd::Identity(d, d);
}

// A with singular values sqrt(1 - beta) and sqrt(1 + beta) (alternating), so
// (1 - beta) I <= A A^T <= (1 + beta) I with both ends attained.
// With `symmetric` the right factor equals the left one, so A is within
// O(beta) of the identity; otherwise A also carries an arbitrary rotation.
MatrixXd extreme_transform(int d, double beta, Rng& rng, bool symmetric) {
  VectorXd s(d);
  for (int i = 0; i < d; ++i) s(i) = std::sqrt(i % 2 == 0 ? 1.0 + beta : 1.0 - beta);
  const MatrixXd U = random_orthogonal(d, rng);
  const MatrixXd V = symmetric ? U : random_orthogonal(d, rng);
  return U * s.asDiagonal() * V.transpose();
}

MatrixXd clean_sample(int n, Rng& rng) {
  contamination::CleanSpec spec;
  spec.n = n;
  spec.d = 1;
  return contamination::sample_clean(spec, rng);
}

LemmaCheck score_checks(const LemmaConfig& cfg, LemmaCheck& comparison) {
  LemmaCheck sens{"score-sensitivity", true, true, kInf, ""};
  comparison = {"stability-comparison", true, true, kInf, ""};
  pseudo::SystemConfig sys;
  sys.mode = cfg.mode;
  Rng rng(cfg.seed, 11);
  const double tol = 10.0 * cfg.gap_tol * cfg.n;
  for (int pair = 0; pair < cfg.pairs; ++pair) {
    const MatrixXd Y = clean_sample(cfg.n, rng);
    const int idx = static_cast<int>(rng.uniform() * cfg.n) % cfg.n;
    VectorXd far(1);
    far(0) = (rng.uniform() < 0.5 ? -1.0 : 1.0) * (5.0 + 20.0 * rng.uniform());
    const auto [A, B] = contamination::adjacent_pair(Y, idx, far);
    estimator::PotentialOracle oa(A, cfg.C, 2, sys), ob(B, cfg.C, 2, sys);
    for (int tau = 0; tau <= cfg.n; ++tau) {
      const double diff = std::abs(estimator::score(oa, tau, cfg.L).score -
                                   estimator::score(ob, tau, cfg.L).score);
      sens.margin = std::min(sens.margin, 2.0 + 10.0 * cfg.gap_tol - diff);
      // Stab_{Y'}(tau, gamma - 1) <= Stab_Y(tau, gamma), both directions.
      for (int gamma = 1; gamma <= std::min(tau, cfg.n - tau); ++gamma) {
        for (int dir = 0; dir < 2; ++dir) {
          estimator::PotentialOracle& oy = dir == 0 ? oa : ob;
          estimator::PotentialOracle& oyp = dir == 0 ? ob : oa;
          if (!oy.pot(tau - gamma).feasible() || !oyp.pot(tau - gamma + 1).feasible()) continue;
          const double lhs = estimator::stab(oyp, tau, gamma - 1);
          const double rhs = estimator::stab(oy, tau, gamma);
          comparison.margin = std::min(comparison.margin, rhs + tol - lhs);
        }
      }
    }
  }
  sens.pass = sens.margin >= 0.0;
  comparison.pass = comparison.margin >= 0.0;
  sens.detail = std::to_string(cfg.pairs) + " adjacent pairs, all tau";
  comparison.detail = sens.detail + ", all gamma";
  return sens;
}

LemmaCheck good_interval_check(const LemmaConfig& cfg) {
  LemmaCheck c{"good-interval", true, false, 0.0, ""};
  if (cfg.L > 0.25 * cfg.eta * cfg.n) {
    c.applicable = false;
    c.detail = "not applicable: L > 0.25 eta n";
    return c;
  }
  pseudo::SystemConfig sys;
  sys.mode = cfg.mode;
  Rng rng(cfg.seed, 12);
  int tested = 0;
  c.margin = kInf;
  for (int pair = 0; pair < cfg.pairs; ++pair) {
    const MatrixXd Y = clean_sample(cfg.n, rng);
    estimator::PotentialOracle o(Y, cfg.C, 2, sys);
    const int half = static_cast<int>(std::floor(cfg.eta / 2.0 * cfg.n + 1e-9));
    if (!o.pot(half).feasible()) continue;
    ++tested;
    double best = 0.0;
    for (int tau = 0; tau <= static_cast<int>(std::floor(cfg.eta * cfg.n + 1e-9)); ++tau) {
      best = std::max(best, estimator::score(o, tau, cfg.L).score);
    }
    c.margin = std::min(c.margin, best - cfg.L);
  }
  if (tested == 0) {
    c.applicable = false;
    c.detail = "not applicable: no instance with A(eta/2) feasible";
    c.margin = 0.0;
    return c;
  }
  c.pass = c.margin >= 0.0;
  c.detail = std::to_string(tested) + " instances, max_tau score - L";
  return c;
}

void selection_checks(const LemmaConfig& cfg, LemmaReport& rep) {
  Rng rng(cfg.seed, 13);
  const double eps = 1.0, delta = 1e-3, sens = 1.0, kappa = 5.0, beta = 0.1;
  // Soundness: never release a candidate below kappa.
  {
    LemmaCheck c{"selection-soundness", true, true, kInf, ""};
    std::vector<double> scores = {0.0, 4.0, 5.5, 9.0, 30.0};
    long released = 0;
    for (long t = 0; t < cfg.selection_trials; ++t) {
      const auto r = dp::select(scores, sens, eps, delta, kappa, rng);
      if (r.index) {
        ++released;
        c.margin = std::min(c.margin, scores[*r.index] - kappa);
      }
    }
    c.pass = c.margin >= 0.0;
    c.detail = std::to_string(released) + " releases in " + std::to_string(cfg.selection_trials);
    rep.checks.push_back(c);
  }
  // Utility: a candidate clearing the margin makes bottom rare.
  {
    LemmaCheck c{"selection-utility", true, false, 0.0, ""};
    const std::size_t m = 5;
    const double top = kappa + dp::selection_margin(sens, eps, m, beta, delta,
                                                    dp::SelectionConfig{cfg.constants.select_util});
    std::vector<double> scores(m, 0.0);
    scores[2] = top;
    long bottom = 0;
    for (long t = 0; t < cfg.selection_trials; ++t) {
      if (!dp::select(scores, sens, eps, delta, kappa, rng).index) ++bottom;
    }
    const double rate = static_cast<double>(bottom) / cfg.selection_trials;
    const double sigma = std::sqrt(beta * (1 - beta) / cfg.selection_trials);
    c.margin = beta + 3.0 * sigma - rate;
    c.pass = c.margin >= 0.0;
    c.detail = "bottom rate " + std::to_string(rate);
    rep.checks.push_back(c);
  }
}

LemmaCheck tlap_check(const LemmaConfig& cfg) {
  LemmaCheck c{"tlap-tail", true, true, kInf, ""};
  Rng rng(cfg.seed, 14);
  const dp::TruncatedLaplaceParams prm{-1.0, 1.0};
  std::vector<double> xs(cfg.tlap_samples);
  for (auto& x : xs) {
    x = dp::sample_tlap(prm, rng);
    if (!(x < 0.0)) c.pass = false;
  }
  std::sort(xs.begin(), xs.end());
  const double N = static_cast<double>(xs.size());
  for (double y : {-4.0, -3.0, -2.0, -1.5, -1.1}) {
    const double p = dp::tlap_tail(prm, y);
    const double emp = (std::lower_bound(xs.begin(), xs.end(), y) - xs.begin()) / N;
    c.margin = std::min(c.margin, 3.0 * std::sqrt(p * (1 - p) / N) - std::abs(emp - p));
  }
  c.pass = c.pass && c.margin >= 0.0;
  c.detail = "5 points, all samples negative";
  return c;
}

LemmaCheck noise_check(const LemmaConfig& cfg, int t, bool symmetric) {
  std::string name = t == 1 ? "linear-noise" : "tensored-noise";
  if (symmetric) name += "-symmetric";
  LemmaCheck c{name, true, false, 0.0, ""};
  const int d = 2;
  const double eps = 1.0, delta = 1e-6;
  const double beta = t == 1 ? dp::linear_noise_threshold(d, eps, delta)
                             : dp::tensored_noise_threshold(d, t, eps, delta);
  Rng rng(cfg.seed, 15 + t);
  const MatrixXd A = extreme_transform(d, beta, rng, symmetric);
  const MatrixXd M = t == 1 ? A : free_coordinate_map(A, t);
  const int N = static_cast<int>(M.rows());
  dp::GaussianSpec p{VectorXd::Zero(N), MatrixXd::Identity(N, N)};
  dp::GaussianSpec q{VectorXd::Zero(N), M * M.transpose()};
  dp::HockeyStickConfig hc;
  hc.samples = cfg.hockey_samples;
  hc.seed = cfg.seed + t;
  hc.workers = cfg.workers;
  const dp::DivergenceEstimate e = dp::hockey_stick(p, q, std::exp(eps), hc);
  c.margin = delta + (e.ci_hi - e.value) - e.value;
  c.pass = c.margin >= 0.0;
  std::ostringstream os;
  os << "beta " << beta << ", estimate " << e.value << " +- " << e.std_error;
  c.detail = os.str();
  return c;
}

LemmaCheck privacy_check(const LemmaConfig& cfg) {
  LemmaCheck c{"privacy-audit", true, false, 0.0, ""};
  Rng rng(cfg.seed, 18);
  const MatrixXd Y = clean_sample(cfg.audit_n, rng);
  VectorXd far(1);
  far(0) = 1e3;
  const auto [A, B] = contamination::adjacent_pair(Y, 0, far);
  estimator::Params prm;
  prm.eta = cfg.audit_eta;
  prm.C = cfg.audit_C;
  prm.L = cfg.audit_L;
  prm.eps = cfg.audit_eps;
  prm.delta = cfg.audit_delta;
  prm.constants = cfg.constants;
  prm.system.mode = pseudo::Mode::kPinned;
  EpsilonConfig ec;
  ec.trials = cfg.audit_trials;
  ec.delta = cfg.audit_delta;
  ec.eps = cfg.audit_eps;
  ec.seed = cfg.seed;
  ec.workers = cfg.workers;
  const EpsilonEstimate e = audit_private_estimate(A, B, prm, ec);
  c.margin = cfg.audit_eps - e.ci_lo;
  c.pass = !e.violation;
  std::ostringstream os;
  os << "eps_hat " << e.eps_hat << " [" << e.ci_lo << ", " << e.ci_hi << "], " << e.trials
     << " trials";
  c.detail = os.str();
  return c;
}

}  // namespace

LemmaReport lemma_suite(const LemmaConfig& cfg) {
  if (cfg.n < 2 || cfg.pairs < 1) throw std::invalid_argument("lemma suite needs n >= 2, pairs >= 1");
  LemmaReport rep;
  LemmaCheck comparison;
  rep.checks.push_back(score_checks(cfg, comparison));
  rep.checks.push_back(comparison);
  rep.checks.push_back(good_interval_check(cfg));
  selection_checks(cfg, rep);
  rep.checks.push_back(tlap_check(cfg));
  rep.checks.push_back(noise_check(cfg, 1, false));
  rep.checks.push_back(noise_check(cfg, 2, false));
  rep.checks.push_back(noise_check(cfg, 2, true));
  rep.checks.push_back(privacy_check(cfg));
  return rep;
}

namespace {

nlohmann::json num(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

}  // namespace

std::string to_json(const StabilityReport& r) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["status"] = r.status;
  j["stab_y"] = num(r.stab_y);
  j["stab_y_prime"] = num(r.stab_y_prime);
  j["stable"] = r.stable;
  j["values"] = {{"pot_diff", num(r.pot_diff)},
                 {"weight_l1", num(r.weight_l1)},
                 {"mean_mahalanobis", num(r.mean_mahalanobis)},
                 {"cov_multiplicative", num(r.cov_multiplicative)}};
  j["bounds"] = {{"pot_diff", r.pot_bound},
                 {"weight_l1", r.weight_bound},
                 {"mean_mahalanobis", r.mean_bound},
                 {"cov_multiplicative", r.cov_bound}};
  j["tol"] = r.tol;
  if (r.status == "ok") {
    j["pass"] = {{"pot_diff", r.pot_pass},
                 {"weight_l1", r.weight_pass},
                 {"mean_mahalanobis", r.mean_pass},
                 {"cov_multiplicative", r.cov_pass}};
  }
  return j.dump(2);
}

std::string to_json(const EpsilonEstimate& e) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["eps_hat"] = num(e.eps_hat);
  j["eps_histogram"] = num(e.eps_histogram);
  j["ci"] = {num(e.ci_lo), num(e.ci_hi)};
  j["method"] = e.method;
  j["trials"] = e.trials;
  j["statistic"] = e.statistic;
  j["buckets"] = e.buckets;
  j["rejects"] = {e.rejects_y, e.rejects_y_prime};
  j["violation"] = e.violation;
  return j.dump(2);
}

std::string to_json(const LemmaReport& r) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["all_pass"] = r.all_pass();
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : r.checks) {
    arr.push_back({{"name", c.name},
                   {"applicable", c.applicable},
                   {"pass", c.pass},
                   {"margin", num(c.margin)},
                   {"detail", c.detail}});
  }
  j["checks"] = arr;
  return j.dump(2);
}

std::string summary_table(const LemmaReport& r) {
  std::ostringstream os;
  os << std::left << std::setw(28) << "check" << std::setw(8) << "result" << std::setw(14)
     << "margin" << "detail\n";
  for (const auto& c : r.checks) {
    const char* verdict = !c.applicable ? "n/a" : (c.pass ? "pass" : "FAIL");
    os << std::left << std::setw(28) << c.name << std::setw(8) << verdict << std::setw(14)
       << std::setprecision(6) << c.margin << c.detail << '\n';
  }
  return os.str();
}

}  // namespace dpsos::audit
