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


#include "dpsos/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "linalg.hpp"

namespace dpsos::estimator {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kSqrtFloor = 1e-12;

int floor_rate(double eta, int n) {
  return static_cast<int>(std::floor(eta * n + 1e-9));
}

}  // namespace

RobustResult robust_estimate(const MatrixXd& Y, double eta, double C, int k,
                             const pseudo::SystemConfig& cfg) {
  if (!(eta >= 0.0 && eta < 0.5)) throw std::invalid_argument("eta must lie in [0, 1/2)");
  pseudo::PotentialResult res = pseudo::minimize_potential(pseudo::build_system(Y, eta, C, k, cfg));
  RobustResult out;
  out.pot = res.pot;
  out.weights.mode = cfg.mode;
  if (!res.pot.feasible()) {
    out.rejected = true;
    return out;
  }
  out.weights = pseudo::extract_weights(res.pe);
  return out;
}

PotentialOracle::PotentialOracle(MatrixXd Y, double C, int k, pseudo::SystemConfig cfg)
    : Y_(std::move(Y)), C_(C), k_(k), cfg_(std::move(cfg)) {
  // Validates the instance once up front.
  pseudo::build_system(Y_, 0.0, C_, k_, cfg_);
}

std::shared_ptr<const pseudo::PotentialResult> PotentialOracle::lookup(int m) {
  if (m < 0) throw std::invalid_argument("negative rate numerator");
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(m);
    if (it != cache_.end()) return it->second;
  }
  auto res = std::make_shared<pseudo::PotentialResult>();
  const int n = this->n();
  if (m >= n) {
    res->pot.value = 0.0;
    res->pot.eta = 1.0;
    res->pe.mode = cfg_.mode;
    res->pe.n = n;
    res->pe.degree = 1;
    res->pe.sets.push_back({});
    for (int i = 0; i < n; ++i) res->pe.sets.push_back({i});
    res->pe.values = VectorXd::Zero(n + 1);
    res->pe.values(0) = 1.0;
    res->pe.build_index();
  } else {
    *res = pseudo::minimize_potential(
        pseudo::build_system(Y_, static_cast<double>(m) / n, C_, k_, cfg_));
  }
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.emplace(m, std::move(res)).first->second;
}

pseudo::PotentialValue PotentialOracle::pot(int m) { return lookup(m)->pot; }

pseudo::PotentialResult PotentialOracle::solve(int m) { return *lookup(m); }

void PotentialOracle::prefetch(const std::vector<int>& numerators, int workers) {
  workers = std::max(1, workers);
  if (workers == 1) {
    for (int m : numerators) lookup(m);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t j = w; j < numerators.size(); j += workers) lookup(numerators[j]);
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

std::size_t PotentialOracle::solves() const {
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.size();
}

double stab(PotentialOracle& oracle, int tau, int gamma) {
  if (gamma < 0 || tau - gamma < 0 || tau + gamma > oracle.n()) {
    throw std::domain_error("interval outside [0, n]");
  }
  const pseudo::PotentialValue lo = oracle.pot(tau - gamma);
  if (!lo.feasible()) throw std::domain_error("infeasible lower rate");
  const pseudo::PotentialValue hi = oracle.pot(tau + gamma);
  if (!hi.feasible()) throw std::domain_error("infeasible upper rate");
  return lo.value - hi.value;
}

ScoreResult score(PotentialOracle& oracle, int tau, double L) {
  const int n = oracle.n();
  if (tau < 0 || tau > n) throw std::invalid_argument("tau out of range");
  ScoreResult best;
  if (!oracle.pot(tau).feasible()) return best;
  const double cap = 20.0 * L;
  best.score = std::min(0.0, cap);
  for (int gamma = 1; gamma <= std::min(tau, n - tau); ++gamma) {
    if (!oracle.pot(tau - gamma).feasible()) break;
    const double s = stab(oracle, tau, gamma);
    const double value = std::min(static_cast<double>(gamma), cap - s);
    if (value > best.score) {
      best.score = value;
      best.gamma_star = gamma;
      best.stab = s;
    }
    // Past gamma >= 20L the value is 20L - Stab, which cannot increase.
    if (gamma >= cap) break;
  }
  return best;
}

std::vector<double> selection_scores(PotentialOracle& oracle, double eta, double L,
                                     int workers) {
  const int n = oracle.n();
  const int top = floor_rate(eta, n);
  if (workers > 1 && top > 0) {
    std::vector<int> rates;
    const int hi = std::min(n, top + static_cast<int>(std::ceil(20.0 * L)) + 1);
    for (int m = 0; m <= hi; ++m) rates.push_back(m);
    oracle.prefetch(rates, workers);
  }
  std::vector<double> out;
  for (int tau = 1; tau <= top; ++tau) out.push_back(score(oracle, tau, L).score);
  return out;
}

NoiseScales noise_scales(double C_prime, int k, double L, int n, int d, double eps,
                         double delta, const NoiseConstants& c, const std::vector<int>& orders) {
  if (!(C_prime > 0.0) || k < 1 || !(L > 0.0) || n < 1 || d < 1 || !(eps > 0.0) ||
      !(delta > 0.0)) {
    throw std::invalid_argument("noise_scales needs positive parameters");
  }
  NoiseScales s;
  s.theta = std::sqrt(L / n);
  const double ck = C_prime * k;
  const double tail = std::sqrt(2.0 * std::log(7.5 * k / delta));
  std::vector<int> all = {1, 2};
  for (int t : orders) {
    if (t > 2) all.push_back(t);
  }
  for (int t : all) {
    const double g = t == 1
                         ? c.c1 * ck * std::pow(s.theta, 1.0 - 1.0 / (2.0 * k))
                         : c.ct * std::pow(ck, t / 2.0) * std::pow(s.theta, 1.0 - t / (2.0 * k));
    double sigma = 6.0 * k / eps * g * std::pow(static_cast<double>(d), (t - 1) / 2.0) * tail;
    if (t > 2) sigma *= std::pow(ck, t);
    s.gamma[t] = g;
    s.sigma[t] = sigma;
  }
  return s;
}

std::vector<int> moment_orders(int k) {
  std::vector<int> out;
  for (int t = 2; t < 2 * k; t += 2) {
    if ((2 * k) % t == 0) out.push_back(t);
  }
  return out;
}

Moments extract_moments(const VectorXd& p, const MatrixXd& Y, const std::vector<int>& orders) {
  if (p.size() != Y.rows()) throw std::invalid_argument("weights and data disagree");
  Moments m;
  m.mean = Y.transpose() * p;
  const MatrixXd c = Y.rowwise() - m.mean.transpose();
  m.cov = c.transpose() * p.asDiagonal() * c;
  m.cov = 0.5 * (m.cov + m.cov.transpose());
  for (int t : orders) m.moments.emplace(t, moment_tensor(p, Y, t));
  return m;
}

Moments add_noise(const Moments& tilde, const NoiseScales& scales, Rng& rng) {
  const int d = static_cast<int>(tilde.mean.size());
  auto width = [&](int t) {
    auto it = scales.sigma.find(t);
    return it == scales.sigma.end() ? 0.0 : it->second;
  };
  Moments out = tilde;
  const MatrixXd S = detail::psd_sqrt(tilde.cov, kSqrtFloor);
  if (width(1) > 0.0) {
    VectorXd z(d);
    for (int j = 0; j < d; ++j) z(j) = width(1) * rng.normal();
    out.mean = tilde.mean + S * z;
  }
  if (width(2) > 0.0) {
    const MatrixXd Z = sample_symmetric_tensor(d, 2, width(2), rng).to_matrix();
    MatrixXd c = tilde.cov + S * Z * S;
    out.cov = 0.5 * (c + c.transpose());
  }
  if (!tilde.moments.empty()) {
    const MatrixXd R =
        detail::psd_sqrt(tilde.cov + tilde.mean * tilde.mean.transpose(), kSqrtFloor);
    for (const auto& [t, M] : tilde.moments) {
      if (width(t) <= 0.0) continue;
      SymmetricTensor noise = sample_symmetric_tensor(d, t, width(t), rng).transform(R);
      out.moments[t].entries() = M.entries() + noise.entries();
    }
  }
  return out;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::kOk: return "ok";
    case Status::kRejectSelection: return "reject-selection";
    case Status::kRejectWitness: return "reject-witness";
    case Status::kNumerical: return "numerical-failure";
  }
  return "unknown";
}

static void validate(const Params& params) {
  if (!(params.eps > 0.0 && params.eps <= 1.0) || !(params.delta > 0.0 && params.delta <= 1.0)) {
    throw std::invalid_argument("eps and delta must lie in (0, 1]");
  }
  if (!(params.eta >= 0.0 && params.eta < 0.5)) throw std::invalid_argument("eta must lie in [0, 1/2)");
  if (!(params.L > 0.0)) throw std::invalid_argument("L must be positive");
}

PrivateMechanism::PrivateMechanism(MatrixXd Y, Params params)
    : Y_(std::move(Y)),
      params_((validate(params), std::move(params))),
      oracle_(Y_, params_.C, params_.k, params_.system) {}

const std::vector<double>& PrivateMechanism::scores() {
  std::call_once(scores_once_, [this] {
    scores_ = selection_scores(oracle_, params_.eta, params_.L, params_.workers);
  });
  return scores_;
}

std::size_t PrivateMechanism::certify_calls() const {
  std::lock_guard<std::mutex> lock(mu_);
  return certify_calls_;
}

bool PrivateMechanism::certified(int tau, const VectorXd& p, double c_prime) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = bracket_.find(tau);
    if (it != bracket_.end()) {
      if (c_prime <= it->second.first) return false;
      if (c_prime >= it->second.second) return true;
    }
  }
  const bool ok = certify::check_subgaussian(p, Y_, c_prime, params_.k, params_.certify).accepted;
  std::lock_guard<std::mutex> lock(mu_);
  ++certify_calls_;
  auto [it, inserted] = bracket_.emplace(
      tau, std::make_pair(-std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity()));
  if (ok) {
    it->second.second = std::min(it->second.second, c_prime);
  } else {
    it->second.first = std::max(it->second.first, c_prime);
  }
  return ok;
}

EstimateBundle PrivateMechanism::run(Rng& rng) {
  const Params& params = params_;
  const MatrixXd& Y = Y_;
  const int n = static_cast<int>(Y.rows());
  const int d = static_cast<int>(Y.cols());

  EstimateBundle b;
  b.mode = params.system.mode;
  if (params.L > 0.25 * params.eta * n) b.warnings.push_back("L exceeds 0.25 eta n");
  // Three stages; the last takes the remainder so the ledger sums exactly.
  const double e1 = params.eps / 3.0, e2 = params.eps / 3.0, e3 = params.eps - e1 - e2;
  const double d1 = params.delta / 3.0, d2 = params.delta / 3.0,
               d3 = params.delta - d1 - d2;
  Rng rng_select = rng.split(1);
  Rng rng_witness = rng.split(2);
  Rng rng_noise = rng.split(3);

  // Stable outlier-rate selection.
  const std::vector<double>& sc = scores();
  b.budget.append("selection", e1, d1);
  dp::SelectionResult sel = dp::select(sc, 2.0, e1, d1, params.L / 2.0, rng_select);
  if (!sel.index) {
    b.status = Status::kRejectSelection;
    b.message = sc.empty() ? "no candidate outlier rates" : "selection returned bottom";
    return b;
  }
  b.tau = static_cast<int>(*sel.index) + 1;
  b.selection_score = sel.score;
  b.eta_used = static_cast<double>(b.tau) / n;

  // Witness checking.
  const pseudo::PotentialResult res = oracle_.solve(b.tau);
  b.budget.append("witness-check", e2, d2);
  b.tlap_shift = dp::sample_tlap(dp::tlap_params(1.0, e2, d2), rng_witness);
  b.C_prime = params.C + b.tlap_shift;
  if (!res.pot.feasible()) {
    b.status = Status::kRejectWitness;
    b.message = "selected rate is infeasible";
    return b;
  }
  try {
    b.weights = pseudo::extract_weights(res.pe).p;
  } catch (const std::domain_error& e) {
    b.status = Status::kNumerical;
    b.message = e.what();
    return b;
  }
  if (!(b.C_prime > 0.0)) {
    b.status = Status::kRejectWitness;
    b.message = "shifted constant is not positive";
    return b;
  }
  if (!certified(b.tau, b.weights, b.C_prime)) {
    b.status = Status::kRejectWitness;
    b.message = "witness is not certifiably subgaussian";
    return b;
  }

  // Noise addition.
  const std::vector<int> orders = moment_orders(params.k);
  const Moments tilde = extract_moments(b.weights, Y, orders);
  b.scales = noise_scales(b.C_prime, params.k, params.L, n, d, params.eps, params.delta,
                          params.constants, orders);
  b.estimates = add_noise(tilde, b.scales, rng_noise);
  b.noised = true;
  b.budget.append("noise", e3, d3);
  if (params.psd_project) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(b.estimates.cov);
    b.estimates.cov = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() *
                      es.eigenvectors().transpose();
    b.estimates.cov = 0.5 * (b.estimates.cov + b.estimates.cov.transpose());
  }
  bool finite = b.estimates.mean.allFinite() && b.estimates.cov.allFinite();
  for (const auto& [t, M] : b.estimates.moments) finite = finite && M.entries().allFinite();
  if (!finite) {
    b.status = Status::kNumerical;
    b.message = "non-finite estimate";
  }
  return b;
}

EstimateBundle private_estimate(const MatrixXd& Y, const Params& params, Rng& rng) {
  PrivateMechanism mech(Y, params);
  return mech.run(rng);
}

namespace {

nlohmann::json matrix_json(const MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json r = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

nlohmann::json vector_json(const VectorXd& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

}  // namespace

std::string to_json(const EstimateBundle& b, const Params& params,
                    std::optional<std::uint64_t> seed) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["status"] = to_string(b.status);
  if (!b.message.empty()) j["message"] = b.message;
  j["warnings"] = b.warnings;
  j["mode"] = pseudo::to_string(b.mode);
  j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  if (b.status == Status::kOk) {
    nlohmann::json est;
    est["mean"] = vector_json(b.estimates.mean);
    est["cov"] = matrix_json(b.estimates.cov);
    nlohmann::json mom = nlohmann::json::object();
    for (const auto& [t, M] : b.estimates.moments) {
      mom[std::to_string(t)] = nlohmann::json::parse(dpsos::to_json(M));
    }
    est["moments"] = mom;
    j["estimates"] = est;
  } else {
    j["estimates"] = nullptr;
  }
  j["noised"] = b.noised;
  j["tau"] = b.tau;
  j["eta_used"] = b.eta_used;
  j["C_prime"] = b.C_prime;
  j["tlap_shift"] = b.tlap_shift;
  j["selection_score"] = b.selection_score;
  nlohmann::json ns;
  ns["theta"] = b.scales.theta;
  nlohmann::json g = nlohmann::json::object(), s = nlohmann::json::object();
  for (const auto& [t, v] : b.scales.gamma) g[std::to_string(t)] = v;
  for (const auto& [t, v] : b.scales.sigma) s[std::to_string(t)] = v;
  ns["gamma"] = g;
  ns["sigma"] = s;
  j["noise_scales"] = ns;
  j["budget"] = nlohmann::json::parse(b.budget.to_json());
  nlohmann::json cfg;
  cfg["eta"] = params.eta;
  cfg["C"] = params.C;
  cfg["k"] = params.k;
  cfg["epsilon"] = params.eps;
  cfg["delta"] = params.delta;
  cfg["L"] = params.L;
  cfg["mode"] = pseudo::to_string(params.system.mode);
  cfg["psd_project"] = params.psd_project;
  cfg["constants"] = {{"c1", params.constants.c1},
                      {"ct", params.constants.ct},
                      {"select_util", params.constants.select_util}};
  j["config"] = cfg;
  return j.dump(2);
}

}  // namespace dpsos::estimator
