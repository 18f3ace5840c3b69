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

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "dpsos/certify.hpp"
#include "gram.hpp"
#include "json.hpp"

namespace dpsos::pseudo {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string to_string(Mode m) { return m == Mode::kExact ? "exact-sdp" : "pinned-witness"; }

Mode mode_from_string(const std::string& s) {
  if (s == "exact" || s == "exact-sdp") return Mode::kExact;
  if (s == "pinned" || s == "pinned-witness") return Mode::kPinned;
  throw std::invalid_argument("unknown mode: " + s);
}

ConstraintSystem::ConstraintSystem(MatrixXd Y, double eta, double C, int k, SystemConfig cfg)
    : Y_(std::move(Y)), eta_(eta), C_(C), k_(k), cfg_(std::move(cfg)) {
  if (Y_.rows() < 1 || Y_.cols() < 1) throw std::invalid_argument("empty dataset");
  if (!Y_.allFinite()) throw std::invalid_argument("non-finite data");
  if (!(eta_ >= 0.0 && eta_ < 1.0)) throw std::invalid_argument("eta must lie in [0, 1)");
  if (!(C_ > 0.0)) throw std::invalid_argument("C must be positive");
  if (k_ < 1) throw std::invalid_argument("k must be >= 1");
  if (cfg_.mode == Mode::kExact &&
      (k_ != 2 || n() > cfg_.max_n_exact || d() > cfg_.max_d_exact)) {
    throw std::length_error("instance cap");
  }
}

double ConstraintSystem::subgaussian_constant() const { return std::pow(C_ * k_, k_); }

ConstraintCounts ConstraintSystem::counts() const {
  return {n(), 1, d(), n() * d(), 1};
}

ConstraintSystem ConstraintSystem::with_eta(double eta) const {
  return ConstraintSystem(Y_, eta, C_, k_, cfg_);
}

ConstraintSystem ConstraintSystem::with_data(MatrixXd Y) const {
  return ConstraintSystem(std::move(Y), eta_, C_, k_, cfg_);
}

ConstraintSystem build_system(const MatrixXd& Y, double eta, double C, int k,
                              const SystemConfig& cfg) {
  return ConstraintSystem(Y, eta, C, k, cfg);
}

void PseudoExpectation::build_index() {
  index.clear();
  for (std::size_t i = 0; i < sets.size(); ++i) index.emplace(sets[i], static_cast<int>(i));
}

double PseudoExpectation::value(const std::vector<int>& set) const {
  auto it = index.find(set);
  return it == index.end() ? 0.0 : values(it->second);
}

VectorXd PseudoExpectation::first_moments() const {
  VectorXd m(n);
  for (int i = 0; i < n; ++i) m(i) = value({i});
  return m;
}

MatrixXd PseudoExpectation::moment_matrix() const {
  if (mode != Mode::kExact) throw std::logic_error("moment matrix needs exact mode");
  std::vector<const std::vector<int>*> basis;
  for (const auto& s : sets) {
    if (static_cast<int>(s.size()) * 2 <= degree) basis.push_back(&s);
  }
  const int nb = static_cast<int>(basis.size());
  MatrixXd m(nb, nb);
  std::vector<int> u;
  for (int a = 0; a < nb; ++a) {
    for (int b = 0; b <= a; ++b) {
      u.clear();
      std::set_union(basis[a]->begin(), basis[a]->end(), basis[b]->begin(), basis[b]->end(),
                     std::back_inserter(u));
      m(a, b) = m(b, a) = value(u);
    }
  }
  return m;
}

namespace {

// All subsets of {0..n-1} of size <= max_size, ordered by size then
// lexicographically.
std::vector<std::vector<int>> enumerate_sets(int n, int max_size) {
  std::vector<std::vector<int>> out{{}};
  std::vector<int> cur;
  for (int size = 1; size <= max_size; ++size) {
    cur.resize(size);
    for (int i = 0; i < size; ++i) cur[i] = i;
    if (size > n) break;
    while (true) {
      out.push_back(cur);
      int i = size - 1;
      while (i >= 0 && cur[i] == n - size + i) --i;
      if (i < 0) break;
      ++cur[i];
      for (int j = i + 1; j < size; ++j) cur[j] = cur[j - 1] + 1;
    }
  }
  return out;
}

std::vector<int> sorted_union(std::initializer_list<int> idx) {
  std::vector<int> s(idx);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

double max_pairwise_distance(const MatrixXd& Y) {
  double best = 0.0;
  for (int i = 0; i < Y.rows(); ++i) {
    for (int j = i + 1; j < Y.rows(); ++j) best = std::max(best, (Y.row(i) - Y.row(j)).norm());
  }
  return best;
}

// Quartic forms q_S(v) with pE[g] = sum_S pE[w_S] q_S(v) for the pairwise
// subgaussianity polynomial g, as coefficient vectors in lay.full order.
std::map<std::vector<int>, std::vector<double>> pairwise_forms(const MatrixXd& Y, double big_k,
                                                               const detail::GramLayout& lay) {
  const int n = static_cast<int>(Y.rows());
  const int d = static_cast<int>(Y.cols());
  const double scale = max_pairwise_distance(Y);
  MatrixXd Ys = scale > 0 ? MatrixXd(Y / scale) : Y;
  const int h = lay.side();
  const int rows = lay.rows();
  std::vector<std::vector<int>> prod(h, std::vector<int>(h));
  for (int a = 0; a < h; ++a) {
    for (int b = 0; b < h; ++b) prod[a][b] = lay.row_of.at(lay.half[a] * lay.half[b]);
  }
  std::map<poly::Monomial, int> half_index;
  for (int a = 0; a < h; ++a) half_index.emplace(lay.half[a], a);

  struct Pair {
    int i, j;
    std::vector<double> quad;
    std::vector<double> quart;
  };
  std::vector<Pair> pairs;
  std::vector<double> delta(d);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int c = 0; c < d; ++c) delta[c] = Ys(i, c) - Ys(j, c);
      Pair p{i, j, std::vector<double>(h, 0.0), {}};
      const poly::Polynomial quad = detail::linear_power(delta.data(), d, 2);
      for (const auto& [m, v] : quad.terms()) {
        p.quad[half_index.at(m)] += v;
      }
      p.quart = lay.coefficients(detail::linear_power(delta.data(), d, 4));
      pairs.push_back(std::move(p));
    }
  }

  const double norm = 1.0 / std::pow(static_cast<double>(n), 4);
  std::map<std::vector<int>, std::vector<double>> forms;
  auto slot = [&](std::vector<int> s) -> std::vector<double>& {
    auto [it, inserted] = forms.try_emplace(std::move(s));
    if (inserted) it->second.assign(rows, 0.0);
    return it->second;
  };
  // ((K+3)/2) * (2 sum_{i<j} w_i w_j Q_ij)^2.
  const double lead = 0.5 * (big_k + 3.0) * 4.0 * norm;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    for (std::size_t q = p; q < pairs.size(); ++q) {
      const double f = (p == q ? 1.0 : 2.0) * lead;
      auto& acc = slot(sorted_union({pairs[p].i, pairs[p].j, pairs[q].i, pairs[q].j}));
      for (int a = 0; a < h; ++a) {
        const double qa = pairs[p].quad[a] * f;
        if (qa == 0.0) continue;
        for (int b = 0; b < h; ++b) acc[prod[a][b]] += qa * pairs[q].quad[b];
      }
    }
  }
  // -(sum_l w_l)^2 * 2 sum_{i<j} w_i w_j F_ij.
  for (int l = 0; l < n; ++l) {
    for (int m = 0; m < n; ++m) {
      for (const auto& pr : pairs) {
        auto& acc = slot(sorted_union({l, m, pr.i, pr.j}));
        for (int r = 0; r < rows; ++r) acc[r] -= 2.0 * norm * pr.quart[r];
      }
    }
  }
  return forms;
}

struct BuiltProgram {
  sdp::ConeProgram prog;
  std::vector<std::vector<int>> sets;  // variable j <-> sets[j + 1]
  int t_col = -1;
};

void add_potential_cone(std::vector<Eigen::Triplet<double>>& trip, int row, int t_col,
                        const std::vector<int>& m_cols, VectorXd& b) {
  // (t + 1, t - 1, 2 m / sqrt(n)) in the second-order cone <=> t >= |m|^2 / n.
  const double f = 2.0 / std::sqrt(static_cast<double>(m_cols.size()));
  trip.emplace_back(row, t_col, -1.0);
  b(row) = 1.0;
  trip.emplace_back(row + 1, t_col, -1.0);
  b(row + 1) = -1.0;
  for (std::size_t i = 0; i < m_cols.size(); ++i) trip.emplace_back(row + 2 + i, m_cols[i], -f);
}

BuiltProgram build_exact(const ConstraintSystem& sys, bool with_objective) {
  const int n = sys.n();
  const int d = sys.d();
  BuiltProgram out;
  out.sets = enumerate_sets(n, 4);
  std::map<std::vector<int>, int> id;
  for (std::size_t i = 0; i < out.sets.size(); ++i) id.emplace(out.sets[i], static_cast<int>(i));
  const int ny = static_cast<int>(out.sets.size()) - 1;
  int nb = 0;
  while (nb < static_cast<int>(out.sets.size()) && out.sets[nb].size() <= 2) ++nb;

  detail::GramLayout lay(d, 2);
  const int gside = lay.side();
  const int ng = sdp::svec_size(gside);
  const int nvar = ny + ng + (with_objective ? 1 : 0);
  if (with_objective) out.t_col = ny + ng;

  auto forms = pairwise_forms(sys.data(), sys.subgaussian_constant(), lay);

  sdp::ConeDims& cones = out.prog.cones;
  cones.zero = lay.rows();
  cones.nonneg = 1;
  if (with_objective) cones.soc = {n + 2};
  cones.psd = {nb, gside};
  const int m = cones.rows();
  out.prog.b = VectorXd::Zero(m);
  out.prog.c = VectorXd::Zero(nvar);
  std::vector<Eigen::Triplet<double>> trip;

  // pE[g](v) = z(v)^T G z(v).
  for (const auto& [set, coeffs] : forms) {
    const int col = id.at(set) - 1;
    for (int r = 0; r < lay.rows(); ++r) {
      if (coeffs[r] != 0.0) trip.emplace_back(r, col, coeffs[r]);
    }
  }
  for (const auto& e : lay.entries) trip.emplace_back(e.row, ny + e.svec_pos, -e.coef);

  int row = cones.zero;
  // sum_i pE[w_i] / n >= 1 - eta.
  for (int i = 0; i < n; ++i) trip.emplace_back(row, id.at({i}) - 1, -1.0 / n);
  out.prog.b(row) = -(1.0 - sys.eta());
  ++row;

  if (with_objective) {
    std::vector<int> m_cols(n);
    for (int i = 0; i < n; ++i) m_cols[i] = id.at({i}) - 1;
    add_potential_cone(trip, row, out.t_col, m_cols, out.prog.b);
    out.prog.c(out.t_col) = 1.0;
    row += n + 2;
  }

  // Moment matrix M[a, b] = pE[w_{a u b}].
  std::vector<int> u;
  for (int b = 0; b < nb; ++b) {
    for (int a = b; a < nb; ++a) {
      const int pos = row + sdp::svec_index(nb, a, b);
      const double f = a == b ? 1.0 : M_SQRT2;
      u.clear();
      std::set_union(out.sets[a].begin(), out.sets[a].end(), out.sets[b].begin(),
                     out.sets[b].end(), std::back_inserter(u));
      const int sid = id.at(u);
      if (sid == 0) {
        out.prog.b(pos) = f;
      } else {
        trip.emplace_back(pos, sid - 1, -f);
      }
    }
  }
  row += sdp::svec_size(nb);
  for (int i = 0; i < ng; ++i) trip.emplace_back(row + i, ny + i, -1.0);

  out.prog.A.resize(m, nvar);
  out.prog.A.setFromTriplets(trip.begin(), trip.end());
  return out;
}

void weighted_stats(const VectorXd& p, const MatrixXd& Y, VectorXd& mu, MatrixXd& cov) {
  mu = Y.transpose() * p;
  MatrixXd c = Y.rowwise() - mu.transpose();
  cov = c.transpose() * p.asDiagonal() * c;
  cov = 0.5 * (cov + cov.transpose());
}

// Whitening map restricted to the covariance column space (r x d).
MatrixXd whitening(const MatrixXd& cov, double rank_tol) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(cov);
  const VectorXd& ev = es.eigenvalues();
  const int d = static_cast<int>(cov.rows());
  const double top = ev(d - 1);
  std::vector<int> keep;
  if (top > 1e-300) {
    for (int j = 0; j < d; ++j) {
      if (ev(j) > rank_tol * top) keep.push_back(j);
    }
  }
  MatrixXd w(keep.size(), d);
  for (std::size_t r = 0; r < keep.size(); ++r) {
    w.row(r) = es.eigenvectors().col(keep[r]).transpose() / std::sqrt(ev(keep[r]));
  }
  return w;
}

// Coefficients (rows of lay.full) of K |v|^{2k} - <z_i, v>^{2k}, one column
// per point, divided by n.
MatrixXd pinned_forms(const MatrixXd& Y, const VectorXd& center, const MatrixXd& cov,
                      double big_k, int k, double rank_tol, const detail::GramLayout& lay) {
  const int n = static_cast<int>(Y.rows());
  const int r = lay.d;
  MatrixXd w = whitening(cov, rank_tol);
  std::vector<double> norm_c = lay.coefficients(detail::norm_power(r, k));
  MatrixXd out(lay.rows(), n);
  std::vector<double> z(r);
  for (int i = 0; i < n; ++i) {
    VectorXd zi = w * (Y.row(i).transpose() - center);
    for (int c = 0; c < r; ++c) z[c] = zi(c);
    std::vector<double> zc = lay.coefficients(detail::linear_power(z.data(), r, 2 * k));
    for (int q = 0; q < lay.rows(); ++q) out(q, i) = (big_k * norm_c[q] - zc[q]) / n;
  }
  return out;
}

int covariance_rank(const MatrixXd& cov, double rank_tol) {
  return static_cast<int>(whitening(cov, rank_tol).rows());
}

BuiltProgram build_pinned(const ConstraintSystem& sys, const VectorXd& center,
                          const MatrixXd& cov, bool with_objective) {
  const int n = sys.n();
  const int r = covariance_rank(cov, sys.config().rank_tol);
  BuiltProgram out;
  out.sets.push_back({});
  for (int i = 0; i < n; ++i) out.sets.push_back({i});

  std::unique_ptr<detail::GramLayout> lay;
  MatrixXd forms;
  int ng = 0;
  if (r > 0) {
    lay = std::make_unique<detail::GramLayout>(r, sys.k());
    forms = pinned_forms(sys.data(), center, cov, sys.subgaussian_constant(), sys.k(),
                         sys.config().rank_tol, *lay);
    ng = sdp::svec_size(lay->side());
  }
  const int nvar = n + ng + (with_objective ? 1 : 0);
  if (with_objective) out.t_col = n + ng;

  sdp::ConeDims& cones = out.prog.cones;
  cones.zero = lay ? lay->rows() : 0;
  cones.nonneg = 2 * n + 1;
  if (with_objective) cones.soc = {n + 2};
  if (lay) cones.psd = {lay->side()};
  const int m = cones.rows();
  out.prog.b = VectorXd::Zero(m);
  out.prog.c = VectorXd::Zero(nvar);
  std::vector<Eigen::Triplet<double>> trip;
  if (lay) {
    for (int i = 0; i < n; ++i) {
      for (int q = 0; q < lay->rows(); ++q) {
        if (forms(q, i) != 0.0) trip.emplace_back(q, i, forms(q, i));
      }
    }
    for (const auto& e : lay->entries) trip.emplace_back(e.row, n + e.svec_pos, -e.coef);
  }
  int row = cones.zero;
  for (int i = 0; i < n; ++i) {
    trip.emplace_back(row + i, i, -1.0);
    trip.emplace_back(row + n + i, i, 1.0);
    out.prog.b(row + n + i) = 1.0;
  }
  row += 2 * n;
  for (int i = 0; i < n; ++i) trip.emplace_back(row, i, -1.0 / n);
  out.prog.b(row) = -(1.0 - sys.eta());
  ++row;
  if (with_objective) {
    std::vector<int> m_cols(n);
    for (int i = 0; i < n; ++i) m_cols[i] = i;
    add_potential_cone(trip, row, out.t_col, m_cols, out.prog.b);
    out.prog.c(out.t_col) = 1.0;
    row += n + 2;
  }
  for (int i = 0; i < ng; ++i) trip.emplace_back(row + i, n + i, -1.0);
  out.prog.A.resize(m, nvar);
  out.prog.A.setFromTriplets(trip.begin(), trip.end());
  return out;
}

PseudoExpectation to_pe(const BuiltProgram& bp, const sdp::ConeSolution& sol, Mode mode, int n,
                        int degree) {
  PseudoExpectation pe;
  pe.mode = mode;
  pe.n = n;
  pe.degree = degree;
  pe.sets = bp.sets;
  pe.values = VectorXd::Zero(bp.sets.size());
  pe.values(0) = 1.0;
  if (sol.x.size() > 0) {
    for (std::size_t j = 1; j < bp.sets.size(); ++j) pe.values(j) = sol.x(j - 1);
  }
  pe.build_index();
  return pe;
}

void finish(PotentialResult& res, const sdp::ConeSolution& sol, double eta) {
  res.pot.eta = eta;
  res.pot.status = sol.status;
  if (sol.status == sdp::SolveStatus::kInfeasible) {
    res.pot.value = std::numeric_limits<double>::infinity();
  } else {
    res.pot.value = res.pe.first_moments().squaredNorm();
  }
}

PotentialResult minimize_exact(const ConstraintSystem& sys) {
  BuiltProgram bp = build_exact(sys, true);
  sdp::ConeSolution sol = sdp::solve_cone(bp.prog, sys.config().solver);
  PotentialResult res;
  res.pe = to_pe(bp, sol, Mode::kExact, sys.n(), 4);
  finish(res, sol, sys.eta());
  return res;
}

// Pinned problem when the whitened data has rank <= 1: the subgaussianity
// form is a single coefficient, so the program is the QP
//
//     min |m|^2  s.t.  0 <= m <= 1,  sum m >= s,  a^T m >= 0,
//
// solved through its two-multiplier dual: m_i = clip((lambda + mu a_i) / 2).
// Returns false when infeasible.
bool solve_scalar_pinned(const VectorXd& a, double s, VectorXd& m) {
  const int n = static_cast<int>(a.size());
  // Exact feasibility: maximize a^T m over the box with sum m >= s.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int x, int y) { return a(x) > a(y); });
  double best = 0.0, mass = 0.0;
  for (int i : order) {
    if (a(i) >= 0.0) {
      best += a(i);
      mass += 1.0;
    } else if (mass < s) {
      const double take = std::min(1.0, s - mass);
      best += take * a(i);
      mass += take;
    }
  }
  const double amax = a.cwiseAbs().maxCoeff();
  if (best < -1e-12 * std::max(1.0, amax) * n) return false;

  auto weights = [&](double lambda, double mu, VectorXd& out) {
    out = ((lambda + mu * a.array()) / 2.0).max(0.0).min(1.0).matrix();
  };
  // Smallest lambda >= 0 with sum m(lambda, mu) >= s.
  auto inner = [&](double mu, VectorXd& out) {
    weights(0.0, mu, out);
    if (out.sum() >= s) return;
    double lo = 0.0, hi = 2.0 + mu * std::max(0.0, -a.minCoeff());
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      weights(mid, mu, out);
      (out.sum() >= s ? hi : lo) = mid;
    }
    weights(hi, mu, out);
  };
  inner(0.0, m);
  if (a.dot(m) >= 0.0) return true;
  double lo = 0.0, hi = 1.0 / std::max(amax, 1e-300);
  VectorXd trial;
  int grow = 0;
  for (inner(hi, trial); a.dot(trial) < 0.0 && grow < 200; ++grow) {
    lo = hi;
    hi *= 2.0;
    inner(hi, trial);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    inner(mid, trial);
    (a.dot(trial) >= 0.0 ? hi : lo) = mid;
  }
  inner(hi, m);
  return true;
}

PotentialResult minimize_pinned(const ConstraintSystem& sys) {
  const int n = sys.n();
  const SystemConfig& cfg = sys.config();
  VectorXd p = VectorXd::Constant(n, 1.0 / n);
  VectorXd center;
  MatrixXd cov;
  weighted_stats(p, sys.data(), center, cov);
  PotentialResult res;
  for (int round = 1; round <= cfg.pinned_max_rounds; ++round) {
    const int r = covariance_rank(cov, cfg.rank_tol);
    if (r <= 1 && cfg.scalar_fast_path) {
      VectorXd a = VectorXd::Zero(n);
      if (r == 1) {
        detail::GramLayout lay(1, sys.k());
        a = pinned_forms(sys.data(), center, cov, sys.subgaussian_constant(), sys.k(),
                         cfg.rank_tol, lay).row(0).transpose();
      }
      VectorXd m;
      const bool ok = solve_scalar_pinned(a, (1.0 - sys.eta()) * n, m);
      res.pe = PseudoExpectation();
      res.pe.mode = Mode::kPinned;
      res.pe.n = n;
      res.pe.degree = 1;
      res.pe.sets.push_back({});
      for (int i = 0; i < n; ++i) res.pe.sets.push_back({i});
      res.pe.values = VectorXd::Zero(n + 1);
      res.pe.values(0) = 1.0;
      if (ok) res.pe.values.tail(n) = m;
      res.pe.build_index();
      sdp::ConeSolution sol;
      sol.status = ok ? sdp::SolveStatus::kOptimal : sdp::SolveStatus::kInfeasible;
      finish(res, sol, sys.eta());
    } else {
      BuiltProgram bp = build_pinned(sys, center, cov, true);
      sdp::ConeSolution sol = sdp::solve_cone(bp.prog, cfg.solver);
      res.pe = to_pe(bp, sol, Mode::kPinned, n, 1);
      finish(res, sol, sys.eta());
    }
    res.pe.center = center;
    res.pe.covariance = cov;
    res.pe.rounds = round;
    if (!res.pot.feasible()) {
      res.pe.converged = false;
      return res;
    }
    VectorXd next_center;
    MatrixXd next_cov;
    weighted_stats(extract_weights(res.pe).p, sys.data(), next_center, next_cov);
    const double change = (next_cov - cov).norm();
    res.pe.converged = change <= cfg.pinned_tol * std::max(1.0, cov.norm());
    if (res.pe.converged) break;
    center = next_center;
    cov = next_cov;
  }
  return res;
}

}  // namespace

bool feasible(const ConstraintSystem& sys, int degree) {
  if (degree != 2 * sys.k()) throw std::invalid_argument("degree must equal 2k");
  return minimize_potential(sys).pot.feasible();
}

PotentialResult minimize_potential(const ConstraintSystem& sys) {
  return sys.mode() == Mode::kExact ? minimize_exact(sys) : minimize_pinned(sys);
}

PseudoExpectation zero_out(const PseudoExpectation& pe, int i) {
  if (i < 0 || i >= pe.n) throw std::out_of_range("index out of range");
  PseudoExpectation out = pe;
  for (std::size_t j = 0; j < out.sets.size(); ++j) {
    if (std::binary_search(out.sets[j].begin(), out.sets[j].end(), i)) out.values(j) = 0.0;
  }
  return out;
}

VectorXd normalize_weights(const VectorXd& x) {
  VectorXd c = x.cwiseMax(0.0);
  const double s = c.sum();
  if (!(s > 1e-12)) throw std::domain_error("degenerate weights");
  return c / s;
}

WeightVector extract_weights(const PseudoExpectation& pe) {
  return {normalize_weights(pe.first_moments()), pe.mode};
}

ResidualReport check_residuals(const PseudoExpectation& pe, const ConstraintSystem& sys,
                               double tol) {
  if (pe.n != sys.n()) throw std::invalid_argument("size mismatch");
  ResidualReport rep;
  const int n = sys.n();
  VectorXd m = pe.first_moments();
  rep.mass_slack = m.sum() - (1.0 - sys.eta()) * n;
  poly::Polynomial form;
  int dim = 0, half = 0;
  if (pe.mode == Mode::kExact) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(pe.moment_matrix(), Eigen::EigenvaluesOnly);
    rep.moment_min_eig = es.eigenvalues()(0);
    detail::GramLayout lay(sys.d(), 2);
    auto forms = pairwise_forms(sys.data(), sys.subgaussian_constant(), lay);
    std::vector<double> acc(lay.rows(), 0.0);
    for (const auto& [set, coeffs] : forms) {
      const double v = pe.value(set);
      for (int r = 0; r < lay.rows(); ++r) acc[r] += v * coeffs[r];
    }
    for (int r = 0; r < lay.rows(); ++r) form.add_term(lay.full[r], acc[r]);
    dim = sys.d();
    half = 2;
  } else {
    rep.box_violation = std::max(0.0, std::max(-m.minCoeff(), m.maxCoeff() - 1.0));
    const int r = covariance_rank(pe.covariance, sys.config().rank_tol);
    if (r > 0) {
      detail::GramLayout lay(r, sys.k());
      MatrixXd forms = pinned_forms(sys.data(), pe.center, pe.covariance,
                                    sys.subgaussian_constant(), sys.k(),
                                    sys.config().rank_tol, lay);
      VectorXd acc = forms * m;
      for (int q = 0; q < lay.rows(); ++q) form.add_term(lay.full[q], acc(q));
      dim = r;
      half = sys.k();
    }
  }
  rep.sos_margin = dim > 0 ? certify::sos_margin(form, dim, half, sys.config().solver) : 0.0;
  rep.ok = rep.mass_slack >= -tol * n && rep.moment_min_eig >= -tol &&
           rep.box_violation <= tol && rep.sos_margin >= -tol;
  return rep;
}

namespace {

nlohmann::json matrix_json(const MatrixXd& m) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    std::vector<double> row(m.cols());
    for (int j = 0; j < m.cols(); ++j) row[j] = m(i, j);
    a.push_back(row);
  }
  return a;
}

}  // namespace

std::string to_json(const ConstraintSystem& sys) {
  nlohmann::json j;
  j["n"] = sys.n();
  j["d"] = sys.d();
  j["eta"] = sys.eta();
  j["C"] = sys.C();
  j["k"] = sys.k();
  j["mode"] = to_string(sys.mode());
  ConstraintCounts c = sys.counts();
  j["constraint_counts"] = {{"booleanity", c.booleanity},
                            {"mass", c.mass},
                            {"mean", c.mean},
                            {"complementarity", c.complementarity},
                            {"subgaussian", c.subgaussian}};
  j["data"] = matrix_json(sys.data());
  return j.dump();
}

std::string to_json(const PseudoExpectation& pe) {
  nlohmann::json j;
  j["mode"] = to_string(pe.mode);
  j["n"] = pe.n;
  j["degree"] = pe.degree;
  nlohmann::json moments = nlohmann::json::array();
  for (std::size_t i = 0; i < pe.sets.size(); ++i) {
    moments.push_back({{"set", pe.sets[i]}, {"value", pe.values(i)}});
  }
  j["moments"] = moments;
  if (pe.mode == Mode::kPinned) {
    j["center"] = std::vector<double>(pe.center.data(), pe.center.data() + pe.center.size());
    j["covariance"] = matrix_json(pe.covariance);
    j["rounds"] = pe.rounds;
    j["converged"] = pe.converged;
  }
  return j.dump();
}

PseudoExpectation pseudo_expectation_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  PseudoExpectation pe;
  pe.mode = mode_from_string(j.at("mode").get<std::string>());
  pe.n = j.at("n").get<int>();
  pe.degree = j.at("degree").get<int>();
  const auto& moments = j.at("moments");
  pe.values.resize(moments.size());
  for (std::size_t i = 0; i < moments.size(); ++i) {
    pe.sets.push_back(moments[i].at("set").get<std::vector<int>>());
    pe.values(i) = moments[i].at("value").get<double>();
  }
  if (pe.mode == Mode::kPinned) {
    auto c = j.at("center").get<std::vector<double>>();
    pe.center = Eigen::Map<VectorXd>(c.data(), c.size());
    auto rows = j.at("covariance").get<std::vector<std::vector<double>>>();
    pe.covariance.resize(rows.size(), rows.size());
    for (std::size_t a = 0; a < rows.size(); ++a) {
      for (std::size_t b = 0; b < rows.size(); ++b) pe.covariance(a, b) = rows[a].at(b);
    }
    pe.rounds = j.value("rounds", 0);
    pe.converged = j.value("converged", true);
  }
  pe.build_index();
  return pe;
}

}  // namespace dpsos::pseudo
