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

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <cmath>
#include <memory>
#include <ostream>
#include <stdexcept>

namespace dpsos::sdp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kMaxIter:
      return "max_iter";
  }
  return "unknown";
}

int ConeDims::rows() const {
  int r = zero + nonneg;
  for (int q : soc) r += q;
  for (int p : psd) r += svec_size(p);
  return r;
}

int ConeDims::psd_total() const {
  int t = 0;
  for (int p : psd) t += p;
  return t;
}

VectorXd svec(const MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  VectorXd v(svec_size(n));
  int k = 0;
  for (int j = 0; j < n; ++j) {
    v(k++) = m(j, j);
    for (int i = j + 1; i < n; ++i) v(k++) = M_SQRT2 * 0.5 * (m(i, j) + m(j, i));
  }
  return v;
}

MatrixXd smat(const Eigen::Ref<const VectorXd>& v, int n) {
  MatrixXd m(n, n);
  int k = 0;
  for (int j = 0; j < n; ++j) {
    m(j, j) = v(k++);
    for (int i = j + 1; i < n; ++i) {
      m(i, j) = m(j, i) = v(k++) * M_SQRT1_2;
    }
  }
  return m;
}

namespace {

void project_soc(Eigen::Ref<VectorXd> z) {
  const double t = z(0);
  const double nx = z.tail(z.size() - 1).norm();
  if (nx <= t) return;
  if (nx <= -t) {
    z.setZero();
    return;
  }
  const double a = 0.5 * (t + nx);
  z(0) = a;
  z.tail(z.size() - 1) *= a / nx;
}

void project_psd(Eigen::Ref<VectorXd> z, int n) {
  if (n == 1) {
    z(0) = std::max(z(0), 0.0);
    return;
  }
  MatrixXd m = smat(z, n);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
  const VectorXd& ev = es.eigenvalues();
  if (ev(0) >= 0.0) return;
  VectorXd clamped = ev.cwiseMax(0.0);
  MatrixXd p = es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
  z = svec(p);
}

// Projection onto the dual cone K*: free on zero rows, self-dual elsewhere.
void project_dual_cone(Eigen::Ref<VectorXd> y, const ConeDims& k) {
  int off = k.zero;
  for (int i = 0; i < k.nonneg; ++i) y(off + i) = std::max(y(off + i), 0.0);
  off += k.nonneg;
  for (int q : k.soc) {
    project_soc(y.segment(off, q));
    off += q;
  }
  for (int p : k.psd) {
    const int len = svec_size(p);
    project_psd(y.segment(off, len), p);
    off += len;
  }
}

// Projection onto K itself (zero rows map to zero).
void project_primal_cone(Eigen::Ref<VectorXd> s, const ConeDims& k) {
  s.head(k.zero).setZero();
  project_dual_cone(s, k);
}

// Solves (rho_x I + A^T D A) x = r for a diagonal weight D. Rows of A with
// many nonzeros are split off and handled through a Woodbury correction so
// the sparse factor stays sparse.
class NormalSolver {
 public:
  NormalSolver(const SparseMatrix& a, const VectorXd& weight, double rho_x) {
    const int n = static_cast<int>(a.cols());
    const int m = static_cast<int>(a.rows());
    Eigen::SparseMatrix<double, Eigen::RowMajor> rows = a;
    const int dense_threshold = std::max(48, n / 8);
    std::vector<Eigen::Triplet<double>> sparse_trip;
    std::vector<int> dense_rows;
    for (int i = 0; i < m; ++i) {
      const int nnz = static_cast<int>(rows.outerIndexPtr()[i + 1] - rows.outerIndexPtr()[i]);
      if (nnz > dense_threshold) {
        dense_rows.push_back(i);
        continue;
      }
      const double sw = std::sqrt(weight(i));
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(rows, i); it; ++it) {
        sparse_trip.emplace_back(i, static_cast<int>(it.col()), sw * it.value());
      }
    }
    SparseMatrix as(m, n);
    as.setFromTriplets(sparse_trip.begin(), sparse_trip.end());
    SparseMatrix k = SparseMatrix(as.transpose()) * as;
    SparseMatrix eye(n, n);
    eye.setIdentity();
    k += rho_x * eye;
    ldlt_.compute(k);
    if (ldlt_.info() != Eigen::Success) throw std::runtime_error("factorization failed");
    const int nd = static_cast<int>(dense_rows.size());
    if (nd > 0) {
      u_.resize(n, nd);
      VectorXd inv_w(nd);
      for (int c = 0; c < nd; ++c) {
        u_.col(c) = VectorXd(rows.row(dense_rows[c]).transpose());
        inv_w(c) = 1.0 / weight(dense_rows[c]);
      }
      w_ = ldlt_.solve(u_);
      MatrixXd cap = u_.transpose() * w_;
      cap.diagonal() += inv_w;
      cap_.compute(cap);
    }
  }

  VectorXd solve(const VectorXd& r) const {
    VectorXd z = ldlt_.solve(r);
    if (u_.cols() > 0) z -= w_ * cap_.solve(u_.transpose() * z);
    return z;
  }

 private:
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
  MatrixXd u_;
  MatrixXd w_;
  Eigen::LDLT<MatrixXd> cap_;
};

struct Scaling {
  VectorXd d;  // column factors
  VectorXd e;  // row factors
  double sigma_b = 1.0;
  double sigma_c = 1.0;
};

// Ruiz equilibration with cone-uniform row factors.
Scaling equilibrate(SparseMatrix& a, const ConeDims& k, int passes) {
  const int n = static_cast<int>(a.cols());
  const int m = static_cast<int>(a.rows());
  Scaling sc;
  sc.d = VectorXd::Ones(n);
  sc.e = VectorXd::Ones(m);
  for (int pass = 0; pass < passes; ++pass) {
    VectorXd cn = VectorXd::Zero(n);
    VectorXd rn = VectorXd::Zero(m);
    for (int j = 0; j < n; ++j) {
      for (SparseMatrix::InnerIterator it(a, j); it; ++it) {
        const double v = std::abs(it.value());
        cn(j) = std::max(cn(j), v);
        rn(it.row()) = std::max(rn(it.row()), v);
      }
    }
    // Cone blocks other than the orthants need a single shared factor.
    int off = k.zero + k.nonneg;
    auto share = [&](int len) {
      double mx = rn.segment(off, len).maxCoeff();
      rn.segment(off, len).setConstant(mx);
      off += len;
    };
    for (int q : k.soc) share(q);
    for (int p : k.psd) share(svec_size(p));
    VectorXd dc(n), dr(m);
    for (int j = 0; j < n; ++j) dc(j) = cn(j) > 0 ? 1.0 / std::sqrt(cn(j)) : 1.0;
    for (int i = 0; i < m; ++i) dr(i) = rn(i) > 0 ? 1.0 / std::sqrt(rn(i)) : 1.0;
    a = dr.asDiagonal() * a * dc.asDiagonal();
    sc.d = sc.d.cwiseProduct(dc);
    sc.e = sc.e.cwiseProduct(dr);
  }
  sc.d = sc.d.cwiseMax(1e-6).cwiseMin(1e6);
  sc.e = sc.e.cwiseMax(1e-6).cwiseMin(1e6);
  return sc;
}

double inf_norm(const VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Douglas-Rachford splitting on the homogeneous self-dual embedding
//
//     [0; s; kappa] = M [x; y; tau],  M = [0 A^T c; -A 0 b; -c^T -b^T 0],
//
// in the diagonal metric R = diag(rho_x I, rho_y, 1):
//
//     u~ = (R + M)^{-1} R w,   u = Pi(2u~ - w),   w += alpha (u - u~),
//
// with v = R(w - 2u~ + u) holding (., s, kappa). rho_y is adapted to balance
// the primal and dual residuals (equality rows get a stiffer weight), and
// the fixed-point map on w is accelerated with safeguarded Anderson mixing.
ConeSolution run_admm(const ConeProgram& prog, const SolverConfig& cfg) {
  const int n = static_cast<int>(prog.A.cols());
  const int m = static_cast<int>(prog.A.rows());
  const int dim = n + m + 1;
  const ConeDims& cones = prog.cones;

  SparseMatrix a = prog.A;
  a.makeCompressed();
  Scaling sc = equilibrate(a, cones, cfg.equilibration_passes);
  // Rebuild the scaled matrix from the original so the factors are exact.
  a = sc.e.asDiagonal() * prog.A * sc.d.asDiagonal();
  a.makeCompressed();
  VectorXd bh = sc.e.cwiseProduct(prog.b);
  VectorXd ch = sc.d.cwiseProduct(prog.c);
  sc.sigma_b = 1.0 / std::max(1.0, bh.norm());
  sc.sigma_c = 1.0 / std::max(1.0, ch.norm());
  bh *= sc.sigma_b;
  ch *= sc.sigma_c;
  const SparseMatrix at = a.transpose();

  constexpr double kRhoX = 1e-6;
  constexpr double kZeroRowFactor = 1e-3;
  double scale = 0.1;
  VectorXd rho_y(m);
  auto set_rho = [&] {
    for (int i = 0; i < m; ++i) rho_y(i) = (i < cones.zero ? kZeroRowFactor : 1.0) / scale;
  };
  set_rho();

  std::unique_ptr<NormalSolver> normal;
  VectorXd gx, gy;
  double hg = 0.0;
  // (R_xy + M_xy)^{-1} [rx; ry] with M_xy = [0 A^T; -A 0].
  auto solve_xy = [&](const VectorXd& rx, const VectorXd& ry, VectorXd& x, VectorXd& y) {
    VectorXd inv_ry = ry.cwiseQuotient(rho_y);
    x = normal->solve(rx - at * inv_ry);
    y = (ry + a * x).cwiseQuotient(rho_y);
  };
  auto factor = [&] {
    normal = std::make_unique<NormalSolver>(a, rho_y.cwiseInverse(), kRhoX);
    solve_xy(ch, bh, gx, gy);
    hg = ch.dot(gx) + bh.dot(gy);
  };
  factor();

  // One splitting step from w; fills u = (x, y, tau) and v = (s, kappa).
  VectorXd u(dim), vs(m);
  double vt = 0.0;
  VectorXd px, py;
  auto step = [&](const VectorXd& w) {
    solve_xy(kRhoX * w.head(n), rho_y.cwiseProduct(w.segment(n, m)), px, py);
    const double wt = w(dim - 1);
    const double tt = (wt + ch.dot(px) + bh.dot(py)) / (1.0 + hg);
    px -= gx * tt;
    py -= gy * tt;
    u.head(n) = 2.0 * px - w.head(n);
    u.segment(n, m) = 2.0 * py - w.segment(n, m);
    project_dual_cone(u.segment(n, m), cones);
    u(dim - 1) = std::max(2.0 * tt - wt, 0.0);
    vs = rho_y.cwiseProduct(w.segment(n, m) - 2.0 * py + u.segment(n, m));
    vt = wt - 2.0 * tt + u(dim - 1);
    VectorXd next = w;
    next.head(n) += cfg.alpha * (u.head(n) - px);
    next.segment(n, m) += cfg.alpha * (u.segment(n, m) - py);
    next(dim - 1) += cfg.alpha * (u(dim - 1) - tt);
    return next;
  };

  // Anderson memory: columns of differences of iterates and residuals.
  const int mem = std::max(0, cfg.anderson_memory);
  MatrixXd dw(dim, std::max(mem, 1)), dg(dim, std::max(mem, 1));
  int stored = 0, slot = 0;
  VectorXd w = VectorXd::Zero(dim);
  w(dim - 1) = 1.0;
  VectorXd w_prev, g_prev, plain_prev;
  bool prev_was_aa = false;
  double g_prev_norm = std::numeric_limits<double>::infinity();

  const double b_norm = inf_norm(prog.b);
  const double c_norm = inf_norm(prog.c);
  int last_rescale = 0;

  ConeSolution out;
  out.status = SolveStatus::kMaxIter;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    VectorXd plain = step(w);
    VectorXd g = plain - w;
    const double g_norm = g.norm();
    if (prev_was_aa && g_norm > g_prev_norm) {
      // Safeguard: the accelerated point made things worse; fall back.
      w = plain_prev;
      stored = 0;
      prev_was_aa = false;
      plain = step(w);
      g = plain - w;
    } else if (it > 1 && mem > 0) {
      dw.col(slot) = w - w_prev;
      dg.col(slot) = g - g_prev;
      slot = (slot + 1) % mem;
      stored = std::min(stored + 1, mem);
    }
    w_prev = w;
    g_prev = g;
    g_prev_norm = g.norm();
    plain_prev = plain;
    prev_was_aa = false;
    if (stored > 0) {
      const MatrixXd Y = dg.leftCols(stored);
      MatrixXd gram = Y.transpose() * Y;
      gram.diagonal().array() += 1e-10 * (1.0 + gram.diagonal().maxCoeff());
      VectorXd gamma = gram.ldlt().solve(Y.transpose() * g);
      if (gamma.allFinite()) {
        w = plain - (dw.leftCols(stored) + Y) * gamma;
        prev_was_aa = true;
      } else {
        w = plain;
        stored = 0;
      }
    } else {
      w = plain;
    }

    if (it % cfg.check_every != 0 && it != cfg.max_iter) continue;
    out.iterations = it;
    const double ut = u(dim - 1);
    VectorXd ux = u.head(n), uy = u.segment(n, m);

    if (ut > 1e-12) {
      VectorXd x = sc.d.cwiseProduct(ux) / (ut * sc.sigma_b);
      VectorXd s = vs.cwiseQuotient(sc.e) / (ut * sc.sigma_b);
      VectorXd y = sc.e.cwiseProduct(uy) / (ut * sc.sigma_c);
      VectorXd ax = prog.A * x;
      VectorXd aty = prog.A.transpose() * y;
      const double pres = inf_norm(ax + s - prog.b);
      const double dres = inf_norm(aty + prog.c);
      const double pobj = prog.c.dot(x);
      const double dobj = -prog.b.dot(y);
      const double gap = std::abs(pobj - dobj);
      out.x = x;
      out.s = s;
      out.y = y;
      out.objective = pobj;
      out.primal_residual = pres;
      out.dual_residual = dres;
      out.gap = gap;
      const double pscale = 1.0 + std::max({b_norm, inf_norm(ax), inf_norm(s)});
      const double dscale = 1.0 + std::max(c_norm, inf_norm(aty));
      const double gscale = 1.0 + std::abs(pobj) + std::abs(dobj);
      if (std::getenv("DPSOS_SDP_TRACE") && it % 500 == 0) {
        std::fprintf(stderr, "it %d pres %.3e dres %.3e gap %.3e tau %.3e kappa %.3e scale %.3e\n",
                     it, pres / pscale, dres / dscale, gap / gscale, ut, vt, scale);
      }
      if (pres <= cfg.feas_tol * pscale && dres <= cfg.feas_tol * dscale &&
          gap <= cfg.gap_tol * gscale) {
        out.status = SolveStatus::kOptimal;
        return out;
      }
      // Rebalance the metric when one residual dominates the other.
      if (it - last_rescale >= 100) {
        const double rel_p = pres / pscale;
        const double rel_d = dres / dscale;
        if (rel_p > 0 && rel_d > 0) {
          const double f = std::sqrt(rel_p / rel_d);
          if (f > 5.0 || f < 0.2) {
            scale = std::clamp(scale * f, 1e-6, 1e6);
            set_rho();
            // Keep the fixed point: w = u + R^{-1} v.
            w.head(n) = ux;
            w.segment(n, m) = uy + vs.cwiseQuotient(rho_y);
            w(dim - 1) = ut + vt;
            factor();
            stored = 0;
            prev_was_aa = false;
            g_prev_norm = std::numeric_limits<double>::infinity();
            last_rescale = it;
          }
        }
      }
    }
    // Infeasibility certificate: y in K*, A^T y = 0, b^T y < 0.
    VectorXd yc = sc.e.cwiseProduct(uy);
    const double by = prog.b.dot(yc);
    if (by < 0) {
      VectorXd yn = yc / (-by);
      if (inf_norm(prog.A.transpose() * yn) <= cfg.infeas_tol * (1.0 + c_norm)) {
        out.status = SolveStatus::kInfeasible;
        out.y = yn;
        return out;
      }
    }
  }
  return out;
}

void check_program(const ConeProgram& prog, const SolverConfig& cfg) {
  const int m = prog.cones.rows();
  if (prog.A.rows() != m || prog.b.size() != m || prog.c.size() != prog.A.cols()) {
    throw std::invalid_argument("cone program dimensions are inconsistent");
  }
  if (prog.cones.psd_total() > cfg.dim_cap) throw std::length_error("dimension cap exceeded");
}

}  // namespace

ConeSolution solve_cone(const ConeProgram& prog, const SolverConfig& cfg) {
  check_program(prog, cfg);
  ConeSolution sol = run_admm(prog, cfg);
  if (sol.status != SolveStatus::kMaxIter || !cfg.phase1) return sol;

  // Phase 1: minimize the uniform slack t needed to make the constraints
  // hold, A x - t e + s = b with e the cone identity, t >= -1.
  const ConeDims& k = prog.cones;
  const int n = static_cast<int>(prog.A.cols());
  const int m = k.rows();
  // Layout: original zero rows, then a new nonneg row for t >= -1, then the
  // original remaining rows shifted by one.
  std::vector<Eigen::Triplet<double>> shifted;
  for (int j = 0; j < n; ++j) {
    for (SparseMatrix::InnerIterator it(prog.A, j); it; ++it) {
      const int r = static_cast<int>(it.row());
      shifted.emplace_back(r < k.zero ? r : r + 1, j, it.value());
    }
  }
  shifted.emplace_back(k.zero, n, -1.0);
  int off = k.zero + 1;
  for (int i = 0; i < k.nonneg; ++i) shifted.emplace_back(off + i, n, -1.0);
  off += k.nonneg;
  for (int q : k.soc) {
    shifted.emplace_back(off, n, -1.0);
    off += q;
  }
  for (int p : k.psd) {
    for (int j = 0; j < p; ++j) shifted.emplace_back(off + svec_index(p, j, j), n, -1.0);
    off += svec_size(p);
  }
  ConeProgram p1;
  p1.cones = k;
  p1.cones.nonneg += 1;
  p1.A.resize(m + 1, n + 1);
  p1.A.setFromTriplets(shifted.begin(), shifted.end());
  p1.b.resize(m + 1);
  p1.b.head(k.zero) = prog.b.head(k.zero);
  p1.b(k.zero) = 1.0;
  p1.b.tail(m - k.zero) = prog.b.tail(m - k.zero);
  p1.c = VectorXd::Zero(n + 1);
  p1.c(n) = 1.0;
  SolverConfig c1 = cfg;
  c1.phase1 = false;
  ConeSolution ps = run_admm(p1, c1);
  if (ps.status == SolveStatus::kOptimal) {
    sol.phase1_slack = ps.objective;
    if (ps.objective > cfg.feas_tol * (1.0 + inf_norm(prog.b)) * 10.0) {
      sol.status = SolveStatus::kInfeasible;
    }
  } else if (ps.status == SolveStatus::kInfeasible) {
    // Equality rows alone are inconsistent.
    sol.status = SolveStatus::kInfeasible;
  }
  return sol;
}

namespace {

void check_symmetric(const MatrixXd& m) {
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("non-symmetric input");
  }
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SolverConfig& cfg) {
  const int nb = static_cast<int>(problem.block_dims.size());
  int total_dim = 0;
  std::vector<int> offsets(nb + 1, 0);
  for (int b = 0; b < nb; ++b) {
    if (problem.block_dims[b] < 1) throw std::invalid_argument("block dimension must be >= 1");
    total_dim += problem.block_dims[b];
    offsets[b + 1] = offsets[b] + svec_size(problem.block_dims[b]);
  }
  if (total_dim > cfg.dim_cap) throw std::length_error("dimension cap exceeded");
  auto check_blocks = [&](const std::vector<MatrixXd>& blocks) {
    if (static_cast<int>(blocks.size()) != nb) {
      throw std::invalid_argument("block count mismatch");
    }
    for (int b = 0; b < nb; ++b) {
      if (blocks[b].rows() != problem.block_dims[b] || blocks[b].cols() != problem.block_dims[b]) {
        throw std::invalid_argument("block dimension mismatch");
      }
      check_symmetric(blocks[b]);
    }
  };
  check_blocks(problem.objective);
  for (const auto& con : problem.constraints) check_blocks(con.blocks);

  const int nvar = offsets[nb];
  int n_eq = 0, n_ineq = 0;
  for (const auto& con : problem.constraints) (con.sense == Sense::kEq ? n_eq : n_ineq)++;

  ConeProgram prog;
  prog.cones.zero = n_eq;
  prog.cones.nonneg = n_ineq;
  for (int d : problem.block_dims) prog.cones.psd.push_back(d);
  const int rows = prog.cones.rows();
  prog.b = VectorXd::Zero(rows);
  prog.c = VectorXd::Zero(nvar);
  for (int b = 0; b < nb; ++b) {
    prog.c.segment(offsets[b], offsets[b + 1] - offsets[b]) = svec(problem.objective[b]);
  }
  std::vector<Eigen::Triplet<double>> trip;
  int eq_row = 0, ineq_row = n_eq;
  for (const auto& con : problem.constraints) {
    const int row = con.sense == Sense::kEq ? eq_row++ : ineq_row++;
    const double sign = con.sense == Sense::kGeq ? -1.0 : 1.0;
    for (int b = 0; b < nb; ++b) {
      VectorXd v = svec(con.blocks[b]);
      for (int i = 0; i < v.size(); ++i) {
        if (v(i) != 0.0) trip.emplace_back(row, offsets[b] + i, sign * v(i));
      }
    }
    prog.b(row) = sign * con.rhs;
  }
  int off = n_eq + n_ineq;
  for (int i = 0; i < nvar; ++i) trip.emplace_back(off + i, i, -1.0);
  prog.A.resize(rows, nvar);
  prog.A.setFromTriplets(trip.begin(), trip.end());

  ConeSolution cs = solve_cone(prog, cfg);
  SdpSolution out;
  out.status = cs.status;
  out.iterations = cs.iterations;
  out.primal_residual = cs.primal_residual;
  out.dual_residual = cs.dual_residual;
  out.dual_gap = cs.gap;
  if (cs.s.size() == rows) {
    VectorXd sv = cs.s.tail(nvar);
    project_primal_cone(sv, ConeDims{0, 0, {}, problem.block_dims});
    double obj = 0.0;
    for (int b = 0; b < nb; ++b) {
      out.blocks.push_back(smat(sv.segment(offsets[b], offsets[b + 1] - offsets[b]),
                                problem.block_dims[b]));
      obj += (problem.objective[b].cwiseProduct(out.blocks.back())).sum();
    }
    out.objective_value = obj;
  }
  return out;
}

void dump_triplets(const SdpProblem& problem, std::ostream& os) {
  const int nb = static_cast<int>(problem.block_dims.size());
  os.precision(17);
  os << "blocks";
  for (int d : problem.block_dims) os << ' ' << d;
  os << '\n';
  auto emit = [&](const std::vector<MatrixXd>& blocks, const char* prefix) {
    for (int b = 0; b < nb; ++b) {
      const MatrixXd& m = blocks[b];
      for (int j = 0; j < m.cols(); ++j) {
        for (int i = 0; i <= j; ++i) {
          if (m(i, j) != 0.0) {
            os << prefix << (b + 1) << ' ' << (i + 1) << ' ' << (j + 1) << ' ' << m(i, j) << '\n';
          }
        }
      }
    }
  };
  emit(problem.objective, "objective ");
  for (std::size_t c = 0; c < problem.constraints.size(); ++c) {
    const auto& con = problem.constraints[c];
    const char* sense = con.sense == Sense::kEq ? "=" : (con.sense == Sense::kGeq ? ">=" : "<=");
    os << "constraint " << (c + 1) << ' ' << sense << ' ' << con.rhs << '\n';
    emit(con.blocks, "");
  }
}

}  // namespace dpsos::sdp
