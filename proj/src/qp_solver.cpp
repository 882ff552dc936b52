#include "ddpc/qp_solver.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "ddpc/errors.hpp"
#include "ddpc/linalg.hpp"

namespace ddpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Orthonormal null-space basis of a row stack (identity for an empty stack).
Eigen::MatrixXd rows_null_space(const Eigen::MatrixXd& rows, int nr) {
  if (rows.rows() == 0) return Eigen::MatrixXd::Identity(nr, nr);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(rows.transpose());
  qr.setThreshold(1e-10);
  const int rank = static_cast<int>(qr.rank());
  Eigen::MatrixXd Q = qr.householderQ();
  return Q.rightCols(nr - rank);
}

struct ReducedProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd f;
  Eigen::MatrixXd G;
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  int dim() const { return static_cast<int>(H.rows()); }
  int rows() const { return static_cast<int>(G.rows()); }
};

struct FaceStep {
  Eigen::VectorXd p;
  bool ray = false;        ///< direction of zero curvature and strict descent
  bool stationary = false; ///< current point minimizes over the face
};

/// Minimizes the model on the face {G_W p = 0}. Uses an eigendecomposition of
/// the reduced Hessian with minimum-norm handling of (near-)zero eigenvalues;
/// an unresolved gradient component becomes a descent ray.
FaceStep face_step(const ReducedProblem& rp, const Eigen::VectorXd& z,
                   const Eigen::MatrixXd& Gw) {
  FaceStep out;
  const Eigen::VectorXd grad = rp.H * z + rp.f;
  const Eigen::MatrixXd Zw = rows_null_space(Gw, rp.dim());
  if (Zw.cols() == 0) {
    out.stationary = true;
    out.p = Eigen::VectorXd::Zero(rp.dim());
    return out;
  }
  const Eigen::MatrixXd Hm = Zw.transpose() * rp.H * Zw;
  const Eigen::VectorXd gm = Zw.transpose() * grad;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Hm + Hm.transpose()));
  const Eigen::VectorXd& ev = es.eigenvalues();
  const Eigen::MatrixXd& V = es.eigenvectors();
  const double ev_max = std::max(0.0, ev.maxCoeff());
  const double cutoff = ev_max * 1e-12 * static_cast<double>(std::max<Eigen::Index>(1, ev.size()));

  const Eigen::VectorXd proj = V.transpose() * gm;
  Eigen::VectorXd pm = Eigen::VectorXd::Zero(ev.size());
  Eigen::VectorXd flat = Eigen::VectorXd::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > cutoff)
      pm -= (proj(i) / ev(i)) * V.col(i);
    else
      flat -= proj(i) * V.col(i);
  }
  const double gm_scale = 1.0 + gm.norm();
  if (flat.norm() > 1e-9 * gm_scale) {
    out.ray = true;
    out.p = Zw * flat;
    return out;
  }
  out.p = Zw * pm;
  if (out.p.lpNorm<Eigen::Infinity>() <= 1e-11 * (1.0 + z.lpNorm<Eigen::Infinity>())) {
    out.stationary = true;
    out.p.setZero();
  }
  return out;
}

struct CoreResult {
  QpStatus status = QpStatus::max_iter;
  Eigen::VectorXd z;
  std::vector<ActiveConstraint> working;
  Eigen::VectorXd multipliers;  ///< signed, one per inequality row of rp
  int iterations = 0;
};

/// Primal active-set iteration on a feasible point. Working-set rows must be
/// exactly at their bounds on entry.
CoreResult active_set_loop(const ReducedProblem& rp, Eigen::VectorXd z,
                           std::vector<ActiveConstraint> working, int max_iter,
                           int iterations_used) {
  CoreResult out;
  out.multipliers = Eigen::VectorXd::Zero(rp.rows());
  std::vector<char> in_working(rp.rows(), 0);
  for (const auto& w : working) in_working[w.row] = 1;

  int iter = iterations_used;
  while (iter < max_iter) {
    ++iter;
    Eigen::MatrixXd Gw(working.size(), rp.dim());
    for (std::size_t i = 0; i < working.size(); ++i) Gw.row(i) = rp.G.row(working[i].row);

    const FaceStep step = face_step(rp, z, Gw);

    if (step.stationary) {
      if (working.empty()) {
        out.status = QpStatus::optimal;
        break;
      }
      const Eigen::VectorXd grad = rp.H * z + rp.f;
      const Eigen::VectorXd mu =
          Gw.transpose().colPivHouseholderQr().solve(-grad);
      int worst = -1;
      double worst_val = -1e-9 * (1.0 + grad.lpNorm<Eigen::Infinity>());
      for (std::size_t i = 0; i < working.size(); ++i) {
        const double signed_mu = mu(static_cast<Eigen::Index>(i)) * working[i].side;
        if (signed_mu < worst_val) {
          worst_val = signed_mu;
          worst = static_cast<int>(i);
        }
      }
      if (worst < 0) {
        out.multipliers.setZero();
        for (std::size_t i = 0; i < working.size(); ++i)
          out.multipliers(working[i].row) = mu(static_cast<Eigen::Index>(i));
        out.status = QpStatus::optimal;
        break;
      }
      in_working[working[worst].row] = 0;
      working.erase(working.begin() + worst);
      continue;
    }

    // Ratio test against the inactive rows.
    double alpha = step.ray ? kInf : 1.0;
    int blocker = -1;
    int block_side = 0;
    for (int j = 0; j < rp.rows(); ++j) {
      if (in_working[j]) continue;
      const double val = rp.G.row(j).dot(z);
      const double dir = rp.G.row(j).dot(step.p);
      const double tiny = 1e-13 * std::max(1.0, rp.G.row(j).norm() * step.p.norm());
      double limit = kInf;
      int side = 0;
      if (dir > tiny && std::isfinite(rp.hi(j))) {
        limit = (rp.hi(j) - val) / dir;
        side = +1;
      } else if (dir < -tiny && std::isfinite(rp.lo(j))) {
        limit = (rp.lo(j) - val) / dir;
        side = -1;
      } else {
        continue;
      }
      limit = std::max(limit, 0.0);
      if (limit < alpha - 1e-15) {
        alpha = limit;
        blocker = j;
        block_side = side;
      }
    }
    if (step.ray && blocker < 0) {
      out.status = QpStatus::unbounded;
      out.z = std::move(z);
      out.working = std::move(working);
      out.iterations = iter;
      return out;
    }
    if (!step.ray) alpha = std::min(alpha, 1.0);
    z += alpha * step.p;
    if (blocker >= 0 && (step.ray || alpha < 1.0 - 1e-12)) {
      working.push_back({blocker, block_side});
      in_working[blocker] = 1;
    }
  }

  out.z = std::move(z);
  out.working = std::move(working);
  out.iterations = iter;
  return out;
}

double max_violation(const ReducedProblem& rp, const Eigen::VectorXd& z) {
  double v = 0.0;
  for (int j = 0; j < rp.rows(); ++j) {
    const double val = rp.G.row(j).dot(z);
    if (std::isfinite(rp.lo(j))) v = std::max(v, rp.lo(j) - val);
    if (std::isfinite(rp.hi(j))) v = std::max(v, val - rp.hi(j));
  }
  return v;
}

double bound_scale(const ReducedProblem& rp) {
  double s = 1.0;
  for (int j = 0; j < rp.rows(); ++j) {
    if (std::isfinite(rp.lo(j))) s = std::max(s, std::abs(rp.lo(j)));
    if (std::isfinite(rp.hi(j))) s = std::max(s, std::abs(rp.hi(j)));
  }
  return s;
}

}  // namespace

void QpProblem::validate() const {
  const int n = nv();
  if (H.cols() != n) throw Error::dimension("H must be square");
  const double h_scale = H.size() ? H.cwiseAbs().maxCoeff() : 0.0;
  if (H.size() && (H - H.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, h_scale))
    throw Error::dimension("H must be symmetric");
  if (f.size() != n) throw Error::dimension("f has wrong dimension");
  if (A_eq.rows() > 0 && A_eq.cols() != n) throw Error::dimension("A_eq has wrong column count");
  if (b_eq.size() != A_eq.rows()) throw Error::dimension("b_eq does not match A_eq");
  if (G.rows() > 0 && G.cols() != n) throw Error::dimension("G has wrong column count");
  if (lb.size() != G.rows() || ub.size() != G.rows())
    throw Error::dimension("bounds do not match G");
  for (Eigen::Index j = 0; j < lb.size(); ++j)
    if (!(lb(j) <= ub(j))) throw Error::dimension("lb must not exceed ub");
}

const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::optimal: return "optimal";
    case QpStatus::infeasible: return "infeasible";
    case QpStatus::max_iter: return "max_iter";
    case QpStatus::unbounded: return "unbounded";
  }
  return "?";
}

double KktReport::max_residual() const {
  return std::max(std::max(stationarity, primal), std::max(dual, complementarity));
}

KktReport check_kkt(const QpProblem& problem, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& eq_multipliers,
                    const Eigen::VectorXd& ineq_multipliers) {
  if (x.size() != problem.nv()) throw Error::dimension("candidate has wrong dimension");
  if (eq_multipliers.size() != problem.A_eq.rows())
    throw Error::dimension("equality multipliers have wrong dimension");
  if (ineq_multipliers.size() != problem.G.rows())
    throw Error::dimension("inequality multipliers have wrong dimension");

  KktReport rep;
  Eigen::VectorXd stat = problem.H * x + problem.f;
  if (problem.A_eq.rows() > 0) stat += problem.A_eq.transpose() * eq_multipliers;
  if (problem.G.rows() > 0) stat += problem.G.transpose() * ineq_multipliers;
  rep.stationarity = stat.size() ? stat.lpNorm<Eigen::Infinity>() : 0.0;

  if (problem.A_eq.rows() > 0)
    rep.primal = (problem.A_eq * x - problem.b_eq).lpNorm<Eigen::Infinity>();
  for (Eigen::Index j = 0; j < problem.G.rows(); ++j) {
    const double val = problem.G.row(j).dot(x);
    if (std::isfinite(problem.lb(j))) rep.primal = std::max(rep.primal, problem.lb(j) - val);
    if (std::isfinite(problem.ub(j))) rep.primal = std::max(rep.primal, val - problem.ub(j));

    const double mu = ineq_multipliers(j);
    const double lam_u = std::max(mu, 0.0);
    const double lam_l = std::max(-mu, 0.0);
    if (lam_u > 0.0) {
      if (!std::isfinite(problem.ub(j)))
        rep.dual = std::max(rep.dual, lam_u);
      else
        rep.complementarity = std::max(rep.complementarity, lam_u * std::abs(problem.ub(j) - val));
    }
    if (lam_l > 0.0) {
      if (!std::isfinite(problem.lb(j)))
        rep.dual = std::max(rep.dual, lam_l);
      else
        rep.complementarity = std::max(rep.complementarity, lam_l * std::abs(val - problem.lb(j)));
    }
  }
  return rep;
}

QpSolution QpSolver::solve(const QpProblem& problem,
                           const std::vector<ActiveConstraint>* warm_start) {
  problem.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const int nv = problem.nv();
  const int mi = static_cast<int>(problem.G.rows());
  const int max_iter = opts_.max_iter_factor * (nv + mi) + 10;

  QpSolution sol;
  sol.eq_multipliers = Eigen::VectorXd::Zero(problem.A_eq.rows());
  sol.ineq_multipliers = Eigen::VectorXd::Zero(mi);

  auto finish = [&](QpStatus status, const Eigen::VectorXd& x, int iterations) {
    sol.status = status;
    sol.x = x;
    sol.iterations = iterations;
    sol.objective = 0.5 * x.dot(problem.H * x) + problem.f.dot(x);
    sol.solve_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return sol;
  };

  // Eliminate equalities through a null-space parameterization. Nearly
  // dependent rows (within the shared rank rule) are truncated; the residual
  // this leaves is bounded by the truncation level, far below any genuine
  // inconsistency of the right-hand side, and the truncated directions are
  // instead resolved through the cost.
  Eigen::VectorXd x_p = Eigen::VectorXd::Zero(nv);
  Eigen::MatrixXd N = Eigen::MatrixXd::Identity(nv, nv);
  double eq_res0 = 0.0;
  if (problem.A_eq.rows() > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(problem.A_eq, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd& s = svd.singularValues();
    const double tol = rank_tolerance(problem.A_eq.rows(), nv, s.size() ? s(0) : 0.0);
    int rank = 0;
    while (rank < s.size() && s(rank) > tol) ++rank;
    if (rank > 0)
      x_p = svd.matrixV().leftCols(rank) *
            (s.head(rank).cwiseInverse().asDiagonal() *
             (svd.matrixU().leftCols(rank).transpose() * problem.b_eq));
    eq_res0 = (problem.A_eq * x_p - problem.b_eq).lpNorm<Eigen::Infinity>();
    if (eq_res0 > 1e-6 * (1.0 + problem.b_eq.lpNorm<Eigen::Infinity>()))
      return finish(QpStatus::infeasible, x_p, 0);
    N = svd.matrixV().rightCols(nv - rank);
  }
  const int nr = static_cast<int>(N.cols());

  ReducedProblem rp;
  rp.H = N.transpose() * problem.H * N;
  rp.H = 0.5 * (rp.H + rp.H.transpose());
  rp.f = N.transpose() * (problem.H * x_p + problem.f);
  rp.G = problem.G * N;
  rp.lo = problem.lb - problem.G * x_p;
  rp.hi = problem.ub - problem.G * x_p;
  const double bscale = bound_scale(rp);

  auto assemble_multipliers = [&](const CoreResult& core) {
    sol.ineq_multipliers = core.multipliers;
    if (problem.A_eq.rows() > 0) {
      Eigen::VectorXd resid = problem.H * (x_p + N * core.z) + problem.f;
      if (mi > 0) resid += problem.G.transpose() * core.multipliers;
      sol.eq_multipliers =
          problem.A_eq.transpose().completeOrthogonalDecomposition().solve(-resid);
    }
    sol.active_set = core.working;
    std::sort(sol.active_set.begin(), sol.active_set.end(),
              [](const ActiveConstraint& a, const ActiveConstraint& b) { return a.row < b.row; });
  };

  if (nr == 0) {
    // Equalities fix the point entirely.
    if (max_violation(rp, Eigen::VectorXd::Zero(0)) > opts_.kkt_tol * bscale)
      return finish(QpStatus::infeasible, x_p, 0);
    CoreResult core;
    core.z = Eigen::VectorXd::Zero(0);
    core.multipliers = Eigen::VectorXd::Zero(mi);
    assemble_multipliers(core);
    return finish(QpStatus::optimal, x_p, 0);
  }

  int iterations = 0;
  Eigen::VectorXd z;
  std::vector<ActiveConstraint> working;
  bool have_start = false;

  // Warm start: pin the supplied active set, minimize on that face and keep
  // the result when it is primal feasible.
  if (warm_start != nullptr && !warm_start->empty()) {
    std::vector<ActiveConstraint> ws;
    std::vector<char> seen(mi, 0);
    bool valid = true;
    for (const auto& w : *warm_start) {
      if (w.row < 0 || w.row >= mi || (w.side != -1 && w.side != 1)) continue;
      if (seen[w.row]) continue;
      const double bound = w.side > 0 ? rp.hi(w.row) : rp.lo(w.row);
      if (!std::isfinite(bound)) {
        valid = false;
        break;
      }
      seen[w.row] = 1;
      ws.push_back(w);
    }
    if (valid && !ws.empty()) {
      Eigen::MatrixXd Gw(ws.size(), nr);
      Eigen::VectorXd bw(ws.size());
      for (std::size_t i = 0; i < ws.size(); ++i) {
        Gw.row(i) = rp.G.row(ws[i].row);
        bw(i) = ws[i].side > 0 ? rp.hi(ws[i].row) : rp.lo(ws[i].row);
      }
      const Eigen::VectorXd z_w = Gw.completeOrthogonalDecomposition().solve(bw);
      if ((Gw * z_w - bw).lpNorm<Eigen::Infinity>() <= opts_.feas_tol * bscale) {
        const FaceStep step = face_step(rp, z_w, Gw);
        if (!step.ray) {
          const Eigen::VectorXd z_c = z_w + step.p;
          if (max_violation(rp, z_c) <= opts_.feas_tol * bscale * 10.0) {
            z = z_c;
            working = std::move(ws);
            have_start = true;
          }
        }
      }
    }
  }

  // Cold start: reduced origin if feasible, bootstrap phase otherwise.
  if (!have_start) {
    Eigen::VectorXd z0 = Eigen::VectorXd::Zero(nr);
    if (max_violation(rp, z0) <= opts_.feas_tol * bscale) {
      z = std::move(z0);
      have_start = true;
    } else {
      // Feasibility bootstrap: minimize 0.5 t^2 over the relaxed rows
      // lo <= G z - v t <= hi with t in [0, 1]; (0, 1) is feasible by
      // construction and t* = 0 iff the original rows admit a point.
      Eigen::VectorXd v(mi);
      for (int j = 0; j < mi; ++j) {
        const double val = 0.0;
        const double clamped = std::min(std::isfinite(rp.hi(j)) ? rp.hi(j) : val,
                                        std::max(std::isfinite(rp.lo(j)) ? rp.lo(j) : val, val));
        v(j) = val - clamped;
      }
      ReducedProblem aux;
      aux.H = Eigen::MatrixXd::Zero(nr + 1, nr + 1);
      aux.H(nr, nr) = 1.0;
      aux.f = Eigen::VectorXd::Zero(nr + 1);
      aux.G = Eigen::MatrixXd::Zero(mi + 1, nr + 1);
      aux.G.topLeftCorner(mi, nr) = rp.G;
      aux.G.col(nr).head(mi) = -v;
      aux.G(mi, nr) = 1.0;
      aux.lo.resize(mi + 1);
      aux.hi.resize(mi + 1);
      aux.lo.head(mi) = rp.lo;
      aux.hi.head(mi) = rp.hi;
      aux.lo(mi) = 0.0;
      aux.hi(mi) = 1.0;

      Eigen::VectorXd z1 = Eigen::VectorXd::Zero(nr + 1);
      z1(nr) = 1.0;
      std::vector<ActiveConstraint> w1;
      for (int j = 0; j < mi; ++j) {
        if (v(j) > 0.0) w1.push_back({j, +1});
        else if (v(j) < 0.0) w1.push_back({j, -1});
      }
      CoreResult phase1 = active_set_loop(aux, std::move(z1), std::move(w1), max_iter, 0);
      iterations = phase1.iterations;
      if (phase1.status != QpStatus::optimal)
        return finish(QpStatus::max_iter, x_p + N * phase1.z.head(nr), iterations);
      Eigen::VectorXd z_f = phase1.z.head(nr);
      if (max_violation(rp, z_f) > 1e-7 * bscale)
        return finish(QpStatus::infeasible, x_p + N * z_f, iterations);
      z = std::move(z_f);
      for (const auto& w : phase1.working) {
        if (w.row >= mi) continue;
        const double val = rp.G.row(w.row).dot(z);
        const double bound = w.side > 0 ? rp.hi(w.row) : rp.lo(w.row);
        if (std::isfinite(bound) && std::abs(val - bound) <= opts_.feas_tol * bscale * 10.0)
          working.push_back(w);
      }
      have_start = true;
    }
  }

  CoreResult core = active_set_loop(rp, std::move(z), std::move(working), max_iter, iterations);
  const Eigen::VectorXd x = x_p + N * core.z;
  if (core.status == QpStatus::unbounded) return finish(QpStatus::unbounded, x, core.iterations);
  if (core.status != QpStatus::optimal) return finish(QpStatus::max_iter, x, core.iterations);

  assemble_multipliers(core);

  // Certify before reporting an optimum; anything that fails the KKT system
  // at the stated tolerance is returned as a best iterate instead.
  const KktReport kkt = check_kkt(problem, x, sol.eq_multipliers, sol.ineq_multipliers);
  Eigen::VectorXd grad = problem.H * x + problem.f;
  const double stat_scale = 1.0 + grad.lpNorm<Eigen::Infinity>() +
                            (problem.A_eq.rows() > 0
                                 ? (problem.A_eq.transpose() * sol.eq_multipliers)
                                       .lpNorm<Eigen::Infinity>()
                                 : 0.0) +
                            (mi > 0 ? (problem.G.transpose() * sol.ineq_multipliers)
                                          .lpNorm<Eigen::Infinity>()
                                    : 0.0);
  const double mu_scale =
      1.0 + (mi > 0 ? sol.ineq_multipliers.lpNorm<Eigen::Infinity>() : 0.0);
  // The equality residual floor left by rank truncation is not recoverable by
  // moving in the kept null space, so the primal certificate allows for it.
  const bool certified = kkt.stationarity <= opts_.kkt_tol * stat_scale &&
                         kkt.primal <= opts_.kkt_tol * bscale + 10.0 * eq_res0 &&
                         kkt.dual <= opts_.kkt_tol * mu_scale &&
                         kkt.complementarity <= opts_.kkt_tol * mu_scale * bscale;
  return finish(certified ? QpStatus::optimal : QpStatus::max_iter, x, core.iterations);
}

}  // namespace ddpc
