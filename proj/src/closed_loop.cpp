#include "ddpc/closed_loop.hpp"

#include <sstream>

#include "ddpc/rng.hpp"

namespace ddpc {

const char* to_string(LoopStatus s) {
  switch (s) {
    case LoopStatus::converged: return "converged";
    case LoopStatus::horizon_exhausted: return "horizon_exhausted";
    case LoopStatus::infeasible: return "infeasible";
  }
  return "?";
}

ClosedLoopLog run(const LtiSystem& sys, const Predictor& pred, const OcpSpec& spec,
                  const Eigen::MatrixXd& init_past, const RunOptions& opts) {
  const int q = sys.m + sys.p;
  const int n = spec.n;
  if (pred.m != sys.m || pred.p != sys.p)
    throw Error::dimension("predictor block sizes do not match the plant");
  if (init_past.rows() != q || init_past.cols() != n)
    throw Error::dimension("initial past must be q x n");

  // The initial window must be a plant trajectory; recover the hidden state
  // from it.
  Trajectory past_traj(init_past, sys.m, sys.p);
  if (trajectory_residual(sys, past_traj) > 1e-8 * (1.0 + init_past.cwiseAbs().maxCoeff()))
    throw Error::dimension("initial past is not a trajectory of the plant");
  Eigen::VectorXd x = fit_initial_state(sys, past_traj);
  for (int k = 0; k < n; ++k) x = sys.A * x + sys.B * init_past.col(k).head(sys.m);

  ClosedLoopLog log;
  Eigen::MatrixXd past = init_past;
  QpSolver solver(opts.solver);
  std::vector<ActiveConstraint> warm;

  int consecutive = 0;
  for (int k = n - 1; k >= 0; --k) {
    if ((init_past.col(k) - spec.w_s).norm() <= opts.conv_tol) ++consecutive;
    else break;
  }

  for (int t = 0; t < opts.max_steps; ++t) {
    const CondensedQp cqp = assemble(pred, spec, past);
    const QpSolution sol = solver.solve(cqp.qp, warm.empty() ? nullptr : &warm);
    if (sol.status == QpStatus::infeasible) {
      log.status = LoopStatus::infeasible;
      return log;  // empty step log when the first solve already fails
    }
    if (sol.status != QpStatus::optimal) {
      std::ostringstream msg;
      msg << "solver returned status " << to_string(sol.status) << " at step " << t
          << "; aborting rather than applying a non-certified input";
      throw Error::solver(msg.str());
    }
    warm = sol.active_set;

    StepRecord rec;
    rec.t = t;
    rec.predicted = recover_trajectory(cqp, sol.x);
    rec.u = rec.predicted.col(n).head(sys.m);
    rec.cost = sol.objective + cqp.cost_offset;
    rec.solver_status = sol.status;
    rec.solver_iterations = sol.iterations;
    rec.solve_time = sol.solve_time;

    // Apply to the plant, measure.
    Eigen::VectorXd w_t(q);
    w_t.head(sys.m) = rec.u;
    w_t.tail(sys.p) = sys.C * x + sys.D * rec.u;
    x = sys.A * x + sys.B * rec.u;
    rec.w = w_t;
    log.steps.push_back(std::move(rec));

    past.leftCols(n - 1) = past.rightCols(n - 1).eval();
    past.col(n - 1) = w_t;

    if ((w_t - spec.w_s).norm() <= opts.conv_tol) ++consecutive;
    else consecutive = 0;
    if (consecutive >= n) {
      log.status = LoopStatus::converged;
      return log;
    }
  }
  log.status = LoopStatus::horizon_exhausted;
  return log;
}

EquivalenceReport check_equivalence(const std::vector<const ClosedLoopLog*>& logs) {
  if (logs.size() < 2) throw Error::dimension("equivalence check needs at least two logs");
  EquivalenceReport rep;
  std::size_t common = logs[0]->steps.size();
  for (const auto* log : logs) {
    common = std::min(common, log->steps.size());
    if (log->steps.size() != logs[0]->steps.size()) rep.truncated = true;
  }
  rep.compared_steps = static_cast<int>(common);
  for (std::size_t a = 0; a < logs.size(); ++a) {
    for (std::size_t b = a + 1; b < logs.size(); ++b) {
      for (std::size_t t = 0; t < common; ++t) {
        const StepRecord& ra = logs[a]->steps[t];
        const StepRecord& rb = logs[b]->steps[t];
        if (ra.w.size() != rb.w.size()) throw Error::dimension("logs have mismatched sample sizes");
        rep.max_trajectory_deviation = std::max(
            rep.max_trajectory_deviation, (ra.w - rb.w).cwiseAbs().maxCoeff());
        const double denom = std::max({std::abs(ra.cost), std::abs(rb.cost), 1.0});
        rep.max_cost_deviation =
            std::max(rep.max_cost_deviation, std::abs(ra.cost - rb.cost) / denom);
      }
    }
  }
  return rep;
}

InitialPast sample_initial_past(const LtiSystem& sys, const Eigen::VectorXd& lb,
                                const Eigen::VectorXd& ub, std::uint64_t seed,
                                int max_retries) {
  const int q = sys.m + sys.p;
  if (lb.size() != q || ub.size() != q) throw Error::dimension("box must have dimension q");
  Rng rng(seed);
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    InitialPast out;
    out.x_start = rng.uniform_vector(sys.n, -1.0, 1.0);
    const Eigen::MatrixXd u = rng.uniform_matrix(sys.m, sys.n, -1.0, 1.0);
    const Trajectory traj = simulate(sys, out.x_start, u);
    bool inside = true;
    for (int k = 0; k < sys.n && inside; ++k) {
      const Eigen::VectorXd w = traj.sample(k);
      for (int i = 0; i < q; ++i)
        if (w(i) < lb(i) || w(i) > ub(i)) {
          inside = false;
          break;
        }
    }
    if (!inside) continue;
    out.w = traj.data();
    Eigen::VectorXd x = out.x_start;
    for (int k = 0; k < sys.n; ++k) x = sys.A * x + sys.B * u.col(k);
    out.x0 = x;
    return out;
  }
  throw Error::generation("failed to sample an in-box initial window within the retry budget");
}

}  // namespace ddpc
