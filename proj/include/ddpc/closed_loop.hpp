#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "ddpc/lti.hpp"
#include "ddpc/ocp.hpp"

namespace ddpc {

struct StepRecord {
  int t = 0;
  Eigen::VectorXd w;          ///< measured sample after applying the input
  Eigen::VectorXd u;          ///< applied input; equals the first predicted input block
  Eigen::MatrixXd predicted;  ///< q x (L+n) optimal predicted window
  double cost = 0.0;          ///< optimal stage-cost value
  QpStatus solver_status = QpStatus::optimal;
  int solver_iterations = 0;
  double solve_time = 0.0;
};

enum class LoopStatus { converged, horizon_exhausted, infeasible };
const char* to_string(LoopStatus s);

struct ClosedLoopLog {
  std::vector<StepRecord> steps;
  LoopStatus status = LoopStatus::horizon_exhausted;
};

struct RunOptions {
  int max_steps = 30;
  double conv_tol = 1e-4;  ///< stop after n consecutive samples this close to w_s
  QpSolver::Options solver;
};

/// Receding-horizon loop: at each step assemble the condensed program from
/// the current past window, solve it (warm-started with the previous active
/// set), apply the first predicted input to the plant, measure, shift.
/// The initial past must be a trajectory of the plant (oracle-verified); an
/// infeasible first solve returns an empty log with status infeasible.
ClosedLoopLog run(const LtiSystem& sys, const Predictor& pred, const OcpSpec& spec,
                  const Eigen::MatrixXd& init_past, const RunOptions& opts = {});

struct EquivalenceReport {
  double max_trajectory_deviation = 0.0;
  double max_cost_deviation = 0.0;  ///< relative, denominator max(|a|, |b|, 1)
  int compared_steps = 0;
  bool truncated = false;  ///< logs had different lengths; common prefix compared
};

/// Pairwise closed-loop deviation across runs of the same plant and spec.
EquivalenceReport check_equivalence(const std::vector<const ClosedLoopLog*>& logs);

struct InitialPast {
  Eigen::MatrixXd w;        ///< q x n window w_[-n,-1]
  Eigen::VectorXd x_start;  ///< hidden state at t = -n (kept for reproducibility)
  Eigen::VectorXd x0;       ///< hidden state at t = 0
};

/// Draws x_{-n} and n inputs uniformly from (-1, 1), simulates the past
/// window and resamples (bounded retries) until every sample lies inside the
/// box.
InitialPast sample_initial_past(const LtiSystem& sys, const Eigen::VectorXd& lb,
                                const Eigen::VectorXd& ub, std::uint64_t seed,
                                int max_retries = 100);

}  // namespace ddpc
