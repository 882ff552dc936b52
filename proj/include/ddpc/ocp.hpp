#pragma once

#include <Eigen/Dense>

#include "ddpc/predictors.hpp"
#include "ddpc/qp_solver.hpp"

namespace ddpc {

/// Finite-horizon optimal control problem data: quadratic stage cost
/// sum_{k=0}^{L-1} ||w_k - w_s||_W^2 over the predicted window, an
/// initialization window of n past samples, a terminal window of n samples
/// pinned to the set point, and a per-coordinate box on the L future samples.
struct OcpSpec {
  int L = 0;
  int n = 0;
  Eigen::MatrixXd W;    ///< q x q, symmetric positive definite
  Eigen::VectorXd w_s;  ///< set point, strictly inside the box
  Eigen::VectorXd lb;
  Eigen::VectorXd ub;

  void validate(int q) const;

  /// Benchmark-style spec: identity weight, origin set point, symmetric box.
  static OcpSpec regulation(int L, int n, int m, int p, double box);
};

/// The optimal control problem condensed onto the regressor: the predicted
/// stack is recovery * regressor, the objective equals the exact stage-cost
/// sum through 0.5 z'Hz + f'z + cost_offset.
struct CondensedQp {
  QpProblem qp;
  Eigen::MatrixXd recovery;  ///< q*(L+n) x nv
  double cost_offset = 0.0;
  int L = 0;
  int n = 0;
  int q = 0;

  double stage_cost(const Eigen::VectorXd& regressor) const;
};

/// Builds the condensed program for the given predictor and measured past
/// window (q x n, oldest sample first). Equality rows pin the first n and the
/// last n predicted blocks (plus segment stitching for the segmented scheme);
/// the box applies to blocks 0..L-1 only.
CondensedQp assemble(const Predictor& pred, const OcpSpec& spec, const Eigen::MatrixXd& past);

/// Undoes the condensing map: the predicted window as a q x (L+n) matrix,
/// columns -n..L-1.
Eigen::MatrixXd recover_trajectory(const CondensedQp& cqp, const Eigen::VectorXd& regressor);

/// Stage-cost sum evaluated directly on a predicted window (q x (L+n)).
double direct_stage_cost(const OcpSpec& spec, const Eigen::MatrixXd& window);

}  // namespace ddpc
