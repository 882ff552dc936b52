#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include "ddpc/trajectory.hpp"

namespace ddpc {

/// Minimal discrete-time state-space realization
///   x_{k+1} = A x_k + B u_k,   y_k = C x_k + D u_k
/// used as the ground-truth simulator. Construction enforces controllability,
/// observability and records the lag (smallest k such that the k-block
/// observability matrix has full rank).
struct LtiSystem {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
  Eigen::MatrixXd D;
  int m = 0;    ///< inputs
  int p = 0;    ///< outputs
  int n = 0;    ///< state dimension
  int lag = 0;  ///< observability index, 1 <= lag <= n <= p*lag

  static LtiSystem create(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C,
                          Eigen::MatrixXd D);
};

struct Equilibrium {
  Eigen::VectorXd w_s;  ///< stacked (u_s, y_s)
  Eigen::VectorXd x_s;
};

/// Simulates N steps from x0 under the input sequence u (m x N, one column
/// per step) and returns the input-output trajectory.
Trajectory simulate(const LtiSystem& sys, const Eigen::VectorXd& x0, const Eigen::MatrixXd& u);

/// Smallest k such that rank [C; CA; ...; CA^{k-1}] = n. Throws if (A, C) is
/// unobservable.
int compute_lag(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C);

/// Random Schur-stable, controllable and observable system. A is sampled with
/// entries uniform in (-1, 1) and rescaled so the spectral radius is uniform
/// in (0.3, 0.95); B, C entries are uniform in (-1, 1); D = 0. Resamples until
/// the structural checks pass (bounded retries), deterministic under seed.
LtiSystem random_system(int n, int m, int p, std::uint64_t seed);

/// Steady state under constant input: x_s = (I - A)^{-1} B u_s. Throws when
/// I - A is singular at the shared rank tolerance.
Equilibrium equilibrium_from_input(const LtiSystem& sys, const Eigen::VectorXd& u_s);

/// Least-squares initial state explaining the trajectory's outputs given its
/// inputs.
Eigen::VectorXd fit_initial_state(const LtiSystem& sys, const Trajectory& traj);

/// Max-abs deviation between the trajectory and its re-simulation from the
/// least-squares initial state; near zero iff the data is a trajectory of sys.
double trajectory_residual(const LtiSystem& sys, const Trajectory& traj);

}  // namespace ddpc
