#pragma once

#include <Eigen/Dense>

#include "ddpc/kernel.hpp"

namespace ddpc {

/// Uniform predictor abstraction over the four schemes. For ddpc, svd and
/// eddpc the image of `matrix` spans the stacked length-(L+n) trajectories.
/// The segmented scheme instead carries one shared depth-2*T_ini Hankel block
/// per segment; consecutive segments overlap by T_ini and are tied together
/// by stitching equalities in the optimal control problem.
struct Predictor {
  Scheme tag = Scheme::ddpc;
  Eigen::MatrixXd matrix;   ///< q*(L+n) x regressor_dim (unused for sddpc)
  Eigen::MatrixXd segment;  ///< sddpc only: the shared segment Hankel block
  int regressor_dim = 0;
  int prediction_length = 0;  ///< L + n
  int L = 0;
  int m = 0;
  int p = 0;
  int n = 0;
  int T_ini = 0;  ///< sddpc only
  int n_s = 0;    ///< sddpc only: number of segments, L / T_ini

  int q() const { return m + p; }
};

/// Raw Hankel predictor. Requires input persistently exciting of order L+2n.
Predictor build_ddpc_predictor(const Trajectory& traj, int L, int n);

/// U1*S1 from the SVD of the depth-(L+n) Hankel matrix; same data requirement
/// as the raw scheme but only m*(L+n)+n columns.
Predictor build_svd_predictor(const Trajectory& traj, int L, int n);

/// Bank of L/T_ini identical depth-2*T_ini Hankel predictors. Requires
/// T_ini >= lag, L divisible by T_ini and input excitation of order
/// 2*T_ini + n.
Predictor build_segmented_predictor(const Trajectory& traj, int L, int T_ini, int n, int lag);

/// Null-space predictor from the offline preprocessing pipeline; needs only
/// excitation of order lag + 1 + n.
Predictor build_eddpc_predictor(const Trajectory& traj, int L, int n, int lag,
                                const PreprocessOptions& opts = {});

/// Linear description of the predicted stack: map sends the regressor to the
/// stacked window w_[-n, L-1]; rows of `stitch` must vanish (segment overlap
/// equalities; empty for the single-matrix schemes).
struct PredictionMap {
  Eigen::MatrixXd map;     ///< q*(L+n) x regressor_dim
  Eigen::MatrixXd stitch;  ///< k x regressor_dim, k = (n_s - 1)*q*T_ini for sddpc
};

PredictionMap prediction_map(const Predictor& pred);

/// Orthonormal basis of the set of predicted stacks (stitching accounted
/// for); all schemes built from adequate data of the same system agree.
Eigen::MatrixXd effective_span(const Predictor& pred);

}  // namespace ddpc
