#pragma once

#include <Eigen/Dense>

#include <vector>

#include "ddpc/trajectory.hpp"

namespace ddpc {

/// Orthonormal rows annihilating every depth-d window of the data: the left
/// kernel of the depth-d Hankel matrix. Row i holds the coefficient blocks
/// r_{i,j} in R^{1xq} for j = 0..d-1 of a difference equation the data obeys.
struct KernelRep {
  Eigen::MatrixXd rows;  ///< (p*d - n) x (q*d)
  int d = 0;
  int m = 0;
  int p = 0;
  int n = 0;

  int q() const { return m + p; }
  int row_count() const { return static_cast<int>(rows.rows()); }
  Eigen::RowVectorXd coefficient_block(int i, int j) const { return rows.block(i, j * q(), 1, q()); }
};

/// Computes the left kernel of the depth-d Hankel matrix of the data.
/// Requires d >= lag + 1 and numerical rank of the Hankel matrix equal to
/// m*d + n; anything else means the data is not exciting enough (or the
/// assumed structure indices are wrong) and raises an excitation error.
KernelRep extract_kernel(const Trajectory& traj, int d, int n, int lag);

struct RowSelection {
  std::vector<int> indices;          ///< p kernel rows used for the shifted band
  double band_condition = 0.0;       ///< condition number of the resulting band
  bool within_bound = false;         ///< condition bound met
  long combinations_examined = 0;
};

struct SelectRowsOptions {
  double kappa_max = 1e8;
  long max_combinations = 100000;  ///< search budget; best-so-far kept on exhaustion
};

/// Picks p kernel rows whose shifted band (for window L_target) is
/// well-conditioned. Searches index combinations in lexicographic order,
/// stopping at the first one whose band condition number is at most
/// kappa_max; when the budget runs out, the best combination seen is
/// returned with within_bound = false.
RowSelection select_band_rows(const KernelRep& kernel, int L_target,
                              const SelectRowsOptions& opts = {});

/// Banded stack of kernel rows: the first block-row holds all of them, each
/// of the (L_target - d) following block-rows holds the selected p rows
/// shifted right by one more block of q columns.
struct KernelBand {
  Eigen::MatrixXd data;  ///< ((p*d - n) + p*(L_target - d)) x (q * L_target)
  int d = 0;
  int L_target = 0;
  int m = 0;
  int p = 0;
  int n = 0;
  std::vector<int> shifted_rows;
};

KernelBand build_kernel_band(const KernelRep& kernel, const std::vector<int>& selected,
                             int L_target);

/// Full-column-rank matrix whose image is the set of stacked length-`window`
/// trajectories of the underlying system.
struct BehaviorBasis {
  Eigen::MatrixXd basis;  ///< q*window x (m*window + n), orthonormal columns
  int window = 0;
  int m = 0;
  int p = 0;
  int n = 0;
};

/// Orthonormal basis of ker(band). Verifies that the nullity equals
/// m*L_target + n and raises a solver error otherwise (a degenerate band
/// signals an invalid kernel, e.g. wrong n or severe ill-conditioning).
BehaviorBasis null_space_predictor(const KernelBand& band);

struct PreprocessOptions {
  double kappa_max = 1e8;
  long max_combinations = 100000;
};

/// Offline pipeline: kernel extraction at depth lag + 1, row selection,
/// banded assembly with L + n - d shifts, null-space computation. The result
/// spans the length-(L + n) behavior.
BehaviorBasis preprocess(const Trajectory& traj, int n, int lag, int L,
                         const PreprocessOptions& opts = {});

}  // namespace ddpc
