#pragma once

#include <Eigen/Dense>

namespace ddpc {

/// Shared numerical-rank rule: a singular value counts as nonzero iff it
/// exceeds max(rows, cols) * sigma_max * 1e-10.
double rank_tolerance(Eigen::Index rows, Eigen::Index cols, double sigma_max);

int numerical_rank(const Eigen::MatrixXd& M);

/// Orthonormal basis of ker(M), as columns (n x nullity).
Eigen::MatrixXd null_space(const Eigen::MatrixXd& M);

/// Orthonormal basis of the left kernel of M, as rows ((rows - rank) x rows).
Eigen::MatrixXd left_null_space(const Eigen::MatrixXd& M);

/// Orthonormal basis of im(M), as columns.
Eigen::MatrixXd orthonormal_image(const Eigen::MatrixXd& M);

/// sigma_max / sigma_min over all min(rows, cols) singular values; infinity
/// when the matrix is exactly rank deficient.
double condition_number(const Eigen::MatrixXd& M);

/// Largest relative residual of projecting the columns of A onto im(B).
/// Zero columns of A contribute nothing; an empty B gives 1 for nonzero A.
double projection_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

/// Sine of the largest principal angle between im(A) and im(B).
double max_principal_angle_sin(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

double spectral_radius(const Eigen::MatrixXd& A);

}  // namespace ddpc
