#include "ddpc/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>

namespace ddpc {

double rank_tolerance(Eigen::Index rows, Eigen::Index cols, double sigma_max) {
  return static_cast<double>(std::max(rows, cols)) * sigma_max * 1e-10;
}

// All decompositions here use JacobiSVD: BDCSVD in Eigen 3.4.0 returns
// inconsistently paired factors for some rank-deficient inputs.
namespace {

int rank_of(const Eigen::VectorXd& sigma, Eigen::Index rows, Eigen::Index cols) {
  if (sigma.size() == 0) return 0;
  const double tol = rank_tolerance(rows, cols, sigma(0));
  int r = 0;
  while (r < sigma.size() && sigma(r) > tol) ++r;
  return r;
}

}  // namespace

int numerical_rank(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  return rank_of(svd.singularValues(), M.rows(), M.cols());
}

Eigen::MatrixXd null_space(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return Eigen::MatrixXd::Identity(M.cols(), M.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const int r = rank_of(svd.singularValues(), M.rows(), M.cols());
  return svd.matrixV().rightCols(M.cols() - r);
}

Eigen::MatrixXd left_null_space(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return Eigen::MatrixXd::Identity(M.rows(), M.rows());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU);
  const int r = rank_of(svd.singularValues(), M.rows(), M.cols());
  return svd.matrixU().rightCols(M.rows() - r).transpose();
}

Eigen::MatrixXd orthonormal_image(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return Eigen::MatrixXd::Zero(M.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU);
  const int r = rank_of(svd.singularValues(), M.rows(), M.cols());
  return svd.matrixU().leftCols(r);
}

double condition_number(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const Eigen::VectorXd& s = svd.singularValues();
  const double smallest = s(s.size() - 1);
  if (smallest <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smallest;
}

double projection_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const Eigen::MatrixXd U = orthonormal_image(B);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    const double norm = A.col(j).norm();
    if (norm == 0.0) continue;
    if (U.cols() == 0) return 1.0;
    const Eigen::VectorXd res = A.col(j) - U * (U.transpose() * A.col(j));
    worst = std::max(worst, res.norm() / norm);
  }
  return worst;
}

double max_principal_angle_sin(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const Eigen::MatrixXd Ua = orthonormal_image(A);
  const Eigen::MatrixXd Ub = orthonormal_image(B);
  if (Ua.cols() == 0 && Ub.cols() == 0) return 0.0;
  if (Ua.cols() == 0 || Ub.cols() == 0) return 1.0;
  const Eigen::MatrixXd ra = Ub - Ua * (Ua.transpose() * Ub);
  const Eigen::MatrixXd rb = Ua - Ub * (Ub.transpose() * Ua);
  const double sa = Eigen::JacobiSVD<Eigen::MatrixXd>(ra).singularValues()(0);
  const double sb = Eigen::JacobiSVD<Eigen::MatrixXd>(rb).singularValues()(0);
  return std::min(1.0, std::max(sa, sb));
}

double spectral_radius(const Eigen::MatrixXd& A) {
  if (A.size() == 0) return 0.0;
  return A.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace ddpc
