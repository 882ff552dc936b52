#pragma once

#include <Eigen/Dense>

#include <vector>

namespace ddpc {

/// Dense convex quadratic program
///   min 0.5 x'Hx + f'x   s.t.   A_eq x = b_eq,   lb <= Gx <= ub
/// with H symmetric positive semidefinite. Either constraint block may be
/// empty (zero rows).
struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd f;
  Eigen::MatrixXd A_eq;
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd G;
  Eigen::VectorXd lb;
  Eigen::VectorXd ub;

  int nv() const { return static_cast<int>(H.rows()); }
  void validate() const;
};

enum class QpStatus { optimal, infeasible, max_iter, unbounded };
const char* to_string(QpStatus s);

struct ActiveConstraint {
  int row = 0;
  int side = 0;  ///< -1: at lower bound, +1: at upper bound
  bool operator==(const ActiveConstraint&) const = default;
};

struct QpSolution {
  Eigen::VectorXd x;
  double objective = 0.0;
  QpStatus status = QpStatus::max_iter;
  std::vector<ActiveConstraint> active_set;
  int iterations = 0;
  double solve_time = 0.0;  ///< seconds, wall clock around the solve
  Eigen::VectorXd eq_multipliers;
  Eigen::VectorXd ineq_multipliers;  ///< signed: >= 0 at upper bounds, <= 0 at lower
};

/// Absolute KKT residuals of a candidate point with signed inequality
/// multipliers (stationarity uses Hx + f + A_eq' nu + G' mu).
struct KktReport {
  double stationarity = 0.0;
  double primal = 0.0;
  double dual = 0.0;
  double complementarity = 0.0;
  double max_residual() const;
};

KktReport check_kkt(const QpProblem& problem, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& eq_multipliers,
                    const Eigen::VectorXd& ineq_multipliers);

/// Primal active-set solver. Equalities are eliminated through a null-space
/// parameterization; the reduced Hessian may be singular (minimum-norm inner
/// solves), so flat directions of semidefinite problems are handled without
/// regularizing the reported objective. A solver instance owns scratch state
/// and must not be shared across threads; distinct instances may run
/// concurrently.
class QpSolver {
 public:
  struct Options {
    double kkt_tol = 1e-8;
    double feas_tol = 1e-9;
    int max_iter_factor = 50;  ///< max iterations = factor * (nv + inequality rows)
  };

  QpSolver() = default;
  explicit QpSolver(const Options& opts) : opts_(opts) {}

  /// Warm start carries an active set (not a primal point) between solves;
  /// re-solving an unchanged problem with its optimal active set certifies
  /// in one iteration.
  QpSolution solve(const QpProblem& problem,
                   const std::vector<ActiveConstraint>* warm_start = nullptr);

  const Options& options() const { return opts_; }

 private:
  Options opts_;
};

}  // namespace ddpc
