#pragma once

#include <Eigen/Dense>

#include <string>

#include "ddpc/errors.hpp"

namespace ddpc {

/// Finite input-output time series. Sample t is the stacked vector
/// w_t = (u_t, y_t): the first m rows of the data matrix hold the inputs,
/// the last p rows the outputs, one column per time step.
class Trajectory {
 public:
  Trajectory(Eigen::MatrixXd data, int m, int p);

  int length() const { return static_cast<int>(data_.cols()); }
  int q() const { return static_cast<int>(data_.rows()); }
  int input_dim() const { return m_; }
  int output_dim() const { return p_; }

  const Eigen::MatrixXd& data() const { return data_; }
  Eigen::MatrixXd inputs() const { return data_.topRows(m_); }
  Eigen::MatrixXd outputs() const { return data_.bottomRows(p_); }
  Eigen::VectorXd sample(int t) const { return data_.col(t); }

  /// Window w_[a,b], inclusive on both ends.
  Trajectory window(int a, int b) const;

  /// Samples stacked into a single column of length q*T.
  Eigen::VectorXd stacked() const;

 private:
  Eigen::MatrixXd data_;
  int m_;
  int p_;
};

/// Block-Hankel matrix: column j holds the length-`depth` window starting at
/// time j, stacked. Works for any multivariate signal, including input-only
/// sequences.
struct HankelMatrix {
  int depth = 0;
  int signal_dim = 0;
  Eigen::MatrixXd data;  ///< (signal_dim * depth) x (T - depth + 1)
};

HankelMatrix hankel(const Eigen::MatrixXd& signal, int depth);
HankelMatrix hankel(const Trajectory& traj, int depth);

/// Persistence of excitation of the given order: the order-deep Hankel matrix
/// of the input has full row rank.
bool is_persistently_exciting(const Eigen::MatrixXd& u, int order);

/// True iff the depth-L Hankel matrix of the trajectory has numerical rank
/// m*L + n, the rank a length-L window of an order-n system attains under
/// sufficient excitation.
bool behavior_rank_check(const Trajectory& traj, int L, int n);

enum class Scheme { ddpc, sddpc, svd_ddpc, eddpc };

const char* to_string(Scheme s);
Scheme scheme_from_string(const std::string& tag);

/// Minimum offline data length required by each scheme for prediction
/// horizon L on an order-n system with m inputs and lag `lag`.
/// T_ini is only consulted for the segmented scheme.
int min_data_length(Scheme scheme, int m, int n, int lag, int L, int T_ini = 0);

}  // namespace ddpc
