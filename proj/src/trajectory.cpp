#include "ddpc/trajectory.hpp"

#include <sstream>

#include "ddpc/linalg.hpp"

namespace ddpc {

Trajectory::Trajectory(Eigen::MatrixXd data, int m, int p)
    : data_(std::move(data)), m_(m), p_(p) {
  if (m_ < 0 || p_ < 0 || m_ + p_ <= 0)
    throw Error::dimension("trajectory needs nonnegative block sizes with m + p > 0");
  if (data_.rows() != m_ + p_) {
    std::ostringstream msg;
    msg << "trajectory data has " << data_.rows() << " rows, expected m + p = " << m_ + p_;
    throw Error::dimension(msg.str());
  }
  if (data_.cols() < 1) throw Error::dimension("trajectory must contain at least one sample");
}

Trajectory Trajectory::window(int a, int b) const {
  if (a < 0 || a > b || b >= length()) {
    std::ostringstream msg;
    msg << "window [" << a << ", " << b << "] out of range for length " << length();
    throw Error::dimension(msg.str());
  }
  return Trajectory(data_.middleCols(a, b - a + 1), m_, p_);
}

Eigen::VectorXd Trajectory::stacked() const {
  return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(data_.data(), data_.size()));
}

HankelMatrix hankel(const Eigen::MatrixXd& signal, int depth) {
  const int dim = static_cast<int>(signal.rows());
  const int T = static_cast<int>(signal.cols());
  if (depth < 1) throw Error::dimension("Hankel depth must be positive");
  if (depth > T) {
    std::ostringstream msg;
    msg << "Hankel depth " << depth << " exceeds data length " << T;
    throw Error::dimension(msg.str());
  }
  HankelMatrix H;
  H.depth = depth;
  H.signal_dim = dim;
  H.data.resize(static_cast<Eigen::Index>(dim) * depth, T - depth + 1);
  for (int j = 0; j <= T - depth; ++j)
    for (int i = 0; i < depth; ++i) H.data.block(i * dim, j, dim, 1) = signal.col(j + i);
  return H;
}

HankelMatrix hankel(const Trajectory& traj, int depth) { return hankel(traj.data(), depth); }

bool is_persistently_exciting(const Eigen::MatrixXd& u, int order) {
  const int m = static_cast<int>(u.rows());
  const HankelMatrix H = hankel(u, order);
  return numerical_rank(H.data) == m * order;
}

bool behavior_rank_check(const Trajectory& traj, int L, int n) {
  const HankelMatrix H = hankel(traj, L);
  return numerical_rank(H.data) == traj.input_dim() * L + n;
}

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::ddpc: return "ddpc";
    case Scheme::sddpc: return "sddpc";
    case Scheme::svd_ddpc: return "svd";
    case Scheme::eddpc: return "eddpc";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& tag) {
  if (tag == "ddpc") return Scheme::ddpc;
  if (tag == "sddpc") return Scheme::sddpc;
  if (tag == "svd" || tag == "svd-ddpc") return Scheme::svd_ddpc;
  if (tag == "eddpc") return Scheme::eddpc;
  throw Error::parse("unknown scheme tag '" + tag + "' (expected ddpc|sddpc|svd|eddpc)");
}

int min_data_length(Scheme scheme, int m, int n, int lag, int L, int T_ini) {
  if (m < 1 || n < 1 || L < 1) throw Error::dimension("min_data_length needs positive m, n, L");
  switch (scheme) {
    case Scheme::ddpc:
    case Scheme::svd_ddpc:
      return (m + 1) * (L + 2 * n) - 1;
    case Scheme::sddpc:
      if (T_ini < 1) throw Error::dimension("segmented scheme needs a positive T_ini");
      return (m + 1) * (2 * T_ini + n) - 1;
    case Scheme::eddpc:
      if (lag < 1) throw Error::dimension("eddpc bound needs a positive lag");
      return (m + 1) * (lag + n + 1) - 1;
  }
  throw Error::dimension("unknown scheme");
}

const char* to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::parse: return "parse";
    case ErrorCategory::dimension: return "dimension";
    case ErrorCategory::excitation: return "excitation";
    case ErrorCategory::infeasible: return "infeasible";
    case ErrorCategory::solver: return "solver";
    case ErrorCategory::generation: return "generation";
  }
  return "?";
}

}  // namespace ddpc
