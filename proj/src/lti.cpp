#include "ddpc/lti.hpp"

#include <sstream>
#include <vector>

#include "ddpc/linalg.hpp"
#include "ddpc/rng.hpp"

namespace ddpc {

namespace {

Eigen::MatrixXd controllability_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  Eigen::MatrixXd ctrb(n, static_cast<Eigen::Index>(n) * m);
  Eigen::MatrixXd block = B;
  for (int k = 0; k < n; ++k) {
    ctrb.middleCols(static_cast<Eigen::Index>(k) * m, m) = block;
    block = A * block;
  }
  return ctrb;
}

Eigen::MatrixXd observability_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C,
                                     int blocks) {
  const int n = static_cast<int>(A.cols());
  const int p = static_cast<int>(C.rows());
  Eigen::MatrixXd obsv(static_cast<Eigen::Index>(blocks) * p, n);
  Eigen::MatrixXd block = C;
  for (int k = 0; k < blocks; ++k) {
    obsv.middleRows(static_cast<Eigen::Index>(k) * p, p) = block;
    block = block * A;
  }
  return obsv;
}

}  // namespace

LtiSystem LtiSystem::create(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C,
                            Eigen::MatrixXd D) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  const int p = static_cast<int>(C.rows());
  if (n < 1 || A.cols() != n) throw Error::dimension("A must be square and nonempty");
  if (m < 1 || B.rows() != n) throw Error::dimension("B must be n x m with m >= 1");
  if (p < 1 || C.cols() != n) throw Error::dimension("C must be p x n with p >= 1");
  if (D.rows() != p || D.cols() != m) throw Error::dimension("D must be p x m");

  if (numerical_rank(controllability_matrix(A, B)) != n)
    throw Error::dimension("(A, B) is not controllable");
  const int lag = compute_lag(A, C);  // throws when unobservable

  LtiSystem sys;
  sys.A = std::move(A);
  sys.B = std::move(B);
  sys.C = std::move(C);
  sys.D = std::move(D);
  sys.m = m;
  sys.p = p;
  sys.n = n;
  sys.lag = lag;
  return sys;
}

Trajectory simulate(const LtiSystem& sys, const Eigen::VectorXd& x0, const Eigen::MatrixXd& u) {
  if (x0.size() != sys.n) throw Error::dimension("initial state has wrong dimension");
  if (u.rows() != sys.m) throw Error::dimension("input sequence has wrong row dimension");
  const int N = static_cast<int>(u.cols());
  if (N < 1) throw Error::dimension("input sequence must have at least one sample");

  Eigen::MatrixXd w(sys.m + sys.p, N);
  Eigen::VectorXd x = x0;
  for (int k = 0; k < N; ++k) {
    w.col(k).head(sys.m) = u.col(k);
    w.col(k).tail(sys.p) = sys.C * x + sys.D * u.col(k);
    x = sys.A * x + sys.B * u.col(k);
  }
  return Trajectory(std::move(w), sys.m, sys.p);
}

int compute_lag(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C) {
  const int n = static_cast<int>(A.rows());
  for (int k = 1; k <= n; ++k) {
    if (numerical_rank(observability_matrix(A, C, k)) == n) return k;
  }
  throw Error::dimension("(A, C) is not observable");
}

LtiSystem random_system(int n, int m, int p, std::uint64_t seed) {
  if (n < 1 || m < 1 || p < 1) throw Error::dimension("random_system needs n, m, p >= 1");
  Rng rng(seed);
  constexpr int kMaxRetries = 100;
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    Eigen::MatrixXd A = rng.uniform_matrix(n, n, -1.0, 1.0);
    const double rho = spectral_radius(A);
    const double target = rng.uniform(0.3, 0.95);
    if (rho < 1e-12) continue;
    A *= target / rho;
    Eigen::MatrixXd B = rng.uniform_matrix(n, m, -1.0, 1.0);
    Eigen::MatrixXd C = rng.uniform_matrix(p, n, -1.0, 1.0);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(p, m);
    try {
      return LtiSystem::create(std::move(A), std::move(B), std::move(C), std::move(D));
    } catch (const Error&) {
      continue;  // structural check failed; resample
    }
  }
  std::ostringstream msg;
  msg << "failed to generate a controllable/observable system of order " << n << " after "
      << kMaxRetries << " attempts";
  throw Error::generation(msg.str());
}

Equilibrium equilibrium_from_input(const LtiSystem& sys, const Eigen::VectorXd& u_s) {
  if (u_s.size() != sys.m) throw Error::dimension("equilibrium input has wrong dimension");
  const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(sys.n, sys.n) - sys.A;
  if (numerical_rank(M) != sys.n)
    throw Error::dimension("I - A is singular: no unique equilibrium for this input");
  Equilibrium eq;
  eq.x_s = M.colPivHouseholderQr().solve(sys.B * u_s);
  eq.w_s.resize(sys.m + sys.p);
  eq.w_s.head(sys.m) = u_s;
  eq.w_s.tail(sys.p) = sys.C * eq.x_s + sys.D * u_s;
  return eq;
}

Eigen::VectorXd fit_initial_state(const LtiSystem& sys, const Trajectory& traj) {
  if (traj.input_dim() != sys.m || traj.output_dim() != sys.p)
    throw Error::dimension("trajectory block sizes do not match the system");
  const int N = traj.length();
  const Eigen::MatrixXd obsv = observability_matrix(sys.A, sys.C, N);

  // Forced response: y_k -= sum_{j<k} C A^{k-1-j} B u_j + D u_k.
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(N) * sys.p);
  const Eigen::MatrixXd u = traj.inputs();
  const Eigen::MatrixXd y = traj.outputs();
  std::vector<Eigen::MatrixXd> markov;  // markov[j] = C A^j B
  markov.reserve(N > 0 ? N - 1 : 0);
  Eigen::MatrixXd Aj = Eigen::MatrixXd::Identity(sys.n, sys.n);
  for (int j = 0; j + 1 < N; ++j) {
    markov.push_back(sys.C * Aj * sys.B);
    Aj = Aj * sys.A;
  }
  for (int k = 0; k < N; ++k) {
    Eigen::VectorXd forced = sys.D * u.col(k);
    for (int j = 0; j < k; ++j) forced += markov[k - 1 - j] * u.col(j);
    rhs.segment(static_cast<Eigen::Index>(k) * sys.p, sys.p) = y.col(k) - forced;
  }
  return obsv.completeOrthogonalDecomposition().solve(rhs);
}

double trajectory_residual(const LtiSystem& sys, const Trajectory& traj) {
  const Eigen::VectorXd x0 = fit_initial_state(sys, traj);
  const Trajectory resim = simulate(sys, x0, traj.inputs());
  return (resim.data() - traj.data()).cwiseAbs().maxCoeff();
}

}  // namespace ddpc
