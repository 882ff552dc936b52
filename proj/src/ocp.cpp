#include "ddpc/ocp.hpp"

#include <Eigen/Eigenvalues>

#include <sstream>

namespace ddpc {

void OcpSpec::validate(int q) const {
  if (L < 1 || n < 1) throw Error::dimension("spec needs L, n >= 1");
  if (n > L)
    throw Error::dimension("initialization depth n must not exceed the horizon L");
  if (W.rows() != q || W.cols() != q) throw Error::dimension("W must be q x q");
  const double w_scale = W.cwiseAbs().maxCoeff();
  if ((W - W.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, w_scale))
    throw Error::dimension("W must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W);
  if (es.eigenvalues().minCoeff() <= 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff()))
    throw Error::dimension("W must be positive definite");
  if (w_s.size() != q || lb.size() != q || ub.size() != q)
    throw Error::dimension("w_s and box must have dimension q");
  for (int i = 0; i < q; ++i)
    if (!(lb(i) < w_s(i) && w_s(i) < ub(i)))
      throw Error::dimension("set point must lie strictly inside the box");
}

OcpSpec OcpSpec::regulation(int L, int n, int m, int p, double box) {
  OcpSpec spec;
  spec.L = L;
  spec.n = n;
  spec.W = Eigen::MatrixXd::Identity(m + p, m + p);
  spec.w_s = Eigen::VectorXd::Zero(m + p);
  spec.lb = Eigen::VectorXd::Constant(m + p, -box);
  spec.ub = Eigen::VectorXd::Constant(m + p, box);
  return spec;
}

double CondensedQp::stage_cost(const Eigen::VectorXd& regressor) const {
  if (regressor.size() != qp.nv()) throw Error::dimension("regressor has wrong dimension");
  return 0.5 * regressor.dot(qp.H * regressor) + qp.f.dot(regressor) + cost_offset;
}

CondensedQp assemble(const Predictor& pred, const OcpSpec& spec, const Eigen::MatrixXd& past) {
  const int q = pred.q();
  spec.validate(q);
  const int L = spec.L;
  const int n = spec.n;
  if (pred.L != L || pred.n != n || pred.prediction_length != L + n)
    throw Error::dimension("predictor window does not match the problem spec");
  if (past.rows() != q || past.cols() != n) {
    std::ostringstream msg;
    msg << "past window must be q x n = " << q << " x " << n << ", got " << past.rows() << " x "
        << past.cols();
    throw Error::dimension(msg.str());
  }

  const PredictionMap pm = prediction_map(pred);
  const Eigen::Index nv = pm.map.cols();
  const Eigen::MatrixXd M_fut = pm.map.middleRows(static_cast<Eigen::Index>(q) * n,
                                                  static_cast<Eigen::Index>(q) * L);

  // Blockwise (I_L kron W) * M_fut.
  Eigen::MatrixXd WM(M_fut.rows(), nv);
  for (int k = 0; k < L; ++k)
    WM.middleRows(static_cast<Eigen::Index>(q) * k, q) =
        spec.W * M_fut.middleRows(static_cast<Eigen::Index>(q) * k, q);

  CondensedQp out;
  out.L = L;
  out.n = n;
  out.q = q;
  out.recovery = pm.map;

  out.qp.H = 2.0 * M_fut.transpose() * WM;
  out.qp.H = 0.5 * (out.qp.H + out.qp.H.transpose());
  const Eigen::VectorXd Wws = spec.W * spec.w_s;
  out.qp.f = Eigen::VectorXd::Zero(nv);
  for (int k = 0; k < L; ++k)
    out.qp.f -= 2.0 * M_fut.middleRows(static_cast<Eigen::Index>(q) * k, q).transpose() * Wws;
  out.cost_offset = L * spec.w_s.dot(Wws);

  const Eigen::Index init_rows = static_cast<Eigen::Index>(q) * n;
  out.qp.A_eq.resize(2 * init_rows + pm.stitch.rows(), nv);
  out.qp.b_eq.resize(out.qp.A_eq.rows());
  out.qp.A_eq.topRows(init_rows) = pm.map.topRows(init_rows);
  out.qp.A_eq.middleRows(init_rows, init_rows) =
      pm.map.middleRows(static_cast<Eigen::Index>(q) * L, init_rows);
  for (int k = 0; k < n; ++k) {
    out.qp.b_eq.segment(static_cast<Eigen::Index>(q) * k, q) = past.col(k);
    out.qp.b_eq.segment(init_rows + static_cast<Eigen::Index>(q) * k, q) = spec.w_s;
  }
  if (pm.stitch.rows() > 0) {
    out.qp.A_eq.bottomRows(pm.stitch.rows()) = pm.stitch;
    out.qp.b_eq.tail(pm.stitch.rows()).setZero();
  }

  out.qp.G = M_fut;
  out.qp.lb = spec.lb.replicate(L, 1);
  out.qp.ub = spec.ub.replicate(L, 1);
  return out;
}

Eigen::MatrixXd recover_trajectory(const CondensedQp& cqp, const Eigen::VectorXd& regressor) {
  if (regressor.size() != cqp.recovery.cols())
    throw Error::dimension("regressor has wrong dimension");
  const Eigen::VectorXd stack = cqp.recovery * regressor;
  return Eigen::Map<const Eigen::MatrixXd>(stack.data(), cqp.q, cqp.L + cqp.n);
}

double direct_stage_cost(const OcpSpec& spec, const Eigen::MatrixXd& window) {
  if (window.rows() != spec.w_s.size() || window.cols() != spec.L + spec.n)
    throw Error::dimension("window must be q x (L+n)");
  double cost = 0.0;
  for (int k = 0; k < spec.L; ++k) {
    const Eigen::VectorXd dev = window.col(spec.n + k) - spec.w_s;
    cost += dev.dot(spec.W * dev);
  }
  return cost;
}

}  // namespace ddpc
