#include "ddpc/predictors.hpp"

#include <sstream>

#include "ddpc/linalg.hpp"

namespace ddpc {

namespace {

void require_excitation(const Trajectory& traj, int order, const char* scheme) {
  const int T = traj.length();
  if (T < order || !is_persistently_exciting(traj.inputs(), order)) {
    std::ostringstream msg;
    msg << scheme << " needs input data persistently exciting of order " << order
        << " (data length " << T << ")";
    throw Error::excitation(msg.str());
  }
}

}  // namespace

Predictor build_ddpc_predictor(const Trajectory& traj, int L, int n) {
  if (L < 1 || n < 1) throw Error::dimension("predictor needs L, n >= 1");
  const HankelMatrix H = hankel(traj, L + n);  // window error when T < L + n
  require_excitation(traj, L + 2 * n, "ddpc");

  Predictor pred;
  pred.tag = Scheme::ddpc;
  pred.matrix = H.data;
  pred.regressor_dim = traj.length() - L - n + 1;
  pred.prediction_length = L + n;
  pred.L = L;
  pred.m = traj.input_dim();
  pred.p = traj.output_dim();
  pred.n = n;
  return pred;
}

Predictor build_svd_predictor(const Trajectory& traj, int L, int n) {
  if (L < 1 || n < 1) throw Error::dimension("predictor needs L, n >= 1");
  const int m = traj.input_dim();
  const HankelMatrix H = hankel(traj, L + n);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(H.data, Eigen::ComputeThinU);
  const Eigen::VectorXd& s = svd.singularValues();
  const double tol = rank_tolerance(H.data.rows(), H.data.cols(), s.size() ? s(0) : 0.0);
  int rank = 0;
  while (rank < s.size() && s(rank) > tol) ++rank;

  const int expected = m * (L + n) + n;
  if (rank != expected) {
    std::ostringstream msg;
    msg << "depth-" << L + n << " Hankel matrix has rank " << rank << ", expected m*(L+n) + n = "
        << expected << "; data does not span the length-" << L + n << " behavior";
    throw Error::excitation(msg.str());
  }
  require_excitation(traj, L + 2 * n, "svd");

  Predictor pred;
  pred.tag = Scheme::svd_ddpc;
  pred.matrix = svd.matrixU().leftCols(rank) * s.head(rank).asDiagonal();
  pred.regressor_dim = expected;
  pred.prediction_length = L + n;
  pred.L = L;
  pred.m = m;
  pred.p = traj.output_dim();
  pred.n = n;
  return pred;
}

Predictor build_segmented_predictor(const Trajectory& traj, int L, int T_ini, int n, int lag) {
  if (L < 1 || n < 1) throw Error::dimension("predictor needs L, n >= 1");
  if (T_ini < lag) {
    std::ostringstream msg;
    msg << "segment length T_ini = " << T_ini << " must be at least the lag " << lag;
    throw Error::dimension(msg.str());
  }
  if (L % T_ini != 0) {
    std::ostringstream msg;
    msg << "prediction horizon " << L << " is not divisible by the segment length " << T_ini;
    throw Error::dimension(msg.str());
  }
  const HankelMatrix H = hankel(traj, 2 * T_ini);
  require_excitation(traj, 2 * T_ini + n, "sddpc");

  Predictor pred;
  pred.tag = Scheme::sddpc;
  pred.segment = H.data;
  pred.T_ini = T_ini;
  pred.n_s = L / T_ini;
  pred.regressor_dim = pred.n_s * (traj.length() - 2 * T_ini + 1);
  pred.prediction_length = L + n;
  pred.L = L;
  pred.m = traj.input_dim();
  pred.p = traj.output_dim();
  pred.n = n;
  return pred;
}

Predictor build_eddpc_predictor(const Trajectory& traj, int L, int n, int lag,
                                const PreprocessOptions& opts) {
  if (L < 1 || n < 1) throw Error::dimension("predictor needs L, n >= 1");
  const BehaviorBasis basis = preprocess(traj, n, lag, L, opts);

  Predictor pred;
  pred.tag = Scheme::eddpc;
  pred.matrix = basis.basis;
  pred.regressor_dim = static_cast<int>(pred.matrix.cols());
  pred.prediction_length = L + n;
  pred.L = L;
  pred.m = traj.input_dim();
  pred.p = traj.output_dim();
  pred.n = n;
  return pred;
}

PredictionMap prediction_map(const Predictor& pred) {
  const int q = pred.q();
  const int L = pred.L;
  const int n = pred.n;
  if (pred.tag != Scheme::sddpc) {
    if (pred.matrix.rows() != static_cast<Eigen::Index>(q) * (L + n))
      throw Error::dimension("predictor matrix rows do not match q*(L+n)");
    return {pred.matrix, Eigen::MatrixXd(0, pred.matrix.cols())};
  }

  const int T_ini = pred.T_ini;
  const int n_s = pred.n_s;
  if (T_ini < n)
    throw Error::dimension(
        "segmented predictor covers only T_ini past samples; initialization needs n <= T_ini");
  const int seg_cols = static_cast<int>(pred.segment.cols());
  const Eigen::Index nv = static_cast<Eigen::Index>(n_s) * seg_cols;

  // Stitched timeline: segment i covers local steps [i*T_ini, i*T_ini + 2*T_ini);
  // local step s corresponds to time s - T_ini. The prediction window
  // [-n, L-1] is the last L+n blocks; each block is read from the segment
  // that owns it (ties resolved toward the later segment).
  PredictionMap out;
  out.map = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(q) * (L + n), nv);
  for (int j = 0; j < L + n; ++j) {
    const int s = T_ini - n + j;
    const int owner = std::min(s / T_ini, n_s - 1);
    const int local = s - owner * T_ini;
    out.map.middleRows(static_cast<Eigen::Index>(q) * j, q)
        .middleCols(static_cast<Eigen::Index>(owner) * seg_cols, seg_cols) =
        pred.segment.middleRows(static_cast<Eigen::Index>(q) * local, q);
  }

  out.stitch = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_s - 1) * q * T_ini, nv);
  const Eigen::MatrixXd head = pred.segment.topRows(static_cast<Eigen::Index>(q) * T_ini);
  const Eigen::MatrixXd tail = pred.segment.bottomRows(static_cast<Eigen::Index>(q) * T_ini);
  for (int i = 1; i < n_s; ++i) {
    const Eigen::Index row0 = static_cast<Eigen::Index>(i - 1) * q * T_ini;
    out.stitch.middleRows(row0, static_cast<Eigen::Index>(q) * T_ini)
        .middleCols(static_cast<Eigen::Index>(i - 1) * seg_cols, seg_cols) = tail;
    out.stitch.middleRows(row0, static_cast<Eigen::Index>(q) * T_ini)
        .middleCols(static_cast<Eigen::Index>(i) * seg_cols, seg_cols) = -head;
  }
  return out;
}

Eigen::MatrixXd effective_span(const Predictor& pred) {
  const PredictionMap pm = prediction_map(pred);
  if (pm.stitch.rows() == 0) return orthonormal_image(pm.map);
  return orthonormal_image(pm.map * null_space(pm.stitch));
}

}  // namespace ddpc
