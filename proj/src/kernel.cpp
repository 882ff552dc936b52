#include "ddpc/kernel.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "ddpc/linalg.hpp"

namespace ddpc {

KernelRep extract_kernel(const Trajectory& traj, int d, int n, int lag) {
  if (n < 1 || lag < 1) throw Error::dimension("extract_kernel needs n, lag >= 1");
  if (d < lag + 1) {
    std::ostringstream msg;
    msg << "kernel depth d = " << d << " must be at least lag + 1 = " << lag + 1;
    throw Error::dimension(msg.str());
  }
  const int m = traj.input_dim();
  const int p = traj.output_dim();
  const HankelMatrix H = hankel(traj, d);
  const int expected = m * d + n;
  const int rank = numerical_rank(H.data);
  if (rank != expected) {
    std::ostringstream msg;
    msg << "depth-" << d << " Hankel matrix has rank " << rank << ", expected m*d + n = "
        << expected << "; data is not persistently exciting of order d + n (or d is too small)";
    throw Error::excitation(msg.str());
  }

  KernelRep kernel;
  kernel.rows = left_null_space(H.data);
  kernel.d = d;
  kernel.m = m;
  kernel.p = p;
  kernel.n = n;
  // qd - (md + n) = pd - n rows, guaranteed by the rank check above.
  return kernel;
}

RowSelection select_band_rows(const KernelRep& kernel, int L_target,
                              const SelectRowsOptions& opts) {
  const int g = kernel.row_count();
  const int p = kernel.p;
  if (g < p) throw Error::dimension("kernel has fewer rows than outputs");
  if (L_target < kernel.d) throw Error::dimension("target window shorter than the kernel depth");

  RowSelection best;
  best.band_condition = std::numeric_limits<double>::infinity();

  // Lexicographic enumeration of p-subsets of {0..g-1}, first-subset first.
  std::vector<int> combo(p);
  for (int i = 0; i < p; ++i) combo[i] = i;
  while (true) {
    const KernelBand band = build_kernel_band(kernel, combo, L_target);
    const double cond = condition_number(band.data);
    ++best.combinations_examined;
    if (cond < best.band_condition) {
      best.band_condition = cond;
      best.indices = combo;
    }
    if (cond <= opts.kappa_max) {
      best.within_bound = true;
      return best;
    }
    if (best.combinations_examined >= opts.max_combinations) break;

    // next combination
    int i = p - 1;
    while (i >= 0 && combo[i] == g - p + i) --i;
    if (i < 0) break;
    ++combo[i];
    for (int j = i + 1; j < p; ++j) combo[j] = combo[j - 1] + 1;
  }
  return best;  // within_bound stays false
}

KernelBand build_kernel_band(const KernelRep& kernel, const std::vector<int>& selected,
                             int L_target) {
  const int d = kernel.d;
  const int q = kernel.q();
  const int p = kernel.p;
  const int g = kernel.row_count();
  if (L_target < d) {
    std::ostringstream msg;
    msg << "target window " << L_target << " shorter than the kernel depth " << d;
    throw Error::dimension(msg.str());
  }
  if (static_cast<int>(selected.size()) != p)
    throw Error::dimension("row selection must contain exactly p indices");
  for (int idx : selected)
    if (idx < 0 || idx >= g) throw Error::dimension("row selection index out of range");

  const int shifts = L_target - d;
  KernelBand band;
  band.d = d;
  band.L_target = L_target;
  band.m = kernel.m;
  band.p = p;
  band.n = kernel.n;
  band.shifted_rows = selected;
  band.data = Eigen::MatrixXd::Zero(g + static_cast<Eigen::Index>(p) * shifts,
                                    static_cast<Eigen::Index>(q) * L_target);
  band.data.topLeftCorner(g, static_cast<Eigen::Index>(q) * d) = kernel.rows;
  for (int k = 1; k <= shifts; ++k)
    for (int i = 0; i < p; ++i)
      band.data.block(g + static_cast<Eigen::Index>(k - 1) * p + i,
                      static_cast<Eigen::Index>(k) * q, 1,
                      static_cast<Eigen::Index>(q) * d) = kernel.rows.row(selected[i]);
  return band;
}

BehaviorBasis null_space_predictor(const KernelBand& band) {
  const int expected = band.m * band.L_target + band.n;
  const Eigen::Index rows = band.data.rows();
  const Eigen::Index cols = band.data.cols();
  // A valid band has full row rank, which pins the nullity to m*L + n
  // structurally; the band is only trusted when its smallest singular value
  // sits clearly above the noise floor.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(band.data, Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  if (cols - rows != expected || s(s.size() - 1) <= s(0) * static_cast<double>(rows) * 1e-14) {
    const Eigen::Index nullity =
        cols - rows + (s(s.size() - 1) <= s(0) * static_cast<double>(rows) * 1e-14 ? 1 : 0);
    std::ostringstream msg;
    msg << "kernel band has nullity >= " << nullity << ", expected m*L + n = " << expected
        << "; the kernel is degenerate (wrong order n or rank-deficient band)";
    throw Error::solver(msg.str());
  }
  BehaviorBasis out;
  out.basis = svd.matrixV().rightCols(expected);
  out.window = band.L_target;
  out.m = band.m;
  out.p = band.p;
  out.n = band.n;
  return out;
}

BehaviorBasis preprocess(const Trajectory& traj, int n, int lag, int L,
                         const PreprocessOptions& opts) {
  const int d = lag + 1;
  const KernelRep kernel = extract_kernel(traj, d, n, lag);
  SelectRowsOptions sel_opts;
  sel_opts.kappa_max = opts.kappa_max;
  sel_opts.max_combinations = opts.max_combinations;
  const RowSelection sel = select_band_rows(kernel, L + n, sel_opts);
  const KernelBand band = build_kernel_band(kernel, sel.indices, L + n);
  return null_space_predictor(band);
}

}  // namespace ddpc
