#include "ddpc/serialize.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace ddpc {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& M) {
  nlohmann::json j;
  j["rows"] = M.rows();
  j["cols"] = M.cols();
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(M.size()));
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index k = 0; k < M.cols(); ++k) data.push_back(M(i, k));
  j["data"] = std::move(data);
  return j;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  if (!j.contains("rows") || !j.contains("cols") || !j.contains("data"))
    throw Error::parse("matrix document needs rows, cols, data");
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw Error::parse("matrix payload size does not match its dimensions");
  Eigen::MatrixXd M(rows, cols);
  std::size_t idx = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k) M(i, k) = data[idx++];
  return M;
}

nlohmann::json system_to_json(const LtiSystem& sys) {
  nlohmann::json j;
  j["A"] = matrix_to_json(sys.A);
  j["B"] = matrix_to_json(sys.B);
  j["C"] = matrix_to_json(sys.C);
  j["D"] = matrix_to_json(sys.D);
  return j;
}

LtiSystem system_from_json(const nlohmann::json& j) {
  for (const char* key : {"A", "B", "C", "D"})
    if (!j.contains(key)) throw Error::parse(std::string("system document misses ") + key);
  return LtiSystem::create(matrix_from_json(j.at("A")), matrix_from_json(j.at("B")),
                           matrix_from_json(j.at("C")), matrix_from_json(j.at("D")));
}

nlohmann::json predictor_to_json(const Predictor& pred) {
  nlohmann::json j;
  j["tag"] = to_string(pred.tag);
  j["m"] = pred.m;
  j["p"] = pred.p;
  j["n"] = pred.n;
  j["L"] = pred.L;
  j["prediction_length"] = pred.prediction_length;
  j["regressor_dim"] = pred.regressor_dim;
  if (pred.tag == Scheme::sddpc) {
    j["segment"] = matrix_to_json(pred.segment);
    j["T_ini"] = pred.T_ini;
    j["n_s"] = pred.n_s;
  } else {
    j["matrix"] = matrix_to_json(pred.matrix);
  }
  return j;
}

Predictor predictor_from_json(const nlohmann::json& j) {
  Predictor pred;
  pred.tag = scheme_from_string(j.at("tag").get<std::string>());
  pred.m = j.at("m").get<int>();
  pred.p = j.at("p").get<int>();
  pred.n = j.at("n").get<int>();
  pred.L = j.at("L").get<int>();
  pred.prediction_length = j.at("prediction_length").get<int>();
  pred.regressor_dim = j.at("regressor_dim").get<int>();
  if (pred.tag == Scheme::sddpc) {
    pred.segment = matrix_from_json(j.at("segment"));
    pred.T_ini = j.at("T_ini").get<int>();
    pred.n_s = j.at("n_s").get<int>();
  } else {
    pred.matrix = matrix_from_json(j.at("matrix"));
    if (pred.matrix.rows() != static_cast<Eigen::Index>(pred.m + pred.p) * pred.prediction_length ||
        pred.matrix.cols() != pred.regressor_dim)
      throw Error::parse("predictor payload dimensions are inconsistent");
  }
  return pred;
}

nlohmann::json kernel_to_json(const KernelRep& kernel) {
  nlohmann::json j;
  j["d"] = kernel.d;
  j["m"] = kernel.m;
  j["p"] = kernel.p;
  j["n"] = kernel.n;
  j["rows"] = matrix_to_json(kernel.rows);
  return j;
}

KernelRep kernel_from_json(const nlohmann::json& j) {
  KernelRep kernel;
  kernel.d = j.at("d").get<int>();
  kernel.m = j.at("m").get<int>();
  kernel.p = j.at("p").get<int>();
  kernel.n = j.at("n").get<int>();
  kernel.rows = matrix_from_json(j.at("rows"));
  if (kernel.rows.cols() != static_cast<Eigen::Index>(kernel.q()) * kernel.d)
    throw Error::parse("kernel payload dimensions are inconsistent");
  return kernel;
}

nlohmann::json qp_to_json(const QpProblem& qp) {
  nlohmann::json j;
  j["H"] = matrix_to_json(qp.H);
  j["f"] = matrix_to_json(qp.f);
  j["A_eq"] = matrix_to_json(qp.A_eq);
  j["b_eq"] = matrix_to_json(qp.b_eq);
  j["G"] = matrix_to_json(qp.G);
  j["lb"] = matrix_to_json(qp.lb);
  j["ub"] = matrix_to_json(qp.ub);
  return j;
}

namespace {

std::string full_precision(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error::parse("cannot open '" + path + "' for writing");
  for (int i = 0; i < traj.input_dim(); ++i) out << (i ? "," : "") << "u_" << i + 1;
  for (int i = 0; i < traj.output_dim(); ++i) out << ",y_" << i + 1;
  out << "\n";
  for (int t = 0; t < traj.length(); ++t) {
    for (int i = 0; i < traj.q(); ++i) out << (i ? "," : "") << full_precision(traj.data()(i, t));
    out << "\n";
  }
}

Trajectory read_trajectory_csv(const std::string& path, int m, int p) {
  std::ifstream in(path);
  if (!in) throw Error::parse("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error::parse("empty trajectory file");

  // Infer block sizes from the header when not supplied.
  if (m <= 0 || p <= 0) {
    m = p = 0;
    std::istringstream hs(line);
    std::string tok;
    while (std::getline(hs, tok, ',')) {
      if (tok.rfind("u_", 0) == 0) ++m;
      else if (tok.rfind("y_", 0) == 0) ++p;
      else throw Error::parse("unexpected column '" + tok + "' in trajectory header");
    }
  }
  if (m < 1 || p < 1) throw Error::parse("trajectory header must name u_* and y_* columns");

  std::vector<Eigen::VectorXd> samples;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    Eigen::VectorXd w(m + p);
    int i = 0;
    while (std::getline(ls, tok, ',')) {
      if (i >= m + p) throw Error::parse("trajectory row has too many values");
      try {
        w(i++) = std::stod(tok);
      } catch (const std::exception&) {
        throw Error::parse("cannot parse value '" + tok + "'");
      }
    }
    if (i != m + p) throw Error::parse("trajectory row has too few values");
    samples.push_back(std::move(w));
  }
  if (samples.empty()) throw Error::parse("trajectory file has no samples");
  Eigen::MatrixXd data(m + p, static_cast<Eigen::Index>(samples.size()));
  for (std::size_t t = 0; t < samples.size(); ++t) data.col(static_cast<Eigen::Index>(t)) = samples[t];
  return Trajectory(std::move(data), m, p);
}

namespace {

nlohmann::json step_to_json(const StepRecord& rec) {
  nlohmann::json j;
  j["t"] = rec.t;
  j["w"] = std::vector<double>(rec.w.data(), rec.w.data() + rec.w.size());
  j["u"] = std::vector<double>(rec.u.data(), rec.u.data() + rec.u.size());
  j["cost"] = rec.cost;
  j["solver_status"] = to_string(rec.solver_status);
  j["solver_iterations"] = rec.solver_iterations;
  j["solve_time"] = rec.solve_time;
  j["predicted"] = matrix_to_json(rec.predicted);
  return j;
}

}  // namespace

void write_log_jsonl(const ClosedLoopLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error::parse("cannot open '" + path + "' for writing");
  for (const StepRecord& rec : log.steps) out << step_to_json(rec).dump() << "\n";
  out << nlohmann::json{{"status", to_string(log.status)}}.dump() << "\n";
}

void write_log_csv(const ClosedLoopLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error::parse("cannot open '" + path + "' for writing");
  out << "t,cost,solver_status,solver_iterations,solve_time";
  if (!log.steps.empty()) {
    for (Eigen::Index i = 0; i < log.steps[0].u.size(); ++i) out << ",u_" << i + 1;
    for (Eigen::Index i = 0; i < log.steps[0].w.size() - log.steps[0].u.size(); ++i)
      out << ",y_" << i + 1;
  }
  out << "\n";
  for (const StepRecord& rec : log.steps) {
    out << rec.t << "," << full_precision(rec.cost) << "," << to_string(rec.solver_status) << ","
        << rec.solver_iterations << "," << full_precision(rec.solve_time);
    for (Eigen::Index i = 0; i < rec.w.size(); ++i) out << "," << full_precision(rec.w(i));
    out << "\n";
  }
}

void write_json_file(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error::parse("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error::parse("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error::parse("cannot parse '" + path + "': " + e.what());
  }
}

}  // namespace ddpc
