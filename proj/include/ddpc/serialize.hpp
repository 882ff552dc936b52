#pragma once

#include <json.hpp>

#include <string>

#include "ddpc/closed_loop.hpp"
#include "ddpc/kernel.hpp"
#include "ddpc/lti.hpp"
#include "ddpc/predictors.hpp"
#include "ddpc/qp_solver.hpp"

namespace ddpc {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& M);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

/// System document: {"A": ..., "B": ..., "C": ..., "D": ...} with row-major
/// payloads. Loading revalidates the structure and recomputes the lag.
nlohmann::json system_to_json(const LtiSystem& sys);
LtiSystem system_from_json(const nlohmann::json& j);

nlohmann::json predictor_to_json(const Predictor& pred);
Predictor predictor_from_json(const nlohmann::json& j);

nlohmann::json kernel_to_json(const KernelRep& kernel);
KernelRep kernel_from_json(const nlohmann::json& j);

nlohmann::json qp_to_json(const QpProblem& qp);

/// Trajectory CSV: header u_1..u_m,y_1..y_p, one row per time step, values
/// printed with full round-trip precision.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory_csv(const std::string& path, int m, int p);

/// Closed-loop log as JSON lines (one step per line, then a status record)
/// plus an optional CSV summary.
void write_log_jsonl(const ClosedLoopLog& log, const std::string& path);
void write_log_csv(const ClosedLoopLog& log, const std::string& path);

void write_json_file(const nlohmann::json& j, const std::string& path);
nlohmann::json read_json_file(const std::string& path);

}  // namespace ddpc
