#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ddpc/closed_loop.hpp"

namespace ddpc {

/// Comparison protocol: for each order n (with p = m = n - 2,
/// horizon L = 2n, T_ini = n, identity weight, origin set point, box +-box)
/// generate random systems, collect minimum-length excitation data per
/// scheme, run all four closed loops from one shared initialization and
/// aggregate solve times and deviations.
struct BenchConfig {
  std::vector<int> orders = {4, 6, 8};
  int systems_per_order = 10;
  std::uint64_t seed = 1;
  int max_steps = 30;
  double conv_tol = 1e-4;
  double box = 5.0;
  double kappa_max = 1e8;
  int workers = 1;

  void validate() const;
};

struct SchemeStats {
  Scheme scheme = Scheme::ddpc;
  int T = 0;
  int regressor_dim = 0;
  double avg_solve_time = 0.0;  ///< seconds per iteration, warm-up solve discarded
  double max_solve_time = 0.0;
  long solves = 0;
  int failures = 0;
};

struct OrderReport {
  int order = 0;
  std::array<SchemeStats, 4> schemes;
  double max_equivalence_deviation = 0.0;
  double max_cost_deviation = 0.0;
  int systems_completed = 0;
  std::vector<std::string> failure_notes;
};

struct BenchReport {
  BenchConfig config;
  std::vector<OrderReport> orders;
};

BenchReport run_benchmark(const BenchConfig& cfg);

/// One comparison row per scheme: minimum data length and the regressor
/// dimension it implies (the raw and segmented dimensions depend on the data
/// length and are evaluated at the minimum).
struct AnalyticRow {
  Scheme scheme = Scheme::ddpc;
  long min_T = 0;
  long regressor_dim = 0;
};

std::vector<AnalyticRow> analytic_table(int m, int n, int lag, int L, int T_ini);

std::string bench_report_csv(const BenchReport& report);
std::string analytic_table_csv(const std::vector<AnalyticRow>& rows);

}  // namespace ddpc
