// Command-line front end for the data-driven predictive control toolkit:
// system generation, data collection, offline preprocessing, closed-loop
// runs, scheme comparison and benchmarks.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "ddpc/bench.hpp"
#include "ddpc/rng.hpp"
#include "ddpc/serialize.hpp"

namespace {

using namespace ddpc;

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::parse: return 2;
    case ErrorCategory::dimension: return 3;
    case ErrorCategory::excitation: return 4;
    case ErrorCategory::infeasible: return 5;
    case ErrorCategory::solver: return 6;
    case ErrorCategory::generation: return 7;
  }
  return 1;
}

Trajectory collect_trajectory(const LtiSystem& sys, int T, std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::VectorXd x0 = rng.uniform_vector(sys.n, -1.0, 1.0);
  const Eigen::MatrixXd u = rng.uniform_matrix(sys.m, T, -1.0, 1.0);
  return simulate(sys, x0, u);
}

Predictor build_predictor(Scheme scheme, const Trajectory& data, int L, int T_ini, int n, int lag,
                          double kappa_max) {
  switch (scheme) {
    case Scheme::ddpc: return build_ddpc_predictor(data, L, n);
    case Scheme::svd_ddpc: return build_svd_predictor(data, L, n);
    case Scheme::sddpc: return build_segmented_predictor(data, L, T_ini, n, lag);
    case Scheme::eddpc: {
      PreprocessOptions opts;
      opts.kappa_max = kappa_max;
      return build_eddpc_predictor(data, L, n, lag, opts);
    }
  }
  throw Error::parse("unknown scheme");
}

int bench_workers() {
  if (const char* env = std::getenv("DDPC_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return w;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"data-driven predictive control toolkit"};
  app.require_subcommand(1);

  // gen-sys
  auto* gen = app.add_subcommand("gen-sys", "generate a random stable system");
  int gen_order = 4, gen_inputs = 0, gen_outputs = 0;
  std::uint64_t gen_seed = 1;
  std::string gen_out = "system.json";
  gen->add_option("--order", gen_order, "state dimension n")->required();
  gen->add_option("--inputs", gen_inputs, "input count m (default n-2)");
  gen->add_option("--outputs", gen_outputs, "output count p (default n-2)");
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--out", gen_out, "output system JSON");

  // collect
  auto* collect = app.add_subcommand("collect", "simulate an excitation experiment");
  std::string col_system, col_out = "data.csv", col_scheme = "eddpc";
  int col_horizon = 0, col_tini = 0, col_samples = 0;
  std::uint64_t col_seed = 1;
  collect->add_option("--system", col_system, "system JSON")->required();
  collect->add_option("--scheme", col_scheme, "scheme whose data-length rule applies");
  collect->add_option("--horizon", col_horizon, "prediction horizon L (default 2n)");
  collect->add_option("--tini", col_tini, "segment length for sddpc (default n)");
  collect->add_option("--samples", col_samples, "data length T (default: scheme minimum)");
  collect->add_option("--seed", col_seed, "random seed");
  collect->add_option("--out", col_out, "output trajectory CSV");

  // preprocess
  auto* prep = app.add_subcommand("preprocess", "offline null-space predictor computation");
  std::string prep_data, prep_out = "predictor.json";
  int prep_order = 0, prep_lag = 0, prep_horizon = 0;
  double prep_kappa = 1e8;
  prep->add_option("--data", prep_data, "trajectory CSV")->required();
  prep->add_option("--order", prep_order, "system order n")->required();
  prep->add_option("--lag", prep_lag, "system lag (default: n)");
  prep->add_option("--horizon", prep_horizon, "prediction horizon L")->required();
  prep->add_option("--kappa-max", prep_kappa, "condition bound for the banded matrix");
  prep->add_option("--out", prep_out, "output predictor JSON");

  // run
  auto* runc = app.add_subcommand("run", "closed-loop run against the plant");
  std::string run_system, run_pred, run_out = "log.jsonl", run_summary;
  int run_steps = 30;
  double run_box = 5.0, run_conv = 1e-4;
  std::uint64_t run_seed = 1;
  runc->add_option("--system", run_system, "plant system JSON")->required();
  runc->add_option("--predictor", run_pred, "predictor JSON")->required();
  runc->add_option("--steps", run_steps, "maximum closed-loop steps");
  runc->add_option("--box", run_box, "symmetric box bound");
  runc->add_option("--conv-tol", run_conv, "convergence tolerance");
  runc->add_option("--seed", run_seed, "initialization seed");
  runc->add_option("--out", run_out, "closed-loop log (JSON lines)");
  runc->add_option("--summary", run_summary, "optional CSV summary");

  // compare
  auto* cmp = app.add_subcommand("compare", "run all four schemes and report deviations");
  int cmp_order = 4, cmp_horizon = 0, cmp_tini = 0, cmp_steps = 30;
  double cmp_box = 5.0, cmp_kappa = 1e8, cmp_tol = 1e-5;
  std::uint64_t cmp_seed = 1;
  std::string cmp_out;
  cmp->add_option("--order", cmp_order, "state dimension n");
  cmp->add_option("--horizon", cmp_horizon, "prediction horizon (default 2n)");
  cmp->add_option("--tini", cmp_tini, "segment length (default n)");
  cmp->add_option("--steps", cmp_steps, "maximum closed-loop steps");
  cmp->add_option("--box", cmp_box, "symmetric box bound");
  cmp->add_option("--kappa-max", cmp_kappa, "condition bound");
  cmp->add_option("--tol", cmp_tol, "deviation threshold for exit status");
  cmp->add_option("--seed", cmp_seed, "pipeline seed");
  cmp->add_option("--out", cmp_out, "optional report JSON");

  // bench
  auto* bench = app.add_subcommand("bench", "multi-order benchmark");
  std::vector<int> bench_orders = {4, 6, 8};
  int bench_systems = 10, bench_steps = 30;
  bool bench_paper_scale = false;
  std::uint64_t bench_seed = 1;
  std::string bench_out = "bench_report";
  bench->add_option("--orders", bench_orders, "orders to benchmark");
  bench->add_option("--systems", bench_systems, "systems per order");
  bench->add_option("--steps", bench_steps, "maximum closed-loop steps");
  bench->add_option("--seed", bench_seed, "benchmark seed");
  bench->add_flag("--paper-scale", bench_paper_scale, "orders 4..14, 100 systems per order");
  bench->add_option("--out", bench_out, "output directory");

  // table1
  auto* table = app.add_subcommand("table1", "analytic scheme comparison table");
  int tab_order = 4, tab_inputs = 0, tab_lag = 0, tab_horizon = 0, tab_tini = 0;
  std::string tab_out;
  table->add_option("--order", tab_order, "state dimension n");
  table->add_option("--inputs", tab_inputs, "input count m (default n-2)");
  table->add_option("--lag", tab_lag, "lag (default n)");
  table->add_option("--horizon", tab_horizon, "prediction horizon (default 2n)");
  table->add_option("--tini", tab_tini, "segment length (default n)");
  table->add_option("--out", tab_out, "optional CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      if (gen_inputs <= 0) gen_inputs = gen_order - 2;
      if (gen_outputs <= 0) gen_outputs = gen_order - 2;
      if (gen_inputs < 1 || gen_outputs < 1)
        throw Error::dimension("gen-sys needs inputs/outputs >= 1 (give --inputs/--outputs)");
      const LtiSystem sys = random_system(gen_order, gen_inputs, gen_outputs, gen_seed);
      write_json_file(system_to_json(sys), gen_out);
      std::cout << "wrote " << gen_out << " (n=" << sys.n << " m=" << sys.m << " p=" << sys.p
                << " lag=" << sys.lag << ")\n";
    } else if (*collect) {
      const LtiSystem sys = system_from_json(read_json_file(col_system));
      const Scheme scheme = scheme_from_string(col_scheme);
      if (col_horizon <= 0) col_horizon = 2 * sys.n;
      if (col_tini <= 0) col_tini = sys.n;
      const int bound = min_data_length(scheme, sys.m, sys.n, sys.lag, col_horizon, col_tini);
      if (col_samples <= 0) col_samples = bound;
      if (col_samples < bound) {
        std::ostringstream msg;
        msg << "requested " << col_samples << " samples, but scheme " << to_string(scheme)
            << " needs at least " << bound;
        throw Error::excitation(msg.str());
      }
      const Trajectory data = collect_trajectory(sys, col_samples, col_seed);
      write_trajectory_csv(data, col_out);
      std::cout << "wrote " << col_out << " (T=" << data.length() << ")\n";
    } else if (*prep) {
      const Trajectory data = read_trajectory_csv(prep_data, 0, 0);
      if (prep_lag <= 0) prep_lag = prep_order;
      PreprocessOptions opts;
      opts.kappa_max = prep_kappa;
      const BehaviorBasis basis = preprocess(data, prep_order, prep_lag, prep_horizon, opts);
      Predictor pred;
      pred.tag = Scheme::eddpc;
      pred.matrix = basis.basis;
      pred.regressor_dim = static_cast<int>(basis.basis.cols());
      pred.prediction_length = basis.window;
      pred.L = prep_horizon;
      pred.m = basis.m;
      pred.p = basis.p;
      pred.n = basis.n;
      write_json_file(predictor_to_json(pred), prep_out);
      std::cout << "wrote " << prep_out << " (" << pred.matrix.rows() << " x "
                << pred.regressor_dim << ")\n";
    } else if (*runc) {
      const LtiSystem sys = system_from_json(read_json_file(run_system));
      const Predictor pred = predictor_from_json(read_json_file(run_pred));
      const OcpSpec spec = OcpSpec::regulation(pred.L, pred.n, pred.m, pred.p, run_box);
      const InitialPast init = sample_initial_past(sys, spec.lb, spec.ub, run_seed);
      RunOptions opts;
      opts.max_steps = run_steps;
      opts.conv_tol = run_conv;
      const ClosedLoopLog log = run(sys, pred, spec, init.w, opts);
      write_log_jsonl(log, run_out);
      if (!run_summary.empty()) write_log_csv(log, run_summary);
      std::cout << "status " << to_string(log.status) << " after " << log.steps.size()
                << " steps\n";
      if (log.status == LoopStatus::infeasible) return exit_code(ErrorCategory::infeasible);
    } else if (*cmp) {
      if (cmp_horizon <= 0) cmp_horizon = 2 * cmp_order;
      if (cmp_tini <= 0) cmp_tini = cmp_order;
      const int n = cmp_order;
      const int m = n - 2 >= 1 ? n - 2 : 1;
      const int p = m;
      const LtiSystem sys = random_system(n, m, p, mix_seed(cmp_seed, 1));
      const OcpSpec spec = OcpSpec::regulation(cmp_horizon, n, m, p, cmp_box);
      const InitialPast init = sample_initial_past(sys, spec.lb, spec.ub, mix_seed(cmp_seed, 2));
      RunOptions opts;
      opts.max_steps = cmp_steps;

      std::vector<ClosedLoopLog> logs;
      const Scheme schemes[] = {Scheme::ddpc, Scheme::sddpc, Scheme::svd_ddpc, Scheme::eddpc};
      for (std::size_t s = 0; s < 4; ++s) {
        const int T = min_data_length(schemes[s], m, n, n, cmp_horizon, cmp_tini);
        const Trajectory data = collect_trajectory(sys, T, mix_seed(cmp_seed, 3 + s));
        const Predictor pred =
            build_predictor(schemes[s], data, cmp_horizon, cmp_tini, n, sys.lag, cmp_kappa);
        logs.push_back(run(sys, pred, spec, init.w, opts));
      }
      std::vector<const ClosedLoopLog*> ptrs;
      for (const auto& log : logs) ptrs.push_back(&log);
      const EquivalenceReport rep = check_equivalence(ptrs);
      std::cout << "max trajectory deviation " << rep.max_trajectory_deviation
                << ", max relative cost deviation " << rep.max_cost_deviation << " over "
                << rep.compared_steps << " steps\n";
      if (!cmp_out.empty()) {
        nlohmann::json j;
        j["max_trajectory_deviation"] = rep.max_trajectory_deviation;
        j["max_cost_deviation"] = rep.max_cost_deviation;
        j["compared_steps"] = rep.compared_steps;
        j["truncated"] = rep.truncated;
        write_json_file(j, cmp_out);
      }
      if (rep.max_trajectory_deviation > cmp_tol) {
        std::cerr << "deviation exceeds " << cmp_tol << "\n";
        return exit_code(ErrorCategory::solver);
      }
    } else if (*bench) {
      BenchConfig cfg;
      cfg.orders = bench_orders;
      cfg.systems_per_order = bench_systems;
      cfg.seed = bench_seed;
      cfg.max_steps = bench_steps;
      cfg.workers = bench_workers();
      if (bench_paper_scale) {
        cfg.orders = {4, 6, 8, 10, 12, 14};
        cfg.systems_per_order = 100;
      }
      const BenchReport report = run_benchmark(cfg);

      std::filesystem::create_directories(bench_out);
      nlohmann::json j;
      j["seed"] = cfg.seed;
      j["systems_per_order"] = cfg.systems_per_order;
      j["orders"] = nlohmann::json::array();
      for (const OrderReport& rep : report.orders) {
        nlohmann::json jo;
        jo["order"] = rep.order;
        jo["max_equivalence_deviation"] = rep.max_equivalence_deviation;
        jo["max_cost_deviation"] = rep.max_cost_deviation;
        jo["systems_completed"] = rep.systems_completed;
        jo["failures"] = rep.failure_notes;
        for (const SchemeStats& s : rep.schemes) {
          nlohmann::json js;
          js["T"] = s.T;
          js["regressor_dim"] = s.regressor_dim;
          js["avg_solve_time"] = s.avg_solve_time;
          js["max_solve_time"] = s.max_solve_time;
          js["solves"] = s.solves;
          js["failures"] = s.failures;
          jo["schemes"][to_string(s.scheme)] = js;
        }
        j["orders"].push_back(jo);
      }
      write_json_file(j, bench_out + "/report.json");
      std::ofstream csv(bench_out + "/report.csv");
      csv << bench_report_csv(report);
      std::ofstream dat(bench_out + "/timing.dat");
      dat << "# order avg_ddpc avg_sddpc avg_svd avg_eddpc\n";
      for (const OrderReport& rep : report.orders) {
        dat << rep.order;
        for (const SchemeStats& s : rep.schemes) dat << " " << s.avg_solve_time;
        dat << "\n";
      }
      std::cout << bench_report_csv(report);
    } else if (*table) {
      if (tab_inputs <= 0) tab_inputs = tab_order - 2;
      if (tab_lag <= 0) tab_lag = tab_order;
      if (tab_horizon <= 0) tab_horizon = 2 * tab_order;
      if (tab_tini <= 0) tab_tini = tab_order;
      if (tab_inputs < 1) throw Error::dimension("table needs at least one input (--inputs)");
      const auto rows = analytic_table(tab_inputs, tab_order, tab_lag, tab_horizon, tab_tini);
      std::cout << analytic_table_csv(rows);
      if (!tab_out.empty()) {
        std::ofstream out(tab_out);
        out << analytic_table_csv(rows);
      }
    }
  } catch (const Error& e) {
    std::cerr << "error[" << to_string(e.category()) << "]: " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
