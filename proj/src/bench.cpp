#include "ddpc/bench.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>

#include "ddpc/rng.hpp"

namespace ddpc {

namespace {

constexpr std::array<Scheme, 4> kSchemes = {Scheme::ddpc, Scheme::sddpc, Scheme::svd_ddpc,
                                            Scheme::eddpc};

struct SystemResult {
  std::array<std::vector<double>, 4> solve_times;  // warm-up discarded
  std::array<int, 4> regressor_dims = {0, 0, 0, 0};
  std::array<bool, 4> failed = {false, false, false, false};
  std::array<std::string, 4> failure;
  double equivalence_deviation = 0.0;
  double cost_deviation = 0.0;
  bool compared = false;
};

Trajectory collect_data(const LtiSystem& sys, int T, std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::VectorXd x0 = rng.uniform_vector(sys.n, -1.0, 1.0);
  const Eigen::MatrixXd u = rng.uniform_matrix(sys.m, T, -1.0, 1.0);
  return simulate(sys, x0, u);
}

SystemResult run_one_system(const BenchConfig& cfg, int order, int index) {
  const int n = order;
  const int m = n - 2;
  const int p = n - 2;
  const int L = 2 * n;
  const int T_ini = n;
  const std::uint64_t base = mix_seed(cfg.seed, static_cast<std::uint64_t>(order) << 20 | index);

  SystemResult result;
  const LtiSystem sys = random_system(n, m, p, mix_seed(base, 1));
  const OcpSpec spec = OcpSpec::regulation(L, n, m, p, cfg.box);
  const InitialPast init = sample_initial_past(sys, spec.lb, spec.ub, mix_seed(base, 2));

  std::array<ClosedLoopLog, 4> logs;
  std::array<bool, 4> ran = {false, false, false, false};
  for (std::size_t s = 0; s < kSchemes.size(); ++s) {
    const Scheme scheme = kSchemes[s];
    try {
      // The lag varies across random systems; the null-space scheme sizes its
      // data by the order bound lag <= n so every system gets the same length.
      const int T = min_data_length(scheme, m, n, n, L, T_ini);
      const Trajectory data = collect_data(sys, T, mix_seed(base, 3 + s));
      Predictor pred;
      switch (scheme) {
        case Scheme::ddpc: pred = build_ddpc_predictor(data, L, n); break;
        case Scheme::svd_ddpc: pred = build_svd_predictor(data, L, n); break;
        case Scheme::sddpc: pred = build_segmented_predictor(data, L, T_ini, n, sys.lag); break;
        case Scheme::eddpc: {
          PreprocessOptions opts;
          opts.kappa_max = cfg.kappa_max;
          pred = build_eddpc_predictor(data, L, n, sys.lag, opts);
          break;
        }
      }
      result.regressor_dims[s] = pred.regressor_dim;

      RunOptions run_opts;
      run_opts.max_steps = cfg.max_steps;
      run_opts.conv_tol = cfg.conv_tol;
      logs[s] = run(sys, pred, spec, init.w, run_opts);
      if (logs[s].status == LoopStatus::infeasible) {
        result.failed[s] = true;
        result.failure[s] = "closed loop infeasible";
        continue;
      }
      ran[s] = true;
      for (std::size_t t = 1; t < logs[s].steps.size(); ++t)  // discard warm-up solve
        result.solve_times[s].push_back(logs[s].steps[t].solve_time);
    } catch (const Error& e) {
      result.failed[s] = true;
      result.failure[s] = e.what();
    }
  }

  if (std::all_of(ran.begin(), ran.end(), [](bool b) { return b; })) {
    std::vector<const ClosedLoopLog*> ptrs;
    for (const auto& log : logs) ptrs.push_back(&log);
    const EquivalenceReport eq = check_equivalence(ptrs);
    result.equivalence_deviation = eq.max_trajectory_deviation;
    result.cost_deviation = eq.max_cost_deviation;
    result.compared = true;
  }
  return result;
}

OrderReport aggregate(int order, const std::vector<SystemResult>& results) {
  OrderReport rep;
  rep.order = order;
  const int n = order;
  const int m = n - 2;
  for (std::size_t s = 0; s < kSchemes.size(); ++s) {
    SchemeStats& stats = rep.schemes[s];
    stats.scheme = kSchemes[s];
    stats.T = min_data_length(kSchemes[s], m, n, n, 2 * n, n);
    double total = 0.0;
    for (const SystemResult& r : results) {
      if (r.failed[s]) {
        ++stats.failures;
        continue;
      }
      stats.regressor_dim = r.regressor_dims[s];
      for (double t : r.solve_times[s]) {
        total += t;
        stats.max_solve_time = std::max(stats.max_solve_time, t);
        ++stats.solves;
      }
    }
    stats.avg_solve_time = stats.solves > 0 ? total / static_cast<double>(stats.solves) : 0.0;
  }
  for (std::size_t i = 0; i < results.size(); ++i) {
    const SystemResult& r = results[i];
    if (r.compared) {
      ++rep.systems_completed;
      rep.max_equivalence_deviation =
          std::max(rep.max_equivalence_deviation, r.equivalence_deviation);
      rep.max_cost_deviation = std::max(rep.max_cost_deviation, r.cost_deviation);
    }
    for (std::size_t s = 0; s < kSchemes.size(); ++s)
      if (r.failed[s]) {
        std::ostringstream note;
        note << "order " << order << " system " << i << " " << to_string(kSchemes[s]) << ": "
             << r.failure[s];
        rep.failure_notes.push_back(note.str());
      }
  }
  return rep;
}

}  // namespace

void BenchConfig::validate() const {
  for (int n : orders)
    if (n < 3) throw Error::dimension("benchmark orders need n >= 3 so that m = n - 2 >= 1");
  if (systems_per_order < 1) throw Error::dimension("need at least one system per order");
  if (workers < 1) throw Error::dimension("worker count must be positive");
}

BenchReport run_benchmark(const BenchConfig& cfg) {
  cfg.validate();
  BenchReport report;
  report.config = cfg;
  for (int order : cfg.orders) {
    std::vector<SystemResult> results(cfg.systems_per_order);
    if (cfg.workers <= 1) {
      for (int i = 0; i < cfg.systems_per_order; ++i) results[i] = run_one_system(cfg, order, i);
    } else {
      std::atomic<int> next{0};
      auto worker = [&]() {
        while (true) {
          const int i = next.fetch_add(1);
          if (i >= cfg.systems_per_order) break;
          results[i] = run_one_system(cfg, order, i);
        }
      };
      std::vector<std::thread> pool;
      const int count = std::min(cfg.workers, cfg.systems_per_order);
      pool.reserve(count);
      for (int w = 0; w < count; ++w) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    report.orders.push_back(aggregate(order, results));
  }
  return report;
}

std::vector<AnalyticRow> analytic_table(int m, int n, int lag, int L, int T_ini) {
  if (L % T_ini != 0)
    throw Error::dimension("analytic table needs L divisible by T_ini for the segmented row");
  std::vector<AnalyticRow> rows;
  for (Scheme scheme : kSchemes) {
    AnalyticRow row;
    row.scheme = scheme;
    row.min_T = min_data_length(scheme, m, n, lag, L, T_ini);
    switch (scheme) {
      case Scheme::ddpc: row.regressor_dim = row.min_T - L - n + 1; break;
      case Scheme::sddpc: row.regressor_dim = (L / T_ini) * (row.min_T - 2 * T_ini + 1); break;
      case Scheme::svd_ddpc:
      case Scheme::eddpc: row.regressor_dim = static_cast<long>(m) * (L + n) + n; break;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string bench_report_csv(const BenchReport& report) {
  std::ostringstream out;
  out << "order,scheme,T,regressor_dim,avg_solve_time,max_solve_time,solves,failures,"
         "max_equivalence_deviation,max_cost_deviation,systems_completed\n";
  for (const OrderReport& rep : report.orders)
    for (const SchemeStats& s : rep.schemes)
      out << rep.order << "," << to_string(s.scheme) << "," << s.T << "," << s.regressor_dim
          << "," << s.avg_solve_time << "," << s.max_solve_time << "," << s.solves << ","
          << s.failures << "," << rep.max_equivalence_deviation << "," << rep.max_cost_deviation
          << "," << rep.systems_completed << "\n";
  return out.str();
}

std::string analytic_table_csv(const std::vector<AnalyticRow>& rows) {
  std::ostringstream out;
  out << "scheme,min_T,regressor_dim\n";
  for (const AnalyticRow& row : rows)
    out << to_string(row.scheme) << "," << row.min_T << "," << row.regressor_dim << "\n";
  return out.str();
}

}  // namespace ddpc
