#include "expdol/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

namespace expdol {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

GeneratedInstance make_instance(const ScenarioSpec& scenario, double snr_db,
                                std::uint64_t seed) {
  return std::visit(
      [&](auto spec) {
        spec.snr_db = snr_db;
        spec.seed = seed;
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, SyntheticSpec>) {
          return generate_synthetic(spec);
        } else {
          return generate_doa(spec);
        }
      },
      scenario);
}

double scenario_snr(const ScenarioSpec& scenario) {
  return std::visit([](const auto& s) { return s.snr_db; }, scenario);
}

SolverConfig method_solver_config(const SolverConfig& base,
                                  const MethodSpec& method,
                                  const ProblemInstance& problem) {
  SolverConfig cfg = base;
  const bool have_noise = problem.true_noise_variance &&
                          *problem.true_noise_variance > 0.0;
  if (method.noise_mode == NoiseMode::Fixed && have_noise) {
    cfg.noise_mode = NoiseMode::Fixed;
    cfg.fixed_beta = std::log(*problem.true_noise_variance);
  } else {
    // Noiseless instances cannot pin beta at log(0); fall back to
    // estimation.
    cfg.noise_mode = NoiseMode::Estimate;
  }
  return cfg;
}

std::string trace_json(const TraceRecord& rec) {
  std::ostringstream os;
  os << "{\"outer\":" << rec.outer << ",\"inner\":" << rec.inner
     << ",\"logdet\":" << fmt(rec.cost.logdet_term)
     << ",\"data\":" << fmt(rec.cost.data_term)
     << ",\"prior\":" << fmt(rec.cost.prior_term)
     << ",\"tv\":" << fmt(rec.cost.tv_term)
     << ",\"total\":" << fmt(rec.cost.total)
     << ",\"primal_residual\":" << fmt(rec.primal_residual)
     << ",\"grad_norm\":" << fmt(rec.grad_norm) << "}\n";
  return os.str();
}

std::string baseline_trace_json(const std::vector<CostBreakdown>& trace) {
  std::ostringstream os;
  int k = 0;
  for (const auto& cost : trace) {
    os << "{\"outer\":" << ++k << ",\"inner\":1,\"logdet\":"
       << fmt(cost.logdet_term) << ",\"data\":" << fmt(cost.data_term)
       << ",\"prior\":" << fmt(cost.prior_term)
       << ",\"tv\":" << fmt(cost.tv_term) << ",\"total\":" << fmt(cost.total)
       << ",\"primal_residual\":0,\"grad_norm\":0}\n";
  }
  return os.str();
}

// Runs tasks [0, count) on a small pool; task order in the result arrays is
// by index, so scheduling never changes the output.
void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
  }
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

std::string MethodSpec::label() const {
  if (kind == Kind::BaselineSbl) return "sbl";
  return noise_mode == NoiseMode::Fixed ? "expdol-fixed" : "expdol";
}

void ExperimentConfig::validate() const {
  solver.validate();
  if (trials < 1) throw ContractViolation("ExperimentConfig: trials >= 1");
  if (methods.empty()) {
    throw ContractViolation("ExperimentConfig: methods must be nonempty");
  }
  if (!(f1_delta > 0.0 && f1_delta < 1.0)) {
    throw ContractViolation("ExperimentConfig: f1_delta in (0, 1)");
  }
  std::visit([](const auto& s) { s.validate(); }, scenario);
}

std::string ExperimentConfig::scenario_name() const {
  return std::holds_alternative<SyntheticSpec>(scenario) ? "synthetic" : "doa";
}

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  std::vector<double> snrs = config.snr_sweep;
  if (snrs.empty()) snrs.push_back(scenario_snr(config.scenario));
  const bool is_doa = std::holds_alternative<DoaSpec>(config.scenario);

  struct Task {
    double snr_db;
    int trial;
    int method_index;
  };
  std::vector<Task> tasks;
  tasks.reserve(snrs.size() * config.trials * config.methods.size());
  for (double snr : snrs) {
    for (int trial = 0; trial < config.trials; ++trial) {
      for (int mi = 0; mi < static_cast<int>(config.methods.size()); ++mi) {
        tasks.push_back({snr, trial, mi});
      }
    }
  }

  const std::string scenario_dir =
      config.output_dir + "/" + config.scenario_name();
  if (config.write_traces) {
    for (const auto& method : config.methods) {
      fs::create_directories(scenario_dir + "/" + method.label() + "/traces");
    }
  }

  std::vector<TrialRecord> rows(tasks.size());
  parallel_for(
      static_cast<int>(tasks.size()), config.threads, [&](int idx) {
        const Task& task = tasks[idx];
        const MethodSpec& method = config.methods[task.method_index];
        TrialRecord row;
        row.method = method.label();
        row.snr_db = task.snr_db;
        row.trial = task.trial;

        const GeneratedInstance inst = make_instance(
            config.scenario, task.snr_db, config.seed_base + task.trial);
        const SolverConfig cfg =
            method_solver_config(config.solver, method, inst.problem);

        std::string trace_buffer;
        TraceSink sink;
        if (config.write_traces && method.kind == MethodSpec::Kind::ExpDol) {
          sink = [&trace_buffer](const TraceRecord& rec) {
            trace_buffer += trace_json(rec);
          };
        }

        try {
          const RecoveryResult result =
              method.kind == MethodSpec::Kind::ExpDol
                  ? run(inst.problem, cfg, sink)
                  : baseline_sbl(inst.problem, cfg);
          row.outcome.nse = inst.problem.ground_truth
                                ? nse(*inst.problem.ground_truth, result.X_hat)
                                : nan_value();
          row.outcome.f1 =
              f1_support(inst.true_support, result.X_hat, config.f1_delta);
          row.outcome.wall_time_s = result.wall_time_s;
          if (inst.problem.true_noise_variance &&
              *inst.problem.true_noise_variance > 0.0) {
            const double lt = *inst.problem.true_noise_variance;
            row.outcome.lambda_rel_error =
                std::abs(result.lambda_hat - lt) / lt;
            row.outcome.lambda_db_error =
                std::abs(10.0 * std::log10(result.lambda_hat / lt));
          }
          if (is_doa) {
            row.outcome.leakage_fraction =
                doa_leakage(inst.true_support, result.X_hat);
          }
          row.converged = result.converged;
          row.outer_iters = result.outer_iters_used;
          if (method.kind == MethodSpec::Kind::BaselineSbl &&
              config.write_traces) {
            trace_buffer = baseline_trace_json(result.cost_trace);
          }
        } catch (const std::exception&) {
          row.aborted = true;
          row.outcome.nse = nan_value();
          row.outcome.f1 = nan_value();
          row.outcome.wall_time_s = nan_value();
        }

        if (config.write_traces && !trace_buffer.empty()) {
          std::ofstream os(scenario_dir + "/" + method.label() +
                           "/traces/snr" + fmt_short(task.snr_db) + "_trial" +
                           std::to_string(task.trial) + ".jsonl");
          os << trace_buffer;
        }
        rows[idx] = std::move(row);
      });

  SweepResult result;
  result.rows = std::move(rows);

  // Aggregates per (snr, method), in task enumeration order.
  for (double snr : snrs) {
    for (const auto& method : config.methods) {
      std::vector<double> nses;
      double f1_sum = 0.0;
      double time_sum = 0.0;
      int count = 0;
      for (const auto& row : result.rows) {
        if (row.snr_db != snr || row.method != method.label() || row.aborted) {
          continue;
        }
        nses.push_back(row.outcome.nse);
        f1_sum += row.outcome.f1;
        time_sum += row.outcome.wall_time_s;
        ++count;
      }
      if (count == 0) continue;
      const Quartiles q = quartiles(nses);
      result.aggregates.push_back({method.label(), snr, q.q25, q.q50, q.q75,
                                   f1_sum / count, time_sum / count});
    }
  }
  return result;
}

std::string trials_csv(const std::vector<TrialRecord>& rows) {
  std::ostringstream os;
  os << "method,snr_db,trial,nse,f1,wall_time_s,lambda_rel_error,converged,"
        "outer_iters\n";
  for (const auto& row : rows) {
    os << row.method << ',' << fmt_short(row.snr_db) << ',' << row.trial << ','
       << fmt(row.outcome.nse) << ',' << fmt(row.outcome.f1) << ','
       << fmt(row.outcome.wall_time_s) << ','
       << (row.outcome.lambda_rel_error ? fmt(*row.outcome.lambda_rel_error)
                                        : "nan")
       << ',' << (row.converged ? 1 : 0) << ',' << row.outer_iters << '\n';
  }
  return os.str();
}

std::string aggregate_csv(const std::vector<AggregateRecord>& rows) {
  std::ostringstream os;
  os << "method,snr_db,nse_q25,nse_q50,nse_q75,f1_mean,wall_time_mean_s\n";
  for (const auto& row : rows) {
    os << row.method << ',' << fmt_short(row.snr_db) << ',' << fmt(row.nse_q25)
       << ',' << fmt(row.nse_q50) << ',' << fmt(row.nse_q75) << ','
       << fmt(row.f1_mean) << ',' << fmt(row.wall_time_mean_s) << '\n';
  }
  return os.str();
}

namespace {

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << contents;
}

}  // namespace

void write_sweep_outputs(const ExperimentConfig& config,
                         const SweepResult& result) {
  const std::string scenario_dir =
      config.output_dir + "/" + config.scenario_name();
  fs::create_directories(scenario_dir);
  write_file(scenario_dir + "/trials.csv", trials_csv(result.rows));
  write_file(scenario_dir + "/aggregate.csv",
             aggregate_csv(result.aggregates));

  for (const auto& method : config.methods) {
    const std::string method_dir = scenario_dir + "/" + method.label();
    fs::create_directories(method_dir);
    std::vector<TrialRecord> mine;
    for (const auto& row : result.rows) {
      if (row.method == method.label()) mine.push_back(row);
    }
    std::vector<AggregateRecord> agg;
    for (const auto& row : result.aggregates) {
      if (row.method == method.label()) agg.push_back(row);
    }
    write_file(method_dir + "/trials.csv", trials_csv(mine));
    write_file(method_dir + "/aggregate.csv", aggregate_csv(agg));
  }
}

DoaResult run_doa(const ExperimentConfig& config) {
  config.validate();
  const auto* doa = std::get_if<DoaSpec>(&config.scenario);
  if (doa == nullptr) {
    throw ContractViolation("run_doa: scenario must be a DoaSpec");
  }
  const int n = doa->grid_size();

  DoaResult result;
  result.grid.resize(n);
  for (int k = 0; k < n; ++k) result.grid[k] = -1.0 + k * doa->grid_step;

  struct Task {
    int trial;
    int method_index;
  };
  std::vector<Task> tasks;
  for (int trial = 0; trial < config.trials; ++trial) {
    for (int mi = 0; mi < static_cast<int>(config.methods.size()); ++mi) {
      tasks.push_back({trial, mi});
    }
  }
  result.rows.resize(tasks.size());

  parallel_for(static_cast<int>(tasks.size()), config.threads, [&](int idx) {
    const Task& task = tasks[idx];
    const MethodSpec& method = config.methods[task.method_index];
    DoaMethodRun out;
    out.method = method.label();
    out.trial = task.trial;

    DoaSpec spec = *doa;
    spec.seed = config.seed_base + task.trial;
    const GeneratedInstance inst = generate_doa(spec);
    const SolverConfig cfg =
        method_solver_config(config.solver, method, inst.problem);
    const RecoveryResult res = method.kind == MethodSpec::Kind::ExpDol
                                   ? run(inst.problem, cfg)
                                   : baseline_sbl(inst.problem, cfg);

    out.row_power = res.X_hat.rowwise().squaredNorm();
    out.leakage = doa_leakage(inst.true_support, res.X_hat);
    const SupportScore score =
        support_score(inst.true_support, res.X_hat, config.f1_delta);
    out.recall = score.recall;
    out.f1 = score.f1;
    out.nse = inst.problem.ground_truth
                  ? nse(*inst.problem.ground_truth, res.X_hat)
                  : nan_value();
    out.wall_time_s = res.wall_time_s;
    out.converged = res.converged;
    out.outer_iters = res.outer_iters_used;
    result.rows[idx] = std::move(out);
  });
  return result;
}

void write_doa_outputs(const ExperimentConfig& config,
                       const DoaResult& result) {
  const std::string dir = config.output_dir + "/doa";
  fs::create_directories(dir);

  std::ostringstream summary;
  summary << "method,trial,leakage_fraction,recall,f1,nse,wall_time_s,"
             "converged,outer_iters\n";
  for (const auto& row : result.rows) {
    summary << row.method << ',' << row.trial << ',' << fmt(row.leakage) << ','
            << fmt(row.recall) << ',' << fmt(row.f1) << ',' << fmt(row.nse)
            << ',' << fmt(row.wall_time_s) << ',' << (row.converged ? 1 : 0)
            << ',' << row.outer_iters << '\n';
  }
  write_file(dir + "/summary.csv", summary.str());

  for (const auto& row : result.rows) {
    const std::string method_dir = dir + "/" + row.method;
    fs::create_directories(method_dir);
    std::ostringstream os;
    os << "u,power\n";
    for (Index k = 0; k < result.grid.size(); ++k) {
      os << fmt_short(result.grid[k]) << ',' << fmt(row.row_power[k]) << '\n';
    }
    write_file(method_dir + "/power_trial" + std::to_string(row.trial) +
                   ".csv",
               os.str());
  }
}

}  // namespace expdol
