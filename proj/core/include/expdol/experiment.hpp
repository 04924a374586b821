#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "expdol/metrics.hpp"
#include "expdol/scenarios.hpp"
#include "expdol/solver.hpp"

namespace expdol {

struct MethodSpec {
  enum class Kind { ExpDol, BaselineSbl };
  Kind kind = Kind::ExpDol;
  NoiseMode noise_mode = NoiseMode::Estimate;

  /// Stable identifier used in CSV rows and directory names:
  /// "expdol", "expdol-fixed" or "sbl".
  std::string label() const;
};

using ScenarioSpec = std::variant<SyntheticSpec, DoaSpec>;

struct ExperimentConfig {
  ScenarioSpec scenario;
  std::vector<MethodSpec> methods = {MethodSpec{},
                                     {MethodSpec::Kind::BaselineSbl}};
  SolverConfig solver;
  std::vector<double> snr_sweep;  // empty: use the scenario's own snr_db
  int trials = 50;
  std::uint64_t seed_base = 0;
  std::string output_dir = "out";
  int threads = 0;  // 0 = hardware concurrency
  bool write_traces = true;
  double f1_delta = 0.01;

  void validate() const;
  std::string scenario_name() const;  // "synthetic" or "doa"
};

/// One CSV row of trials.csv. Trial t of every method at every SNR sees the
/// instance generated with seed = seed_base + t, so comparisons are paired.
struct TrialRecord {
  std::string method;
  double snr_db = 0.0;
  int trial = 0;
  TrialOutcome outcome;
  bool converged = false;
  int outer_iters = 0;
  bool aborted = false;  // solver threw; metrics are NaN
};

struct AggregateRecord {
  std::string method;
  double snr_db = 0.0;
  double nse_q25 = 0.0;
  double nse_q50 = 0.0;
  double nse_q75 = 0.0;
  double f1_mean = 0.0;
  double wall_time_mean_s = 0.0;
};

struct SweepResult {
  std::vector<TrialRecord> rows;  // ordered by (snr, trial, method)
  std::vector<AggregateRecord> aggregates;
};

/// Runs the full (snr x trial x method) grid on a worker pool; rows come
/// back in deterministic order regardless of scheduling. Traces, when
/// enabled, are written under output_dir during the run.
SweepResult run_sweep(const ExperimentConfig& config);

/// trials.csv / aggregate.csv column layouts (documented, stable):
///   method,snr_db,trial,nse,f1,wall_time_s,lambda_rel_error,converged,outer_iters
///   method,snr_db,nse_q25,nse_q50,nse_q75,f1_mean,wall_time_mean_s
std::string trials_csv(const std::vector<TrialRecord>& rows);
std::string aggregate_csv(const std::vector<AggregateRecord>& rows);

/// Writes combined CSVs under <output_dir>/<scenario>/ and per-method copies
/// under <output_dir>/<scenario>/<method>/.
void write_sweep_outputs(const ExperimentConfig& config,
                         const SweepResult& result);

/// Single-scenario DOA evaluation: per (method, trial), the recovered
/// per-grid-point row power (the angular energy curve) plus leakage and
/// support metrics.
struct DoaMethodRun {
  std::string method;
  int trial = 0;
  RealVector row_power;  // length N
  double leakage = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double nse = 0.0;
  double wall_time_s = 0.0;
  bool converged = false;
  int outer_iters = 0;
};

struct DoaResult {
  std::vector<DoaMethodRun> rows;
  RealVector grid;  // u values, length N
};

DoaResult run_doa(const ExperimentConfig& config);
void write_doa_outputs(const ExperimentConfig& config, const DoaResult& result);

}  // namespace expdol
