#include "config_io.hpp"

#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace expdol::cli {

namespace {

using nlohmann::json;

double parse_snr(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "noiseless") {
      return std::numeric_limits<double>::infinity();
    }
    throw std::runtime_error("config: bad snr_db string '" + s + "'");
  }
  return j.get<double>();
}

SyntheticSpec parse_synthetic(const json& j) {
  SyntheticSpec spec;
  spec.m = j.value("M", spec.m);
  spec.n = j.value("N", spec.n);
  spec.l = j.value("L", spec.l);
  spec.block_count = j.value("block_count", spec.block_count);
  spec.block_length = j.value("block_length", spec.block_length);
  spec.isolated_count = j.value("isolated_count", spec.isolated_count);
  if (j.contains("snr_db")) spec.snr_db = parse_snr(j.at("snr_db"));
  spec.seed = j.value("seed", spec.seed);
  return spec;
}

DoaSpec parse_doa(const json& j) {
  DoaSpec spec;
  spec.m = j.value("M", spec.m);
  spec.grid_step = j.value("grid_step", spec.grid_step);
  spec.l = j.value("L", spec.l);
  if (j.contains("snr_db")) spec.snr_db = parse_snr(j.at("snr_db"));
  spec.seed = j.value("seed", spec.seed);
  if (j.contains("sources")) {
    spec.sources.clear();
    for (const auto& s : j.at("sources")) {
      spec.sources.push_back({s.at("u_lo").get<double>(),
                              s.at("u_hi").get<double>(),
                              s.at("amplitude").get<double>()});
    }
  }
  return spec;
}

MethodSpec parse_method(const json& j) {
  MethodSpec method;
  const std::string name = j.at("name").get<std::string>();
  if (name == "sbl") {
    method.kind = MethodSpec::Kind::BaselineSbl;
  } else if (name == "expdol") {
    method.kind = MethodSpec::Kind::ExpDol;
    const std::string noise = j.value("noise", "estimate");
    if (noise == "fixed") {
      method.noise_mode = NoiseMode::Fixed;
    } else if (noise == "estimate") {
      method.noise_mode = NoiseMode::Estimate;
    } else {
      throw std::runtime_error("config: bad noise mode '" + noise + "'");
    }
  } else {
    throw std::runtime_error("config: unknown method '" + name + "'");
  }
  return method;
}

SolverConfig parse_solver(const json& j, const SolverConfig& base) {
  SolverConfig cfg = base;
  cfg.tau = j.value("tau", cfg.tau);
  cfg.rho = j.value("rho", cfg.rho);
  cfg.prior.a0 = j.value("prior_a0", cfg.prior.a0);
  cfg.prior.b0 = j.value("prior_b0", cfg.prior.b0);
  cfg.inner_iters = j.value("inner_iters", cfg.inner_iters);
  cfg.tolerance = j.value("tolerance", cfg.tolerance);
  cfg.max_outer_iters = j.value("max_outer_iters", cfg.max_outer_iters);
  cfg.inner_solver.grad_tolerance =
      j.value("grad_tolerance", cfg.inner_solver.grad_tolerance);
  cfg.inner_solver.max_inner_steps =
      j.value("max_inner_steps", cfg.inner_solver.max_inner_steps);
  return cfg;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config " + path);
  json j;
  is >> j;

  ExperimentConfig cfg;
  if (j.contains("scenario")) {
    const auto& sc = j.at("scenario");
    const std::string type = sc.value("type", "synthetic");
    if (type == "synthetic") {
      cfg.scenario = parse_synthetic(sc);
    } else if (type == "doa") {
      cfg.scenario = parse_doa(sc);
    } else {
      throw std::runtime_error("config: unknown scenario type '" + type + "'");
    }
  }
  if (j.contains("methods")) {
    cfg.methods.clear();
    for (const auto& m : j.at("methods")) cfg.methods.push_back(parse_method(m));
  }
  if (j.contains("solver")) cfg.solver = parse_solver(j.at("solver"), cfg.solver);
  if (j.contains("snr_sweep")) {
    cfg.snr_sweep.clear();
    for (const auto& s : j.at("snr_sweep")) cfg.snr_sweep.push_back(parse_snr(s));
  }
  cfg.trials = j.value("trials", cfg.trials);
  cfg.seed_base = j.value("seed_base", cfg.seed_base);
  cfg.output_dir = j.value("output_dir", cfg.output_dir);
  cfg.threads = j.value("threads", cfg.threads);
  cfg.write_traces = j.value("traces", cfg.write_traces);
  cfg.f1_delta = j.value("f1_delta", cfg.f1_delta);
  return cfg;
}

}  // namespace expdol::cli
