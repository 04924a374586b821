#include "expdol/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "expdol/model.hpp"

namespace expdol {

void SolverConfig::validate() const {
  prior.validate();
  if (!(tau >= 0.0)) throw ContractViolation("SolverConfig: tau must be >= 0");
  if (!(rho > 0.0)) throw ContractViolation("SolverConfig: rho must be > 0");
  if (!(tolerance > 0.0)) {
    throw ContractViolation("SolverConfig: tolerance must be > 0");
  }
  if (inner_iters < 1) {
    throw ContractViolation("SolverConfig: inner_iters must be >= 1");
  }
  if (max_outer_iters < 0) {
    throw ContractViolation("SolverConfig: max_outer_iters must be >= 0");
  }
  if (!(inner_solver.grad_tolerance > 0.0) || inner_solver.max_inner_steps < 1) {
    throw ContractViolation("SolverConfig: bad inner solver settings");
  }
  if (!tv_split && tau != 0.0) {
    throw ContractViolation("SolverConfig: tv_split=false requires tau == 0");
  }
  if (noise_mode == NoiseMode::Fixed && !std::isfinite(fixed_beta)) {
    throw ContractViolation("SolverConfig: fixed_beta must be finite");
  }
}

RealVector soft_threshold(const RealVector& v, double kappa) {
  if (!(kappa >= 0.0)) {
    throw ContractViolation("soft_threshold: kappa must be >= 0");
  }
  return v.array().sign() * (v.array().abs() - kappa).max(0.0);
}

namespace {

RealVector first_difference(const RealVector& z) {
  const Index m = std::max<Index>(z.size() - 1, 0);
  RealVector dz(m);
  for (Index i = 0; i < m; ++i) dz[i] = z[i + 1] - z[i];
  return dz;
}

double stop_metric(const Hyperparameters& a, const Hyperparameters& b,
                   bool include_beta) {
  double m = (a.z - b.z).lpNorm<Eigen::Infinity>();
  if (include_beta) m = std::max(m, std::abs(a.beta - b.beta));
  return m;
}

}  // namespace

Step1Result admm_step1(const ProblemInstance& p, const SolverState& state,
                       const SolverConfig& config) {
  const Index n = p.n();
  const bool fixed = config.noise_mode == NoiseMode::Fixed;
  const bool split = config.tv_split && n >= 2;

  RealVector v = split ? (state.u - state.d).eval() : RealVector(0);
  SmoothSubproblem sub(p, state.theta, config.prior, config.rho, std::move(v));

  const Index dim = fixed ? n : n + 1;
  RealVector x0(dim);
  x0.head(n) = state.hp.z;
  if (!fixed) x0[n] = state.hp.beta;

  // Line-search probes may wander into hyperparameters whose covariance is
  // numerically singular; report +inf so the search backs off.
  auto objective = [&](const RealVector& x, RealVector* grad) {
    Hyperparameters hp;
    hp.z = x.head(n);
    hp.beta = fixed ? config.fixed_beta : x[n];
    try {
      if (grad == nullptr) return sub.value(hp);
      RealVector gz;
      double gb = 0.0;
      const double f = sub.value_and_gradient(hp, gz, gb);
      grad->head(n) = gz;
      if (!fixed) (*grad)[n] = gb;
      return f;
    } catch (const ConditioningError&) {
      if (grad != nullptr) grad->setZero();
      return std::numeric_limits<double>::infinity();
    }
  };

  LbfgsOptions opts;
  opts.grad_tolerance = config.inner_solver.grad_tolerance;
  opts.max_steps = config.inner_solver.max_inner_steps;

  Step1Result out;
  out.info = minimize_lbfgs(objective, std::move(x0), opts);
  out.hp.z = out.info.x.head(n);
  out.hp.beta = fixed ? config.fixed_beta : out.info.x[n];
  return out;
}

RealVector admm_step2(const SolverState& state, const SolverConfig& config) {
  if (state.hp.z.size() < 2) return RealVector(0);
  return soft_threshold(first_difference(state.hp.z) + state.d,
                        config.tau / config.rho);
}

RealVector admm_step3(const SolverState& state) {
  if (state.hp.z.size() < 2) return RealVector(0);
  return state.d + first_difference(state.hp.z) - state.u;
}

RecoveryResult run(const ProblemInstance& p, const SolverConfig& config,
                   const TraceSink& trace) {
  p.validate();
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const Index n = p.n();
  const Index n_split = std::max<Index>(n - 1, 0);
  const bool fixed = config.noise_mode == NoiseMode::Fixed;
  const double beta0 = fixed ? config.fixed_beta : 0.0;
  const double beta1 = fixed ? config.fixed_beta : 1.0;

  SolverState st;
  // The two seed points z^(0) = 0 and z^(1) = 1. st.hp starts at z^(0) and
  // always holds the last accepted iterate (the majorization point); the
  // dummy z^(1) only feeds the first stopping test, which is symmetric.
  st.hp = Hyperparameters{RealVector::Zero(n), beta0};
  st.hp_prev = Hyperparameters{RealVector::Ones(n), beta1};
  st.u = RealVector::Ones(n_split);
  st.d = RealVector::Ones(n_split);

  RecoveryResult res;
  bool converged = false;

  for (int k = 1;; ++k) {
    res.diagnostics.final_step_change = stop_metric(st.hp, st.hp_prev, !fixed);
    if (res.diagnostics.final_step_change <= config.tolerance) {
      converged = true;
      break;
    }
    if (k > config.max_outer_iters) break;
    st.outer_iter = k;
    st.theta = posterior_mean(p, st.hp);
    const Hyperparameters accepted = st.hp;

    for (int t = 1; t <= config.inner_iters; ++t) {
      const Hyperparameters hp_before = st.hp;
      const RealVector u_before = st.u;
      const RealVector d_before = st.d;
      Step1Result s1 = admm_step1(p, st, config);
      st.hp = std::move(s1.hp);
      if (config.tv_split) {
        st.u = admm_step2(st, config);
        st.d = admm_step3(st);
      }
      // Once (z, beta, u, d) is an exact fixpoint the remaining rounds are
      // bitwise no-ops; skip them.
      const bool stationary =
          st.hp.beta == hp_before.beta &&
          (st.hp.z.array() == hp_before.z.array()).all() &&
          (st.u.array() == u_before.array()).all() &&
          (st.d.array() == d_before.array()).all();
      res.diagnostics.clamp_events += s1.info.clamp_events;
      if (!s1.info.converged) ++res.diagnostics.inner_nonconverged;
      res.diagnostics.final_grad_norm = s1.info.grad_norm;
      if (trace) {
        TraceRecord rec;
        rec.outer = k;
        rec.inner = t;
        rec.cost = cost_transformed(p, st.hp, config.prior, config.tau);
        rec.primal_residual =
            n >= 2 ? (first_difference(st.hp.z) - st.u).norm() : 0.0;
        rec.grad_norm = s1.info.grad_norm;
        trace(rec);
      }
      if (stationary) break;
    }

    st.hp_prev = accepted;
    const CostBreakdown cost =
        cost_transformed(p, st.hp, config.prior, config.tau);
    if (!std::isfinite(cost.total)) {
      throw SolverAbort(
          "run: nonfinite cost at outer iteration " + std::to_string(k) +
              " (logdet=" + std::to_string(cost.logdet_term) +
              ", data=" + std::to_string(cost.data_term) +
              ", prior=" + std::to_string(cost.prior_term) +
              ", tv=" + std::to_string(cost.tv_term) + ")",
          k);
    }
    st.cost_trace.push_back(cost);
  }

  res.X_hat = posterior_mean(p, st.hp);
  res.gamma_hat = st.hp.z.array().exp();
  res.lambda_hat = std::exp(st.hp.beta);
  res.outer_iters_used = st.outer_iter;
  res.converged = converged;
  res.cost_trace = std::move(st.cost_trace);
  res.diagnostics.final_primal_residual =
      (config.tv_split && n >= 2)
          ? (first_difference(st.hp.z) - st.u).norm()
          : 0.0;
  res.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return res;
}

}  // namespace expdol
