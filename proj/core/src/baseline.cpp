#include <Eigen/Cholesky>

#include <chrono>
#include <cmath>

#include "expdol/model.hpp"
#include "expdol/objective.hpp"
#include "expdol/solver.hpp"

namespace expdol {

namespace {

// Keeps gamma strictly positive so the traced cost stays evaluable; EM never
// reaches zero exactly, but long runs can underflow.
constexpr double kGammaFloor = 1e-300;

}  // namespace

RecoveryResult baseline_sbl(const ProblemInstance& p,
                            const SolverConfig& config) {
  p.validate();
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const Index m = p.m();
  const Index n = p.n();
  const Index l = p.l();
  const double ld = static_cast<double>(l);
  const bool fixed = config.noise_mode == NoiseMode::Fixed;

  RealVector gamma = RealVector::Ones(n);
  double lambda = fixed ? std::exp(config.fixed_beta) : 1.0;

  RecoveryResult res;
  ComplexMatrix mu = ComplexMatrix::Zero(n, l);
  bool converged = false;
  int iters = 0;

  auto posterior_stats = [&](ComplexMatrix& mu_out, RealVector& h_quad) {
    ComplexMatrix sigma_y = p.H * gamma.asDiagonal() * p.H.adjoint();
    sigma_y.diagonal().array() += lambda;
    Eigen::LLT<ComplexMatrix> llt(sigma_y);
    if (llt.info() != Eigen::Success || llt.rcond() < kRcondFloor) {
      throw ConditioningError("baseline_sbl: covariance rcond below cap",
                              llt.rcond());
    }
    mu_out = gamma.asDiagonal() * (p.H.adjoint() * llt.solve(p.Y));
    h_quad = (p.H.conjugate().cwiseProduct(llt.solve(p.H)))
                 .colwise()
                 .sum()
                 .real();
  };

  for (int it = 1; it <= config.max_outer_iters; ++it) {
    RealVector h_quad;
    posterior_stats(mu, h_quad);

    // E-step quantities: posterior variance diag(Sigma_x)_n = gamma_n (1 -
    // gamma_n q_n) with q_n = h_n^H Sigma_Y^{-1} h_n.
    const RealVector gq = gamma.cwiseProduct(h_quad);
    const RealVector post_var =
        gamma.cwiseProduct((1.0 - gq.array()).matrix());

    RealVector gamma_new =
        mu.rowwise().squaredNorm() / ld + post_var;
    gamma_new = gamma_new.cwiseMax(kGammaFloor);

    double lambda_new = lambda;
    if (!fixed) {
      const double residual_sq = (p.Y - p.H * mu).squaredNorm();
      lambda_new =
          (residual_sq / ld + lambda * gq.sum()) / static_cast<double>(m);
    }

    const double delta = (gamma_new - gamma).lpNorm<Eigen::Infinity>();
    gamma = std::move(gamma_new);
    lambda = lambda_new;
    iters = it;

    res.cost_trace.push_back(
        cost_original(p, gamma, lambda, config.prior, 0.0));
    if (delta <= config.tolerance) {
      converged = true;
      break;
    }
  }

  // Final posterior mean at the committed hyperparameters.
  RealVector h_quad;
  posterior_stats(mu, h_quad);

  res.X_hat = std::move(mu);
  res.gamma_hat = gamma;
  res.lambda_hat = lambda;
  res.outer_iters_used = iters;
  res.converged = converged;
  res.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return res;
}

}  // namespace expdol
