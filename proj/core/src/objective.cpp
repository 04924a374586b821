#include "expdol/objective.hpp"

#include <Eigen/Cholesky>

#include <cmath>

#include "expdol/model.hpp"

namespace expdol {

namespace {

struct CovarianceSolve {
  Eigen::LLT<ComplexMatrix> llt;
  double logdet;  // log|Sigma_Y|
};

CovarianceSolve factor_covariance(ComplexMatrix sigma, const char* context) {
  CovarianceSolve out{Eigen::LLT<ComplexMatrix>(std::move(sigma)), 0.0};
  if (out.llt.info() != Eigen::Success) {
    throw ConditioningError(std::string(context) +
                                ": covariance factorization failed",
                            0.0);
  }
  const double rcond = out.llt.rcond();
  if (rcond < kRcondFloor) {
    throw ConditioningError(
        std::string(context) + ": covariance rcond below cap", rcond);
  }
  out.logdet = 2.0 * out.llt.matrixLLT()
                         .diagonal()
                         .real()
                         .array()
                         .log()
                         .sum();
  return out;
}

double trace_quadratic(const Eigen::LLT<ComplexMatrix>& llt,
                       const ComplexMatrix& y) {
  // tr(Y^H Sigma^{-1} Y) via the half solve L^{-1} Y.
  ComplexMatrix half = llt.matrixL().solve(y);
  return half.squaredNorm();
}

double prior_terms(const RealVector& z, double beta, const PriorConfig& prior) {
  // R(z, beta); the noise prior contributes a single summand.
  const double a1 = prior.a0 + 1.0;
  double r = a1 * beta + prior.b0 * std::exp(-beta);
  r += a1 * z.sum() + prior.b0 * (-z).array().exp().sum();
  return r;
}

}  // namespace

CostBreakdown cost_original(const ProblemInstance& p, const RealVector& gamma,
                            double lambda, const PriorConfig& prior,
                            double tau) {
  prior.validate();
  if (gamma.size() != p.n()) {
    throw ContractViolation("cost_original: gamma length mismatch");
  }
  if (!(lambda > 0.0) || !(gamma.array() > 0.0).all()) {
    throw ContractViolation("cost_original: gamma and lambda must be > 0");
  }
  ComplexMatrix sigma = p.H * gamma.asDiagonal() * p.H.adjoint();
  sigma.diagonal().array() += lambda;
  const auto cov = factor_covariance(std::move(sigma), "cost_original");

  const double logdet_term = static_cast<double>(p.l()) * cov.logdet;
  const double data_term = trace_quadratic(cov.llt, p.Y);
  const double a1 = prior.a0 + 1.0;
  double prior_term = a1 * std::log(lambda) + prior.b0 / lambda;
  prior_term += a1 * gamma.array().log().sum() +
                prior.b0 * gamma.array().inverse().sum();
  const double tv_term = tau * total_variation(gamma.array().log().matrix());
  return CostBreakdown::of(logdet_term, data_term, prior_term, tv_term);
}

CostBreakdown cost_transformed(const ProblemInstance& p,
                               const Hyperparameters& hp,
                               const PriorConfig& prior, double tau) {
  prior.validate();
  if (hp.z.size() != p.n()) {
    throw ContractViolation("cost_transformed: z length mismatch");
  }
  const auto cov =
      factor_covariance(assemble_covariance(p.H, hp), "cost_transformed");
  const double logdet_term = static_cast<double>(p.l()) * cov.logdet;
  const double data_term = trace_quadratic(cov.llt, p.Y);
  const double prior_term = prior_terms(hp.z, hp.beta, prior);
  const double tv_term = tau * total_variation(hp.z);
  return CostBreakdown::of(logdet_term, data_term, prior_term, tv_term);
}

CostBreakdown surrogate_cost(const ProblemInstance& p,
                             const Hyperparameters& hp,
                             const ComplexMatrix& theta,
                             const PriorConfig& prior, double tau) {
  prior.validate();
  if (theta.rows() != p.n() || theta.cols() != p.l()) {
    throw ContractViolation("surrogate_cost: theta must be N x L");
  }
  const auto cov =
      factor_covariance(assemble_covariance(p.H, hp), "surrogate_cost");
  const double logdet_term = static_cast<double>(p.l()) * cov.logdet;
  const double residual_sq = (p.Y - p.H * theta).squaredNorm();
  const RealVector inv_gamma = (-hp.z).array().exp();
  const double weighted_rows =
      (theta.rowwise().squaredNorm().array() * inv_gamma.array()).sum();
  const double data_term =
      std::exp(-hp.beta) * residual_sq + weighted_rows;
  const double prior_term = prior_terms(hp.z, hp.beta, prior);
  const double tv_term = tau * total_variation(hp.z);
  return CostBreakdown::of(logdet_term, data_term, prior_term, tv_term);
}

SmoothSubproblem::SmoothSubproblem(const ProblemInstance& p,
                                   const ComplexMatrix& theta,
                                   const PriorConfig& prior, double rho,
                                   RealVector v)
    : h_(p.H),
      l_(p.l()),
      prior_(prior),
      rho_(rho),
      v_(std::move(v)),
      residual_sq_((p.Y - p.H * theta).squaredNorm()),
      theta_row_sq_(theta.rowwise().squaredNorm()) {
  prior_.validate();
  if (theta.rows() != p.n() || theta.cols() != p.l()) {
    throw ContractViolation("SmoothSubproblem: theta must be N x L");
  }
  // An empty v disables the splitting penalty (the N = 1 case, and the
  // no-split reference mode).
  if (v_.size() != 0 && v_.size() != p.n() - 1) {
    throw ContractViolation("SmoothSubproblem: v must have length N-1");
  }
  if (!(rho > 0.0)) {
    throw ContractViolation("SmoothSubproblem: rho must be > 0");
  }
}

double SmoothSubproblem::value(const Hyperparameters& hp) const {
  const auto cov =
      factor_covariance(assemble_covariance(h_, hp), "SmoothSubproblem");
  double f = static_cast<double>(l_) * cov.logdet;
  f += std::exp(-hp.beta) * residual_sq_;
  f += (theta_row_sq_.array() * (-hp.z).array().exp()).sum();
  f += prior_terms(hp.z, hp.beta, prior_);
  if (v_.size() > 0) {
    RealVector dz(v_.size());
    for (Index i = 0; i < dz.size(); ++i) dz[i] = hp.z[i + 1] - hp.z[i];
    f += 0.5 * rho_ * (dz - v_).squaredNorm();
  }
  return f;
}

double SmoothSubproblem::value_and_gradient(const Hyperparameters& hp,
                                            RealVector& grad_z,
                                            double& grad_beta) const {
  const auto cov =
      factor_covariance(assemble_covariance(h_, hp), "SmoothSubproblem");

  // Sigma^{-1} H once; h_n^H Sigma^{-1} h_n are its column dots with H.
  const ComplexMatrix sigma_inv_h = cov.llt.solve(h_);
  const RealVector h_quad =
      (h_.conjugate().cwiseProduct(sigma_inv_h)).colwise().sum().real();
  // tr(Sigma^{-1}) = ||L^{-1}||_F^2.
  const ComplexMatrix linv = cov.llt.matrixL().solve(
      ComplexMatrix::Identity(h_.rows(), h_.rows()));
  const double trace_inv = linv.squaredNorm();

  const double ld = static_cast<double>(l_);
  const double a1 = prior_.a0 + 1.0;
  const RealVector exp_z = hp.z.array().exp();
  const RealVector exp_mz = (-hp.z).array().exp();
  const double exp_b = std::exp(hp.beta);
  const double exp_mb = std::exp(-hp.beta);

  double f = ld * cov.logdet + exp_mb * residual_sq_ +
             (theta_row_sq_.array() * exp_mz.array()).sum() +
             prior_terms(hp.z, hp.beta, prior_);

  grad_z = ld * exp_z.cwiseProduct(h_quad);
  grad_z.array() += a1;
  grad_z.array() -= (prior_.b0 + theta_row_sq_.array()) * exp_mz.array();
  grad_beta = ld * exp_b * trace_inv + a1 - (prior_.b0 + residual_sq_) * exp_mb;

  if (v_.size() > 0) {
    RealVector w(v_.size());
    for (Index i = 0; i < w.size(); ++i) {
      w[i] = hp.z[i + 1] - hp.z[i] - v_[i];
    }
    f += 0.5 * rho_ * w.squaredNorm();
    // D^T w accumulated in place.
    for (Index i = 0; i < w.size(); ++i) {
      grad_z[i] -= rho_ * w[i];
      grad_z[i + 1] += rho_ * w[i];
    }
  }
  return f;
}

SmoothGradient smooth_subproblem_gradient(const ProblemInstance& p,
                                          const Hyperparameters& hp,
                                          const ComplexMatrix& theta,
                                          const PriorConfig& prior, double rho,
                                          const RealVector& v) {
  SmoothSubproblem sub(p, theta, prior, rho, v);
  SmoothGradient g;
  sub.value_and_gradient(hp, g.z, g.beta);
  return g;
}

}  // namespace expdol
