#pragma once

#include "expdol/types.hpp"

#include <vector>

namespace expdol {

/// Inverse-Gamma hyperprior on the signal variances and the noise variance.
/// a0 is the shape, b0 the scale; both must be finite and nonnegative. The
/// near-noninformative default keeps the prior from dominating while still
/// bounding exp(-z) away from blowup.
struct PriorConfig {
  double a0 = 1e-6;
  double b0 = 1e-6;

  void validate() const {
    if (!(a0 >= 0.0) || !(b0 >= 0.0) || !std::isfinite(a0) ||
        !std::isfinite(b0)) {
      throw ContractViolation("PriorConfig: a0 and b0 must be finite and >= 0");
    }
  }
};

/// One evaluation of the cost, split into its four summands.
/// total is the literal sum of the component fields.
struct CostBreakdown {
  double logdet_term = 0.0;  // L * log|Sigma_Y|
  double data_term = 0.0;    // trace term, or its majorized bound
  double prior_term = 0.0;   // R(z, beta)
  double tv_term = 0.0;      // tau * ||D z||_1
  double total = 0.0;

  static CostBreakdown of(double logdet, double data, double prior,
                          double tv) {
    return {logdet, data, prior, tv, logdet + data + prior + tv};
  }
};

/// Negative log posterior in the variance domain:
///   L log|Sigma_Y| + tr(Y^H Sigma_Y^{-1} Y) + tau ||D log(gamma)||_1
///   + sum_n [(a0+1) log gamma_n + b0/gamma_n] + (a0+1) log lambda + b0/lambda
/// with Sigma_Y = lambda I + H diag(gamma) H^H. Requires gamma > 0 and
/// lambda > 0 entrywise. The log-determinant comes from a Cholesky factor,
/// never from a raw determinant.
CostBreakdown cost_original(const ProblemInstance& p, const RealVector& gamma,
                            double lambda, const PriorConfig& prior,
                            double tau);

/// Same cost after the exponential reparameterization gamma = exp(z),
/// lambda = exp(beta); evaluated directly in (z, beta) coordinates.
CostBreakdown cost_transformed(const ProblemInstance& p,
                               const Hyperparameters& hp,
                               const PriorConfig& prior, double tau);

/// Majorizing surrogate at the point theta:
///   L log|Sigma_Y| + exp(-beta) ||Y - H theta||_F^2
///   + tr(theta^H diag(exp(-z)) theta) + R(z, beta) + tau ||D z||_1.
/// Dominates cost_transformed everywhere and touches it where theta is the
/// posterior mean of the expansion point.
CostBreakdown surrogate_cost(const ProblemInstance& p,
                             const Hyperparameters& hp,
                             const ComplexMatrix& theta,
                             const PriorConfig& prior, double tau);

/// The smooth convex subproblem obtained by splitting the TV term away from
/// the surrogate: given theta and the splitting vector v = u - d,
///   F(z, beta) = L log|Sigma_Y| + exp(-beta) r2
///              + sum_n exp(-z_n) t_n + R(z, beta) + rho/2 ||D z - v||^2
/// with r2 = ||Y - H theta||_F^2 and t_n the squared norm of row n of theta.
/// Exposes value and analytic gradient; one covariance factorization per
/// evaluation.
class SmoothSubproblem {
 public:
  /// v must have length N-1 (empty when N == 1).
  SmoothSubproblem(const ProblemInstance& p, const ComplexMatrix& theta,
                   const PriorConfig& prior, double rho, RealVector v);

  double value(const Hyperparameters& hp) const;
  /// Returns the objective and fills the gradient:
  ///   dF/dz_n  = L e^{z_n} h_n^H Sigma^{-1} h_n + (a0+1)
  ///              - (b0 + t_n) e^{-z_n} + rho [D^T (D z - v)]_n
  ///   dF/dbeta = L e^{beta} tr(Sigma^{-1}) + (a0+1) - (b0 + r2) e^{-beta}
  double value_and_gradient(const Hyperparameters& hp, RealVector& grad_z,
                            double& grad_beta) const;

  double residual_sq() const { return residual_sq_; }
  const RealVector& theta_row_sq() const { return theta_row_sq_; }

 private:
  const ComplexMatrix& h_;
  Index l_;
  PriorConfig prior_;
  double rho_;
  RealVector v_;
  double residual_sq_;
  RealVector theta_row_sq_;
};

struct SmoothGradient {
  RealVector z;
  double beta = 0.0;
};

/// Analytic gradient of the smooth subproblem at hp (see SmoothSubproblem).
SmoothGradient smooth_subproblem_gradient(const ProblemInstance& p,
                                          const Hyperparameters& hp,
                                          const ComplexMatrix& theta,
                                          const PriorConfig& prior, double rho,
                                          const RealVector& v);

}  // namespace expdol
