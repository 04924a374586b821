#pragma once

#include <Eigen/SparseCore>

#include "expdol/types.hpp"

namespace expdol {

/// Solves below this reciprocal-condition estimate abort with a
/// ConditioningError; exp(-z) spans many decades once sparsity emerges, so
/// the cap is deliberately loose.
inline constexpr double kRcondFloor = 1e-14;

/// Measurement covariance under the Gaussian model:
///   Sigma_Y = exp(beta) I_M + H diag(exp(z)) H^H.
/// Hermitian positive definite for finite (z, beta).
ComplexMatrix assemble_covariance(const ComplexMatrix& H,
                                  const Hyperparameters& hp);

/// Which linear-system form posterior_mean factorizes.
enum class SolveMode {
  Auto,      // Woodbury when M < N, otherwise the N x N normal form
  Normal,    // N x N system exp(-beta) H^H H + diag(exp(-z))
  Woodbury,  // M x M system exp(beta) I + H diag(exp(z)) H^H
};

/// Posterior mean of X given hyperparameters:
///   Theta = exp(-beta) (exp(-beta) H^H H + diag(exp(-z)))^{-1} H^H Y.
/// Both factorization routes agree to ~1e-10 relative; each is a Cholesky
/// solve guarded by kRcondFloor (throws ConditioningError beyond it).
ComplexMatrix posterior_mean(const ComplexMatrix& H, const ComplexMatrix& Y,
                             const Hyperparameters& hp,
                             SolveMode mode = SolveMode::Auto);

inline ComplexMatrix posterior_mean(const ProblemInstance& p,
                                    const Hyperparameters& hp,
                                    SolveMode mode = SolveMode::Auto) {
  return posterior_mean(p.H, p.Y, hp, mode);
}

/// First-difference operator D ((n-1) x n): (Dv)_i = v_{i+1} - v_i.
/// Requires n >= 2.
Eigen::SparseMatrix<double> difference_matrix(Index n);

/// ||D v||_1 evaluated without materializing D; returns 0 for n <= 1.
double total_variation(const RealVector& v);

}  // namespace expdol
