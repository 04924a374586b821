#include "expdol/model.hpp"

#include <Eigen/Cholesky>

#include <string>

namespace expdol {

void ProblemInstance::validate() const {
  if (H.rows() != Y.rows()) {
    throw ContractViolation("ProblemInstance: H and Y row counts differ");
  }
  if (!all_finite(H) || !all_finite(Y)) {
    throw ContractViolation("ProblemInstance: nonfinite entries");
  }
  if (ground_truth) {
    if (ground_truth->rows() != H.cols() || ground_truth->cols() != Y.cols()) {
      throw ContractViolation("ProblemInstance: ground truth shape mismatch");
    }
  }
  if (true_noise_variance && !(*true_noise_variance >= 0.0)) {
    throw ContractViolation("ProblemInstance: negative noise variance");
  }
}

ComplexMatrix assemble_covariance(const ComplexMatrix& H,
                                  const Hyperparameters& hp) {
  if (H.cols() != hp.z.size()) {
    throw ContractViolation("assemble_covariance: H has " +
                            std::to_string(H.cols()) + " columns but z has " +
                            std::to_string(hp.z.size()) + " entries");
  }
  const RealVector gamma = hp.z.array().exp();
  ComplexMatrix sigma = H * gamma.asDiagonal() * H.adjoint();
  sigma.diagonal().array() += std::exp(hp.beta);
  return sigma;
}

namespace {

Eigen::LLT<ComplexMatrix> checked_llt(const ComplexMatrix& a,
                                      const char* context) {
  Eigen::LLT<ComplexMatrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw ConditioningError(std::string(context) +
                                ": Cholesky factorization failed",
                            0.0);
  }
  const double rcond = llt.rcond();
  if (rcond < kRcondFloor) {
    throw ConditioningError(std::string(context) +
                                ": reciprocal condition estimate " +
                                std::to_string(rcond) + " below cap",
                            rcond);
  }
  return llt;
}

}  // namespace

ComplexMatrix posterior_mean(const ComplexMatrix& H, const ComplexMatrix& Y,
                             const Hyperparameters& hp, SolveMode mode) {
  if (H.rows() != Y.rows()) {
    throw ContractViolation("posterior_mean: H and Y row counts differ");
  }
  if (H.cols() != hp.z.size()) {
    throw ContractViolation("posterior_mean: z length mismatch");
  }
  if (mode == SolveMode::Auto) {
    mode = H.rows() < H.cols() ? SolveMode::Woodbury : SolveMode::Normal;
  }
  if (mode == SolveMode::Woodbury) {
    const RealVector gamma = hp.z.array().exp();
    const auto llt = checked_llt(assemble_covariance(H, hp),
                                 "posterior_mean (Woodbury)");
    return gamma.asDiagonal() * (H.adjoint() * llt.solve(Y));
  }
  const double inv_lambda = std::exp(-hp.beta);
  ComplexMatrix a = inv_lambda * (H.adjoint() * H);
  a.diagonal() += (-hp.z).array().exp().matrix().cast<Complex>();
  const auto llt = checked_llt(a, "posterior_mean");
  return inv_lambda * llt.solve(H.adjoint() * Y).eval();
}

Eigen::SparseMatrix<double> difference_matrix(Index n) {
  if (n < 2) {
    throw ContractViolation("difference_matrix: need n >= 2");
  }
  Eigen::SparseMatrix<double> d(n - 1, n);
  d.reserve(Eigen::VectorXi::Constant(n, 2));
  for (Index i = 0; i < n - 1; ++i) {
    d.insert(i, i) = -1.0;
    d.insert(i, i + 1) = 1.0;
  }
  d.makeCompressed();
  return d;
}

double total_variation(const RealVector& v) {
  double sum = 0.0;
  for (Index i = 0; i + 1 < v.size(); ++i) {
    sum += std::abs(v[i + 1] - v[i]);
  }
  return sum;
}

}  // namespace expdol
