#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace expdol {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Sorted, duplicate-free row indices identifying the active rows of a
/// block-sparse signal.
using SupportSet = std::vector<int>;

/// Violated precondition or type invariant (dimension mismatch, nonpositive
/// scale parameter, nonfinite entry, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A linear solve was abandoned because the reciprocal condition estimate of
/// the system fell below the documented cap.
class ConditioningError : public std::runtime_error {
 public:
  ConditioningError(const std::string& what, double rcond_estimate)
      : std::runtime_error(what), rcond_estimate_(rcond_estimate) {}
  double rcond_estimate() const { return rcond_estimate_; }

 private:
  double rcond_estimate_;
};

/// Scenario generation could not satisfy its placement constraints within the
/// retry budget, or a source interval snapped to an empty grid set.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool all_finite(const ComplexMatrix& m) { return m.allFinite(); }
inline bool all_finite(const RealVector& v) { return v.allFinite(); }

/// Multiple-measurement-vector linear model: Y = H X + noise, with Y (M x L),
/// H (M x N) and the unknown X (N x L) sharing one support across snapshots.
struct ProblemInstance {
  ComplexMatrix H;  // M x N measurement matrix
  ComplexMatrix Y;  // M x L measurements, one column per snapshot
  std::optional<ComplexMatrix> ground_truth;  // N x L, when known
  // Noise variance per entry; 0 marks a noiseless instance.
  std::optional<double> true_noise_variance;

  Index m() const { return H.rows(); }
  Index n() const { return H.cols(); }
  Index l() const { return Y.cols(); }

  /// Throws ContractViolation on dimension mismatch or nonfinite data.
  void validate() const;
};

/// Log-domain hyperparameters: per-entry signal variances gamma = exp(z) and
/// noise variance lambda = exp(beta). Finiteness is the only requirement;
/// positivity of gamma and lambda holds by construction.
struct Hyperparameters {
  RealVector z;
  double beta = 0.0;

  static Hyperparameters constant(Index n, double z_value, double beta_value) {
    Hyperparameters hp;
    hp.z = RealVector::Constant(n, z_value);
    hp.beta = beta_value;
    return hp;
  }
};

}  // namespace expdol
