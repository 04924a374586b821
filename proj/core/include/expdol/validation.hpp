#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>

#include "expdol/objective.hpp"
#include "expdol/types.hpp"

namespace expdol {
namespace validation {

/// Result of one numerical check suite; a plain-text summary() goes to CI
/// logs.
struct CheckReport {
  std::string suite;
  int trials = 0;
  std::uint64_t seed = 0;
  double max_violation = 0.0;
  double tolerance = 0.0;
  int violations = 0;

  bool passed() const { return violations == 0; }
  std::string summary() const;
};

/// Midpoint convexity of f(z, beta) = log|exp(beta) I + H diag(exp(z)) H^H|:
/// samples point pairs and interpolation weights, reports the largest
/// violation of f(t p1 + (1-t) p2) <= t f(p1) + (1-t) f(p2) + tol.
CheckReport check_logdet_convexity(const ComplexMatrix& H, int trials,
                                   std::uint64_t seed, double tol = 1e-9);

/// Same midpoint test on the full smooth subproblem objective (every term is
/// convex); random small instances are generated internally.
CheckReport check_smooth_objective_convexity(int trials, std::uint64_t seed,
                                             double tol = 1e-9);

struct RealificationPair {
  double det_realified;  // det of the 2M x 2M block matrix [[Re,-Im],[Im,Re]]
  double det_squared;    // det(U)^2
};

/// Requires Hermitian positive definite U; the caller asserts agreement of
/// the two determinants.
RealificationPair realification_determinant_check(const ComplexMatrix& U);

/// Runs realification_determinant_check on random Hermitian PD matrices of
/// sizes 2..8 and also verifies the realified matrix is symmetric PD.
CheckReport check_realification(int trials, std::uint64_t seed,
                                double tol = 1e-10);

/// Gradient callback signature matching smooth_subproblem_gradient; the
/// indirection lets tests inject a broken gradient as a mutation sentinel.
using GradientFn = std::function<SmoothGradient(
    const ProblemInstance&, const Hyperparameters&, const ComplexMatrix&,
    const PriorConfig&, double, const RealVector&)>;

/// Central finite differences (step 1e-6) against the analytic gradient on
/// random instances; violation is the per-coordinate relative error.
CheckReport check_gradient(int instances, std::uint64_t seed,
                           double tol = 1e-5, GradientFn grad = {});

/// Surrogate dominance and tangency: surrogate >= transformed cost at random
/// probe points (slack -1e-9) and equality at the majorization point
/// (relative 1e-8).
CheckReport check_majorization(int instances, int probes, std::uint64_t seed);

/// Runs the four suites above with the given sizes, streaming each summary
/// line; returns the number of failed suites.
struct SuiteConfig {
  int convexity_trials = 1000;
  int convexity_rows = 8;
  int convexity_cols = 20;
  int realification_trials = 200;
  int gradient_instances = 20;
  int majorization_instances = 20;
  int majorization_probes = 100;
  std::uint64_t seed = 7;
};
int run_all_checks(std::ostream& os, const SuiteConfig& config = {});

}  // namespace validation
}  // namespace expdol
