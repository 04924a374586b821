#include "expdol/validation.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "expdol/model.hpp"

namespace expdol {
namespace validation {

namespace {

using Rng = std::mt19937_64;

Complex complex_gaussian(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double re = normal(rng);
  const double im = normal(rng);
  return Complex(re, im) / std::sqrt(2.0);
}

ComplexMatrix random_complex(Index rows, Index cols, Rng& rng) {
  ComplexMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = complex_gaussian(rng);
  }
  return m;
}

RealVector random_real(Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  RealVector v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

ProblemInstance random_instance(Index m, Index n, Index l, Rng& rng) {
  ProblemInstance p;
  p.H = random_complex(m, n, rng);
  p.Y = random_complex(m, l, rng);
  return p;
}

double logdet_covariance(const ComplexMatrix& h, const RealVector& z,
                         double beta) {
  Eigen::LLT<ComplexMatrix> llt(
      assemble_covariance(h, Hyperparameters{z, beta}));
  return 2.0 * llt.matrixLLT().diagonal().real().array().log().sum();
}

void record(CheckReport& report, double violation) {
  report.max_violation = std::max(report.max_violation, violation);
  if (violation > report.tolerance) ++report.violations;
}

}  // namespace

std::string CheckReport::summary() const {
  char buf[192];
  std::snprintf(buf, sizeof(buf),
                "%-24s trials=%-6d seed=%-12llu max_violation=%.3e "
                "tolerance=%.1e %s",
                suite.c_str(), trials,
                static_cast<unsigned long long>(seed), max_violation,
                tolerance, passed() ? "PASS" : "FAIL");
  return buf;
}

CheckReport check_logdet_convexity(const ComplexMatrix& H, int trials,
                                   std::uint64_t seed, double tol) {
  if (trials < 1) {
    throw ContractViolation("check_logdet_convexity: trials must be >= 1");
  }
  CheckReport report{"logdet-convexity", trials, seed, 0.0, tol, 0};
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Index n = H.cols();
  for (int trial = 0; trial < trials; ++trial) {
    const RealVector z1 = random_real(n, rng);
    const RealVector z2 = random_real(n, rng);
    const double b1 = random_real(1, rng)[0];
    const double b2 = random_real(1, rng)[0];
    const double t = unit(rng);
    const double f1 = logdet_covariance(H, z1, b1);
    const double f2 = logdet_covariance(H, z2, b2);
    const double f_mid =
        logdet_covariance(H, t * z1 + (1.0 - t) * z2, t * b1 + (1.0 - t) * b2);
    record(report, f_mid - (t * f1 + (1.0 - t) * f2));
  }
  return report;
}

CheckReport check_smooth_objective_convexity(int trials, std::uint64_t seed,
                                             double tol) {
  CheckReport report{"smooth-objective-convexity", trials, seed, 0.0, tol, 0};
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < trials; ++trial) {
    const Index m = 4, n = 7, l = 2;
    const ProblemInstance p = random_instance(m, n, l, rng);
    const ComplexMatrix theta = random_complex(n, l, rng);
    const RealVector v = random_real(n - 1, rng);
    SmoothSubproblem sub(p, theta, PriorConfig{}, 1.0, v);

    Hyperparameters p1{random_real(n, rng), random_real(1, rng)[0]};
    Hyperparameters p2{random_real(n, rng), random_real(1, rng)[0]};
    const double t = unit(rng);
    Hyperparameters mid{t * p1.z + (1.0 - t) * p2.z,
                        t * p1.beta + (1.0 - t) * p2.beta};
    record(report, sub.value(mid) -
                       (t * sub.value(p1) + (1.0 - t) * sub.value(p2)));
  }
  return report;
}

RealificationPair realification_determinant_check(const ComplexMatrix& U) {
  if (U.rows() != U.cols()) {
    throw ContractViolation("realification: U must be square");
  }
  const double asym = (U - U.adjoint()).norm();
  if (asym > 1e-12 * std::max(1.0, U.norm())) {
    throw ContractViolation("realification: U must be Hermitian");
  }
  const Index m = U.rows();
  RealMatrix big(2 * m, 2 * m);
  big.topLeftCorner(m, m) = U.real();
  big.topRightCorner(m, m) = -U.imag();
  big.bottomLeftCorner(m, m) = U.imag();
  big.bottomRightCorner(m, m) = U.real();
  const double det_u = U.determinant().real();
  return {big.determinant(), det_u * det_u};
}

CheckReport check_realification(int trials, std::uint64_t seed, double tol) {
  CheckReport report{"realification-det", trials, seed, 0.0, tol, 0};
  Rng rng(seed);
  std::uniform_int_distribution<Index> size_dist(2, 8);
  for (int trial = 0; trial < trials; ++trial) {
    const Index m = size_dist(rng);
    const ComplexMatrix a = random_complex(m, m, rng);
    ComplexMatrix u = a * a.adjoint();
    u.diagonal().array() += 1.0;
    u = 0.5 * (u + u.adjoint()).eval();  // exact Hermitian symmetry

    const auto pair = realification_determinant_check(u);
    const double rel = std::abs(pair.det_realified - pair.det_squared) /
                       std::abs(pair.det_squared);
    record(report, rel);

    // The realified matrix must be symmetric positive definite.
    RealMatrix big(2 * m, 2 * m);
    big.topLeftCorner(m, m) = u.real();
    big.topRightCorner(m, m) = -u.imag();
    big.bottomLeftCorner(m, m) = u.imag();
    big.bottomRightCorner(m, m) = u.real();
    const double sym_err = (big - big.transpose()).norm();
    Eigen::LLT<RealMatrix> llt(big);
    if (sym_err > tol * big.norm() || llt.info() != Eigen::Success) {
      ++report.violations;
      report.max_violation = std::max(report.max_violation, 1.0);
    }
  }
  return report;
}

CheckReport check_gradient(int instances, std::uint64_t seed, double tol,
                           GradientFn grad) {
  if (!grad) grad = smooth_subproblem_gradient;
  CheckReport report{"gradient-fd", instances, seed, 0.0, tol, 0};
  Rng rng(seed);
  constexpr double kStep = 1e-6;
  for (int inst = 0; inst < instances; ++inst) {
    const Index m = 4, n = 6, l = 2;
    const ProblemInstance p = random_instance(m, n, l, rng);
    const Hyperparameters hp{0.5 * random_real(n, rng),
                             0.5 * random_real(1, rng)[0]};
    const ComplexMatrix theta = posterior_mean(p, hp);
    const RealVector v = random_real(n - 1, rng);
    const double rho = 1.0;
    const PriorConfig prior{};

    const SmoothGradient analytic =
        grad(p, hp, theta, prior, rho, v);
    SmoothSubproblem sub(p, theta, prior, rho, v);

    auto central_diff = [&](auto perturb) {
      Hyperparameters hi = hp, lo = hp;
      perturb(hi, kStep);
      perturb(lo, -kStep);
      return (sub.value(hi) - sub.value(lo)) / (2.0 * kStep);
    };

    for (Index i = 0; i < n; ++i) {
      const double fd =
          central_diff([&](Hyperparameters& h, double d) { h.z[i] += d; });
      const double denom = std::max(std::abs(fd), 1.0);
      record(report, std::abs(analytic.z[i] - fd) / denom);
    }
    const double fd_beta =
        central_diff([&](Hyperparameters& h, double d) { h.beta += d; });
    record(report,
           std::abs(analytic.beta - fd_beta) / std::max(std::abs(fd_beta), 1.0));
  }
  return report;
}

CheckReport check_majorization(int instances, int probes, std::uint64_t seed) {
  CheckReport report{"majorization", instances * probes, seed, 0.0, 1e-9, 0};
  Rng rng(seed);
  const PriorConfig prior{};
  const double tau = 0.2;
  for (int inst = 0; inst < instances; ++inst) {
    const Index m = 4, n = 6, l = 2;
    const ProblemInstance p = random_instance(m, n, l, rng);
    const Hyperparameters anchor{0.5 * random_real(n, rng),
                                 0.5 * random_real(1, rng)[0]};
    const ComplexMatrix theta = posterior_mean(p, anchor);

    // Tangency at the anchor (relative 1e-8), then dominance at random
    // probes (absolute slack 1e-9).
    const double g0 = surrogate_cost(p, anchor, theta, prior, tau).total;
    const double f0 = cost_transformed(p, anchor, prior, tau).total;
    const double tangency = std::abs(g0 - f0) / std::max(std::abs(f0), 1.0);
    if (tangency > 1e-8) {
      ++report.violations;
      report.max_violation = std::max(report.max_violation, tangency);
    }

    for (int probe = 0; probe < probes; ++probe) {
      const Hyperparameters hp{random_real(n, rng), random_real(1, rng)[0]};
      const double g = surrogate_cost(p, hp, theta, prior, tau).total;
      const double f = cost_transformed(p, hp, prior, tau).total;
      record(report, f - g);  // violation when cost exceeds surrogate
    }
  }
  return report;
}

int run_all_checks(std::ostream& os, const SuiteConfig& config) {
  Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  const ComplexMatrix h =
      random_complex(config.convexity_rows, config.convexity_cols, rng);

  int failures = 0;
  auto emit = [&](const CheckReport& report) {
    os << report.summary() << '\n';
    if (!report.passed()) ++failures;
  };
  emit(check_logdet_convexity(h, config.convexity_trials, config.seed));
  emit(check_smooth_objective_convexity(
      std::max(config.convexity_trials / 10, 1), config.seed));
  emit(check_realification(config.realification_trials, config.seed));
  emit(check_gradient(config.gradient_instances, config.seed));
  emit(check_majorization(config.majorization_instances,
                          config.majorization_probes, config.seed));
  return failures;
}

}  // namespace validation
}  // namespace expdol
