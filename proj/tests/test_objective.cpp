#include <doctest.h>

#include "expdol/model.hpp"
#include "expdol/objective.hpp"
#include "expdol/validation.hpp"
#include "test_helpers.hpp"

using namespace expdol;
using testutil::randn_matrix;
using testutil::random_hp;
using testutil::random_problem;

namespace {

// Term-by-term oracle for the variance-domain cost with explicit inverses;
// shares nothing with the library evaluation path.
double oracle_cost(const ProblemInstance& p, const RealVector& gamma,
                   double lambda, const PriorConfig& prior, double tau) {
  const Index m = p.m();
  ComplexMatrix sigma = lambda * ComplexMatrix::Identity(m, m);
  for (Index n = 0; n < p.n(); ++n) {
    sigma += gamma[n] * p.H.col(n) * p.H.col(n).adjoint();
  }
  double total = static_cast<double>(p.l()) *
                 std::log(sigma.determinant().real());
  total += (p.Y.adjoint() * sigma.inverse() * p.Y).trace().real();
  for (Index n = 0; n + 1 < p.n(); ++n) {
    total += tau * std::abs(std::log(gamma[n + 1]) - std::log(gamma[n]));
  }
  for (Index n = 0; n < p.n(); ++n) {
    total += (prior.a0 + 1.0) * std::log(gamma[n]) + prior.b0 / gamma[n];
  }
  total += (prior.a0 + 1.0) * std::log(lambda) + prior.b0 / lambda;
  return total;
}

}  // namespace

TEST_CASE("change of variables is exact") {
  std::mt19937_64 rng(31);
  const PriorConfig prior{0.3, 0.7};
  for (int trial = 0; trial < 50; ++trial) {
    const ProblemInstance p = random_problem(4, 6, 2, rng);
    const Hyperparameters hp = random_hp(6, rng, 0.8);
    const double tau = 0.4;
    const double a =
        cost_original(p, hp.z.array().exp(), std::exp(hp.beta), prior, tau)
            .total;
    const double b = cost_transformed(p, hp, prior, tau).total;
    CHECK(std::abs(a - b) / std::max(std::abs(b), 1.0) < 1e-10);
  }
}

TEST_CASE("scalar instance evaluates to log 2") {
  ProblemInstance p;
  p.H = ComplexMatrix::Identity(1, 1);
  p.Y = ComplexMatrix::Zero(1, 1);
  const auto cost =
      cost_original(p, RealVector::Ones(1), 1.0, PriorConfig{0.0, 0.0}, 0.0);
  CHECK(cost.total == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(cost.logdet_term == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(cost.data_term == 0.0);
  CHECK(cost.prior_term == 0.0);
  CHECK(cost.tv_term == 0.0);
}

TEST_CASE("costs match the term-by-term oracle") {
  std::mt19937_64 rng(32);
  const PriorConfig prior{0.2, 0.5};
  for (int trial = 0; trial < 10; ++trial) {
    const ProblemInstance p = random_problem(4, 6, 2, rng);
    const Hyperparameters hp = random_hp(6, rng, 0.7);
    const RealVector gamma = hp.z.array().exp();
    const double lambda = std::exp(hp.beta);
    const double tau = 0.3;

    const double expected = oracle_cost(p, gamma, lambda, prior, tau);
    const double via_original = cost_original(p, gamma, lambda, prior, tau).total;
    const double via_transformed = cost_transformed(p, hp, prior, tau).total;
    CHECK(std::abs(via_original - expected) / std::abs(expected) < 1e-8);
    CHECK(std::abs(via_transformed - expected) / std::abs(expected) < 1e-8);
  }
}

TEST_CASE("cost breakdown sums to total") {
  std::mt19937_64 rng(33);
  const ProblemInstance p = random_problem(5, 7, 3, rng);
  const auto cost = cost_transformed(p, random_hp(7, rng), PriorConfig{}, 0.2);
  const double sum =
      cost.logdet_term + cost.data_term + cost.prior_term + cost.tv_term;
  CHECK(std::abs(cost.total - sum) <= 1e-12 * std::abs(cost.total));
}

TEST_CASE("uniform shift moves the log-determinant by L*M*c") {
  std::mt19937_64 rng(34);
  const Index m = 5, l = 3;
  ProblemInstance p;
  p.H = ComplexMatrix::Identity(m, m);
  p.Y = ComplexMatrix::Zero(m, l);
  const PriorConfig prior{0.0, 0.0};
  Hyperparameters hp = random_hp(m, rng);

  const double c = 0.37;
  const double before = cost_transformed(p, hp, prior, 0.0).logdet_term;
  hp.z.array() += c;
  hp.beta += c;
  const double after = cost_transformed(p, hp, prior, 0.0).logdet_term;
  CHECK(after - before == doctest::Approx(l * m * c).epsilon(1e-10));
}

TEST_CASE("constant z has zero TV cost") {
  std::mt19937_64 rng(35);
  const ProblemInstance p = random_problem(4, 6, 2, rng);
  Hyperparameters hp{RealVector::Constant(6, -1.3), 0.2};
  CHECK(cost_transformed(p, hp, PriorConfig{}, 5.0).tv_term == 0.0);
}

TEST_CASE("nonpositive gamma or lambda violates the contract") {
  std::mt19937_64 rng(36);
  const ProblemInstance p = random_problem(3, 4, 1, rng);
  RealVector gamma = RealVector::Ones(4);
  CHECK_THROWS_AS(cost_original(p, gamma, 0.0, PriorConfig{}, 0.0),
                  ContractViolation);
  gamma[2] = -1.0;
  CHECK_THROWS_AS(cost_original(p, gamma, 1.0, PriorConfig{}, 0.0),
                  ContractViolation);
}

TEST_CASE("surrogate dominates and touches the transformed cost") {
  std::mt19937_64 rng(37);
  const PriorConfig prior{};
  const double tau = 0.2;
  for (int trial = 0; trial < 100; ++trial) {
    const ProblemInstance p = random_problem(4, 6, 2, rng);
    const Hyperparameters anchor = random_hp(6, rng, 0.6);
    const ComplexMatrix theta = posterior_mean(p, anchor);

    const Hyperparameters probe = random_hp(6, rng);
    const double g = surrogate_cost(p, probe, theta, prior, tau).total;
    const double f = cost_transformed(p, probe, prior, tau).total;
    CHECK(g >= f - 1e-9);

    const double g0 = surrogate_cost(p, anchor, theta, prior, tau).total;
    const double f0 = cost_transformed(p, anchor, prior, tau).total;
    CHECK(std::abs(g0 - f0) / std::max(std::abs(f0), 1.0) < 1e-8);
  }
}

TEST_CASE("surrogate data terms collapse at theta = 0") {
  std::mt19937_64 rng(38);
  const ProblemInstance p = random_problem(4, 6, 2, rng);
  const Hyperparameters hp = random_hp(6, rng);
  const auto cost =
      surrogate_cost(p, hp, ComplexMatrix::Zero(6, 2), PriorConfig{}, 0.0);
  CHECK(cost.data_term ==
        doctest::Approx(std::exp(-hp.beta) * p.Y.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("analytic gradient agrees with central finite differences") {
  const auto report = validation::check_gradient(20, 41, 1e-5);
  INFO(report.summary());
  CHECK(report.passed());
}

TEST_CASE("gradient checker flags an injected sign error") {
  validation::GradientFn broken =
      [](const ProblemInstance& p, const Hyperparameters& hp,
         const ComplexMatrix& theta, const PriorConfig& prior, double rho,
         const RealVector& v) {
        SmoothGradient g =
            smooth_subproblem_gradient(p, hp, theta, prior, rho, v);
        g.z = -g.z;
        return g;
      };
  const auto report = validation::check_gradient(3, 41, 1e-5, broken);
  CHECK_FALSE(report.passed());
}

TEST_CASE("log-determinant convexity checks") {
  SUBCASE("scalar diagonal case has no violations") {
    ComplexMatrix h(1, 1);
    h(0, 0) = 1.7;
    const auto report = validation::check_logdet_convexity(h, 200, 5);
    INFO(report.summary());
    CHECK(report.passed());
  }
  SUBCASE("random 4x6 dictionary, 1000 trials") {
    std::mt19937_64 rng(7);
    const ComplexMatrix h = randn_matrix(4, 6, rng);
    const auto report = validation::check_logdet_convexity(h, 1000, 7);
    INFO(report.summary());
    CHECK(report.passed());
    CHECK(report.max_violation <= 1e-9);
  }
  SUBCASE("endpoints are exact") {
    std::mt19937_64 rng(8);
    const ComplexMatrix h = randn_matrix(3, 5, rng);
    const Hyperparameters a = random_hp(5, rng);
    const Hyperparameters b = random_hp(5, rng);
    ProblemInstance p;
    p.H = h;
    p.Y = ComplexMatrix::Zero(3, 1);
    auto logdet = [&](const Hyperparameters& hp) {
      return cost_transformed(p, hp, PriorConfig{0.0, 0.0}, 0.0).logdet_term;
    };
    for (double t : {0.0, 1.0}) {
      const Hyperparameters mix{t * a.z + (1.0 - t) * b.z,
                                t * a.beta + (1.0 - t) * b.beta};
      const double lhs = logdet(mix);
      const double rhs = t * logdet(a) + (1.0 - t) * logdet(b);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST_CASE("smooth subproblem objective is midpoint convex") {
  const auto report = validation::check_smooth_objective_convexity(200, 43);
  INFO(report.summary());
  CHECK(report.passed());
}

TEST_CASE("realification determinant identity") {
  SUBCASE("identity") {
    const auto pair =
        validation::realification_determinant_check(ComplexMatrix::Identity(2, 2));
    CHECK(pair.det_realified == doctest::Approx(1.0));
    CHECK(pair.det_squared == doctest::Approx(1.0));
  }
  SUBCASE("real diagonal") {
    ComplexMatrix u = ComplexMatrix::Zero(2, 2);
    u(0, 0) = 2.0;
    u(1, 1) = 3.0;
    const auto pair = validation::realification_determinant_check(u);
    CHECK(pair.det_realified == doctest::Approx(36.0));
    CHECK(pair.det_squared == doctest::Approx(36.0));
  }
  SUBCASE("random Hermitian PD") {
    std::mt19937_64 rng(44);
    const ComplexMatrix a = randn_matrix(3, 3, rng);
    ComplexMatrix u = a * a.adjoint();
    u.diagonal().array() += 1.0;
    const auto pair = validation::realification_determinant_check(u);
    CHECK(std::abs(pair.det_realified - pair.det_squared) /
              std::abs(pair.det_squared) <
          1e-10);
  }
  SUBCASE("non-Hermitian input is rejected") {
    std::mt19937_64 rng(45);
    const ComplexMatrix a = randn_matrix(3, 3, rng);
    CHECK_THROWS_AS(validation::realification_determinant_check(a),
                    ContractViolation);
  }
  SUBCASE("suite over random sizes") {
    const auto report = validation::check_realification(200, 46);
    INFO(report.summary());
    CHECK(report.passed());
  }
}

TEST_CASE("majorization suite") {
  const auto report = validation::check_majorization(20, 100, 47);
  INFO(report.summary());
  CHECK(report.passed());
}
