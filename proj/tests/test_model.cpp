#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <sstream>

#include "expdol/matrix_io.hpp"
#include "expdol/model.hpp"
#include "expdol/objective.hpp"
#include "test_helpers.hpp"

using namespace expdol;
using testutil::randn_matrix;
using testutil::random_hp;
using testutil::random_problem;

TEST_CASE("covariance assembles identity cases exactly") {
  const ComplexMatrix eye = ComplexMatrix::Identity(2, 2);

  Hyperparameters hp{RealVector::Zero(2), 0.0};
  CHECK((assemble_covariance(eye, hp) - 2.0 * eye).norm() == doctest::Approx(0.0));

  hp.z = RealVector::Constant(2, std::log(3.0));
  hp.beta = std::log(2.0);
  CHECK((assemble_covariance(eye, hp) - 5.0 * eye).norm() <= 1e-14);
}

TEST_CASE("covariance matches rank-one summation oracle") {
  std::mt19937_64 rng(11);
  const ComplexMatrix h = randn_matrix(4, 6, rng);
  const Hyperparameters hp = random_hp(6, rng);

  // Direct summation e^beta I + sum_n e^{z_n} h_n h_n^H.
  ComplexMatrix oracle = std::exp(hp.beta) * ComplexMatrix::Identity(4, 4);
  for (Index n = 0; n < 6; ++n) {
    oracle += std::exp(hp.z[n]) * h.col(n) * h.col(n).adjoint();
  }
  const ComplexMatrix sigma = assemble_covariance(h, hp);
  CHECK((sigma - oracle).norm() / oracle.norm() <= 1e-13);
}

TEST_CASE("covariance is Hermitian positive definite") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix h = randn_matrix(5, 9, rng);
    const ComplexMatrix sigma = assemble_covariance(h, random_hp(9, rng));
    CHECK((sigma - sigma.adjoint()).norm() / sigma.norm() < 1e-12);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(sigma);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("covariance rejects dimension mismatch") {
  const ComplexMatrix h = ComplexMatrix::Identity(2, 2);
  CHECK_THROWS_AS(assemble_covariance(h, Hyperparameters{RealVector::Zero(3), 0.0}),
                  ContractViolation);
}

TEST_CASE("posterior mean is zero for zero measurements") {
  std::mt19937_64 rng(13);
  ProblemInstance p = random_problem(4, 6, 3, rng);
  p.Y.setZero();
  CHECK(posterior_mean(p, random_hp(6, rng)).norm() == 0.0);
}

TEST_CASE("posterior mean solves the diagonal system by hand") {
  std::mt19937_64 rng(14);
  const Index n = 5, l = 2;
  ProblemInstance p;
  p.H = ComplexMatrix::Identity(n, n);
  p.Y = randn_matrix(n, l, rng);
  const Hyperparameters hp = random_hp(n, rng);

  const ComplexMatrix theta = posterior_mean(p, hp, SolveMode::Normal);
  for (Index i = 0; i < n; ++i) {
    const double w =
        std::exp(hp.z[i]) / (std::exp(hp.z[i]) + std::exp(hp.beta));
    CHECK((theta.row(i) - w * p.Y.row(i)).norm() <= 1e-12 * p.Y.row(i).norm());
  }
}

TEST_CASE("posterior mean matches the explicit-inverse oracle") {
  std::mt19937_64 rng(15);
  const ProblemInstance p = random_problem(4, 6, 2, rng);
  const Hyperparameters hp = random_hp(6, rng);

  const double inv_lambda = std::exp(-hp.beta);
  ComplexMatrix a = inv_lambda * (p.H.adjoint() * p.H);
  a.diagonal() += (-hp.z).array().exp().matrix().cast<Complex>();
  const ComplexMatrix oracle = inv_lambda * a.inverse() * p.H.adjoint() * p.Y;

  for (SolveMode mode : {SolveMode::Normal, SolveMode::Woodbury}) {
    const ComplexMatrix theta = posterior_mean(p, hp, mode);
    CHECK((theta - oracle).norm() / oracle.norm() < 1e-10);
  }
}

TEST_CASE("posterior mean satisfies the normal equations") {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    const ProblemInstance p = random_problem(5, 8, 3, rng);
    const Hyperparameters hp = random_hp(8, rng, 0.8);
    const ComplexMatrix theta = posterior_mean(p, hp);

    const double inv_lambda = std::exp(-hp.beta);
    ComplexMatrix a = inv_lambda * (p.H.adjoint() * p.H);
    a.diagonal() += (-hp.z).array().exp().matrix().cast<Complex>();
    const ComplexMatrix rhs = inv_lambda * p.H.adjoint() * p.Y;
    CHECK((a * theta - rhs).norm() / rhs.norm() < 1e-8);
  }
}

TEST_CASE("both solve routes agree") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const ProblemInstance p = random_problem(4, 9, 2, rng);
    const Hyperparameters hp = random_hp(9, rng);
    const ComplexMatrix a = posterior_mean(p, hp, SolveMode::Normal);
    const ComplexMatrix b = posterior_mean(p, hp, SolveMode::Woodbury);
    CHECK((a - b).norm() / a.norm() < 1e-8);
  }
}

TEST_CASE("ill-conditioned systems raise a conditioning error") {
  std::mt19937_64 rng(18);
  ProblemInstance p = random_problem(3, 3, 1, rng);
  Hyperparameters hp{RealVector::Zero(3), 0.0};
  hp.z << 80.0, -80.0, 0.0;
  CHECK_THROWS_AS(posterior_mean(p, hp, SolveMode::Normal), ConditioningError);
  try {
    posterior_mean(p, hp, SolveMode::Normal);
  } catch (const ConditioningError& e) {
    CHECK(e.rcond_estimate() < kRcondFloor);
  }
}

TEST_CASE("majorizer bound is tight at the posterior mean") {
  // Right side of the trace majorization evaluated at theta = posterior
  // mean reproduces tr(Y^H Sigma^{-1} Y).
  std::mt19937_64 rng(19);
  const ProblemInstance p = random_problem(4, 6, 2, rng);
  const Hyperparameters hp = random_hp(6, rng, 0.7);
  const ComplexMatrix theta = posterior_mean(p, hp);

  const double bound = surrogate_cost(p, hp, theta, PriorConfig{}, 0.0).data_term;
  const double exact = cost_transformed(p, hp, PriorConfig{}, 0.0).data_term;
  CHECK(std::abs(bound - exact) / std::abs(exact) < 1e-8);
}

TEST_CASE("difference matrix definition") {
  const auto d3 = difference_matrix(3);
  RealMatrix dense = RealMatrix(d3);
  RealMatrix expected(2, 3);
  expected << -1, 1, 0, 0, -1, 1;
  CHECK((dense - expected).norm() == 0.0);

  const auto d2 = difference_matrix(2);
  RealVector v(2);
  v << 4, 9;
  CHECK((d2 * v)(0) == doctest::Approx(5.0));

  CHECK((difference_matrix(5) * RealVector::Constant(5, 3.7)).norm() == 0.0);
  CHECK_THROWS_AS(difference_matrix(1), ContractViolation);
}

TEST_CASE("telescoping total variation of monotone vectors") {
  std::mt19937_64 rng(20);
  RealVector v = testutil::randn_vector(9, rng).array().abs();
  std::sort(v.data(), v.data() + v.size());
  const auto d = difference_matrix(9);
  CHECK((d * v).lpNorm<1>() ==
        doctest::Approx(std::abs(v[8] - v[0])).epsilon(1e-12));
  CHECK(total_variation(v) ==
        doctest::Approx(std::abs(v[8] - v[0])).epsilon(1e-12));
}

TEST_CASE("matrix text format round-trips bit exactly") {
  std::mt19937_64 rng(21);
  ComplexMatrix m = randn_matrix(5, 3, rng);
  m(0, 0) = Complex(1e-300, -1e300);
  m(1, 2) = Complex(-0.1, 1.0 / 3.0);
  m(4, 2) = Complex(0.0, 0.0);

  std::stringstream ss;
  write_complex_matrix(ss, m);
  const ComplexMatrix back = read_complex_matrix(ss);
  REQUIRE(back.rows() == m.rows());
  REQUIRE(back.cols() == m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      CHECK(back(i, j).real() == m(i, j).real());
      CHECK(back(i, j).imag() == m(i, j).imag());
    }
  }
}

TEST_CASE("matrix reader rejects malformed input") {
  std::stringstream bad_header("complex-vector 2 2\n");
  CHECK_THROWS(read_complex_matrix(bad_header));
  std::stringstream truncated("complex-matrix 2 2\n1+0j 2+0j\n3+0j\n");
  CHECK_THROWS(read_complex_matrix(truncated));
  std::stringstream nonfinite("complex-matrix 1 1\nnan+0j\n");
  CHECK_THROWS(read_complex_matrix(nonfinite));
}
