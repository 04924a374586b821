#include <doctest.h>

#include <algorithm>
#include <random>

#include "expdol/metrics.hpp"
#include "test_helpers.hpp"

using namespace expdol;
using testutil::randn_matrix;

TEST_CASE("nse basics") {
  std::mt19937_64 rng(91);
  const ComplexMatrix x = randn_matrix(6, 3, rng);
  CHECK(nse(x, x) == 0.0);
  CHECK(nse(x, ComplexMatrix::Zero(6, 3)) == doctest::Approx(1.0));
  CHECK(nse(x, 2.0 * x) == doctest::Approx(1.0));
  CHECK_THROWS_AS(nse(ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(2, 2)),
                  ContractViolation);
}

TEST_CASE("f1 support scoring") {
  // Rows 1-4 strong; rows 5-6 moderate; everything else negligible.
  ComplexMatrix est = ComplexMatrix::Zero(10, 2);
  for (int i = 1; i <= 6; ++i) est.row(i).setConstant(Complex(1.0, 0.0));

  SUBCASE("exact match") {
    CHECK(f1_support({1, 2, 3, 4, 5, 6}, est, 0.01) == doctest::Approx(1.0));
  }
  SUBCASE("disjoint supports") {
    CHECK(f1_support({0, 7, 8}, est, 0.01) == doctest::Approx(0.0));
  }
  SUBCASE("precision 4/6 and recall 1 give 0.8") {
    CHECK(f1_support({1, 2, 3, 4}, est, 0.01) == doctest::Approx(0.8));
  }
  SUBCASE("empty estimate vs empty truth") {
    const ComplexMatrix zero = ComplexMatrix::Zero(4, 1);
    CHECK(f1_support({}, zero, 0.01) == doctest::Approx(1.0));
    CHECK(f1_support({1}, zero, 0.01) == doctest::Approx(0.0));
  }
  SUBCASE("invariant to global scaling") {
    const double a = f1_support({1, 2, 3}, est, 0.01);
    const double b = f1_support({1, 2, 3}, (37.0 * est).eval(), 0.01);
    CHECK(a == b);
  }
}

TEST_CASE("quartiles with the inclusive linear method") {
  CHECK(quartiles({1, 2, 3, 4, 5}).q25 == doctest::Approx(2.0));
  CHECK(quartiles({1, 2, 3, 4, 5}).q50 == doctest::Approx(3.0));
  CHECK(quartiles({1, 2, 3, 4, 5}).q75 == doctest::Approx(4.0));

  const auto single = quartiles({7.5});
  CHECK(single.q25 == 7.5);
  CHECK(single.q50 == 7.5);
  CHECK(single.q75 == 7.5);

  CHECK_THROWS_AS(quartiles({}), ContractViolation);

  SUBCASE("median of uniform samples sits near one half") {
    std::mt19937_64 rng(92);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> samples(1000);
    for (auto& s : samples) s = unit(rng);
    CHECK(std::abs(quartiles(samples).q50 - 0.5) < 0.05);
  }

  SUBCASE("permutation invariant, monotone under appending a max") {
    std::mt19937_64 rng(93);
    std::vector<double> v{0.3, 1.2, -0.7, 2.5, 0.0, 0.9};
    auto shuffled = v;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(quartiles(v).q50 == quartiles(shuffled).q50);

    auto extended = v;
    extended.push_back(100.0);
    CHECK(quartiles(extended).q75 >= quartiles(v).q75);
  }
}

TEST_CASE("DOA leakage fraction") {
  ComplexMatrix est = ComplexMatrix::Zero(12, 1);

  SUBCASE("all power on the true support") {
    est(5, 0) = 2.0;
    est(6, 0) = 1.0;
    CHECK(doa_leakage({5, 6}, est) == 0.0);
  }
  SUBCASE("power just inside the expanded window still counts as inside") {
    est(4, 0) = 1.0;  // one cell left of the support
    CHECK(doa_leakage({5, 6}, est) == 0.0);
  }
  SUBCASE("all power outside") {
    est(0, 0) = 3.0;
    CHECK(doa_leakage({5, 6}, est) == 1.0);
  }
  SUBCASE("half in, half out") {
    est(5, 0) = 1.0;
    est(10, 0) = 1.0;
    CHECK(doa_leakage({5, 6}, est) == doctest::Approx(0.5));
  }
  SUBCASE("zero estimate leaks nothing") {
    CHECK(doa_leakage({5, 6}, est) == 0.0);
  }
  SUBCASE("always within the unit interval") {
    std::mt19937_64 rng(94);
    for (int trial = 0; trial < 20; ++trial) {
      const ComplexMatrix r = randn_matrix(12, 2, rng);
      const double leak = doa_leakage({3, 4, 5}, r);
      CHECK(leak >= 0.0);
      CHECK(leak <= 1.0);
    }
  }
}
