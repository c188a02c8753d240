#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "bdfdoc/errors.hpp"
#include "bdfdoc/polynomial.hpp"

using bdfdoc::Rational;
namespace poly = bdfdoc::poly;

TEST_CASE("Chebyshev polynomials in the power basis") {
  CHECK(poly::chebyshev_t(0) == poly::ExactPoly{Rational(1)});
  CHECK(poly::chebyshev_t(1) == poly::ExactPoly{Rational(0), Rational(1)});
  CHECK(poly::chebyshev_t(3) == poly::ExactPoly{Rational(0), Rational(-3), Rational(0), Rational(4)});
  CHECK(poly::chebyshev_t(4) == poly::ExactPoly{Rational(1), Rational(0), Rational(-8), Rational(0), Rational(8)});
}

TEST_CASE("T_n(cos t) = cos(n t)") {
  for (int n = 0; n <= 8; ++n) {
    const auto p = poly::to_real(poly::chebyshev_t(n));
    for (double t : {0.0, 0.3, 1.1, 2.9}) {
      CHECK(poly::evaluate(p, std::cos(t)) == doctest::Approx(std::cos(n * t)).epsilon(1e-12));
    }
  }
}

TEST_CASE("chebyshev_to_power folds a cosine series") {
  // 11 - 7 T1 + 2 T2 = 9 - 7x + 4x^2.
  const std::vector<Rational> c{Rational(11), Rational(-7), Rational(2)};
  CHECK(poly::chebyshev_to_power(c) == poly::ExactPoly{Rational(9), Rational(-7), Rational(4)});
}

TEST_CASE("derivative and evaluation") {
  const poly::ExactPoly p{Rational(1), Rational(2), Rational(0), Rational(4)};
  CHECK(poly::derivative(p) == poly::ExactPoly{Rational(2), Rational(0), Rational(12)});
  CHECK(poly::evaluate(p, Rational(1, 2)) == Rational(5, 2));
  const poly::RealPoly q{1.0, 2.0, 0.0, 4.0};
  CHECK(poly::derivative(q) == poly::RealPoly{2.0, 0.0, 12.0});
  CHECK(poly::evaluate(q, 0.5) == doctest::Approx(2.5));
}

TEST_CASE("real roots are isolated and refined") {
  // (x - 0.1)(x + 0.4)(x - 0.7) = x^3 - 0.4 x^2 - 0.25 x + 0.028
  const poly::RealPoly p{0.028, -0.25, -0.4, 1.0};
  const auto roots = poly::real_roots_in(p, -1.0, 1.0, 1e-14);
  REQUIRE(roots.size() == 3);
  CHECK(roots[0] == doctest::Approx(-0.4).epsilon(1e-12));
  CHECK(roots[1] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(roots[2] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(poly::real_roots_in(p, 0.2, 0.6, 1e-14).empty());
  CHECK_THROWS_AS(poly::real_roots_in(poly::RealPoly{0.0, 0.0}, -1.0, 1.0, 1e-12), bdfdoc::NumericalError);
}

TEST_CASE("complex roots from the companion matrix") {
  // z^2 + 1 and (z - 2)(z^2 + 2z + 5): roots -1 +- 2i.
  auto r = poly::complex_roots(poly::RealPoly{1.0, 0.0, 1.0});
  REQUIRE(r.size() == 2);
  for (auto z : r) CHECK(std::abs(std::abs(z) - 1.0) < 1e-13);

  const poly::RealPoly p{-10.0, 1.0, 0.0, 1.0};
  r = poly::complex_roots(p);
  REQUIRE(r.size() == 3);
  int real_count = 0;
  for (auto z : r) {
    CHECK(poly::relative_residual(p, z) < 1e-14);
    if (std::abs(z.imag()) < 1e-12) {
      ++real_count;
      CHECK(z.real() == doctest::Approx(2.0));
    } else {
      CHECK(z.real() == doctest::Approx(-1.0));
      CHECK(std::abs(z.imag()) == doctest::Approx(2.0));
    }
  }
  CHECK(real_count == 1);
}
