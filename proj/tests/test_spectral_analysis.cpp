#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "bdfdoc/errors.hpp"
#include "bdfdoc/spectral_analysis.hpp"

using namespace bdfdoc;

namespace {

GeneratingFunction g_for(int k) { return make_generating_function(generate_bdf_kernels(k)); }

double dense_min_eigenvalue(const ToeplitzForm& t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.dense_symmetric(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Z_5 = 12 + 26x + 178x^2 - 252x^3 + 96x^4; Newton on Z_5' from x = 0.
double z5_critical_point() {
  double x = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double d1 = 26 + 356 * x - 756 * x * x + 384 * x * x * x;
    const double d2 = 356 - 1512 * x + 1152 * x * x;
    x -= d1 / d2;
  }
  return x;
}

double z5(double x) { return 12 + 26 * x + 178 * x * x - 252 * x * x * x + 96 * x * x * x * x; }

}  // namespace

TEST_CASE("generating functions in cosine form") {
  const auto g3 = g_for(3);
  REQUIRE(g3.cosine_coefficients.size() == 3);
  CHECK(g3.cosine_coefficients[0] == Rational(11, 3));
  CHECK(g3.cosine_coefficients[1] == Rational(-7, 3));
  CHECK(g3.cosine_coefficients[2] == Rational(2, 3));
  // g_3(phi) = (11 - 7 cos phi + 2 cos 2 phi) / 3.
  for (double phi : {0.0, 0.4, 2.0, std::numbers::pi}) {
    const double expect = (11 - 7 * std::cos(phi) + 2 * std::cos(2 * phi)) / 3;
    CHECK(eval_generating_function(g3, phi) == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("Chebyshev forms") {
  const auto z3 = chebyshev_form(g_for(3));
  CHECK(z3 == std::vector<Rational>{Rational(3), Rational(-7, 3), Rational(4, 3)});
  const auto z4 = chebyshev_form(g_for(4));
  CHECK(z4 == std::vector<Rational>{Rational(2), Rational(-7, 3), Rational(13, 3), Rational(-2)});
  const auto z5 = chebyshev_form(g_for(5));
  CHECK(z5 == std::vector<Rational>{Rational(12, 30), Rational(26, 30), Rational(178, 30), Rational(-252, 30),
                                    Rational(96, 30)});
}

TEST_CASE("k = 3 minimum is 95/48 at cos phi = 7/8") {
  // g_3 = (4/3)(x - 7/8)^2 + 95/48 with x = cos phi.
  const auto s = minimize_generating_function(g_for(3));
  REQUIRE(s.exact_sigma.has_value());
  CHECK(*s.exact_sigma == Rational(95, 48));
  CHECK(*s.exact_argmin_cos == Rational(7, 8));
  CHECK(s.sigma == doctest::Approx(95.0 / 48.0).epsilon(1e-15));
  CHECK(eval_generating_function_at_cos(g_for(3), Rational(7, 8)) == Rational(95, 48));
  CHECK(eval_generating_function_at_cos(g_for(3), Rational(1, 2)) ==
        Rational(4, 3) * (Rational(1, 2) - Rational(7, 8)).pow(2) + Rational(95, 48));
}

TEST_CASE("k = 4 minimum matches the radical") {
  const double radical = (2656.0 - 43.0 * std::sqrt(43.0)) / 1458.0;
  const double x_star = (13.0 - std::sqrt(43.0)) / 18.0;
  const auto s = minimize_generating_function(g_for(4));
  CHECK(std::abs(s.sigma - radical) < 1e-12);
  CHECK(std::abs(s.argmin_cos - x_star) < 1e-9);
  CHECK(std::abs(s.sigma - 1.62828) < 1e-5);
}

TEST_CASE("k = 5 minimum against an independent Newton solve") {
  const double x_star = z5_critical_point();
  const auto s = minimize_generating_function(g_for(5));
  CHECK(std::abs(s.argmin_cos - x_star) < 1e-9);
  CHECK(std::abs(s.argmin_cos - (-0.064041)) < 1e-5);
  CHECK(std::abs(s.sigma - z5(x_star) / 30.0) < 1e-12);
  // The endpoints are larger: Z_5(1) = 60, Z_5(-1) = 512.
  CHECK(z5(1.0) == doctest::Approx(60.0));
  CHECK(z5(-1.0) == doctest::Approx(512.0));
}

TEST_CASE("extrema against a dense phi grid") {
  for (int k = 2; k <= 5; ++k) {
    const auto g = g_for(k);
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i <= 200000; ++i) {
      const double v = eval_generating_function(g, std::numbers::pi * i / 200000.0);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const auto mn = minimize_generating_function(g);
    const auto mx = maximize_generating_function(g);
    CHECK(mn.sigma <= lo + 1e-12);
    CHECK(mn.sigma >= lo - 1e-8);
    CHECK(mx.sigma >= hi - 1e-12);
    CHECK(mx.sigma <= hi + 1e-8);
  }
  CHECK_THROWS_AS(minimize_generating_function(g_for(3), 0.0), DomainError);
}

TEST_CASE("Toeplitz entries") {
  const ToeplitzForm t = build_toeplitz(4, 6);
  CHECK(t.dim() == 6);
  CHECK(t.lower_exact(0, 0) == Rational(25, 12));
  CHECK(t.lower_exact(3, 0) == Rational(-1, 4));
  CHECK(t.lower_exact(4, 0).is_zero());
  CHECK(t.lower_exact(0, 1).is_zero());
  CHECK(t.symmetric_exact(2, 2) == Rational(25, 6));
  CHECK(t.symmetric_exact(1, 3) == Rational(13, 12));
  CHECK(t.symmetric_exact(3, 1) == Rational(13, 12));
  const Eigen::MatrixXd d = t.dense_symmetric();
  CHECK((d - d.transpose()).norm() == 0.0);
  CHECK((d - (t.dense_lower() + t.dense_lower().transpose())).norm() == 0.0);
  CHECK_THROWS_AS(build_toeplitz(3, 0), PreconditionError);
}

TEST_CASE("quadratic form equals w^T B w") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 3; k <= 5; ++k) {
    const ToeplitzForm t = build_toeplitz(k, 25);
    Eigen::VectorXd w(25);
    for (int i = 0; i < 25; ++i) w[i] = u(rng);
    CHECK(t.quadratic_form(w) == doctest::Approx(w.dot(t.dense_symmetric() * w)).epsilon(1e-13));
  }
}

TEST_CASE("bisection eigenvalues agree with a dense solver") {
  for (int k = 2; k <= 5; ++k) {
    for (int m : {1, 7, 30, 80}) {
      const ToeplitzForm t = build_toeplitz(k, m);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.dense_symmetric(), Eigen::EigenvaluesOnly);
      const auto& ev = es.eigenvalues();
      CHECK(min_eigenvalue(t) == doctest::Approx(ev.minCoeff()).epsilon(1e-9));
      CHECK(max_eigenvalue(t) == doctest::Approx(ev.maxCoeff()).epsilon(1e-9));
      // Probes well away from every eigenvalue, so rounding cannot flip a count.
      for (double frac : {0.137, 0.5 + 1e-3 / std::numbers::pi, 0.811}) {
        const double probe = ev.minCoeff() + frac * (ev.maxCoeff() - ev.minCoeff() + 1.0);
        int below = 0;
        double gap = 1e300;
        for (int i = 0; i < ev.size(); ++i) {
          below += ev[i] < probe ? 1 : 0;
          gap = std::min(gap, std::abs(ev[i] - probe));
        }
        if (gap > 1e-8) CHECK(count_eigenvalues_below(t, probe) == below);
      }
    }
  }
}

TEST_CASE("eigenvalues sit between min g and max g") {
  for (int k = 3; k <= 5; ++k) {
    const auto lo = minimize_generating_function(g_for(k)).sigma;
    const auto hi = maximize_generating_function(g_for(k)).sigma;
    double previous = 1e300;
    for (int m : {50, 100, 200, 400}) {
      const double lambda = min_eigenvalue(build_toeplitz(k, m));
      CHECK(lambda >= lo - 1e-8);
      CHECK(lambda <= hi);
      // Toeplitz sections are nested, so the minimum can only fall with m.
      CHECK(lambda <= previous + 1e-10);
      previous = lambda;
    }
    CHECK(dense_min_eigenvalue(build_toeplitz(k, 200)) == doctest::Approx(min_eigenvalue(build_toeplitz(k, 200))).epsilon(1e-9));
  }
}

TEST_CASE("randomized quadratic forms") {
  for (int k = 3; k <= 5; ++k) {
    const double sigma = minimize_generating_function(g_for(k)).sigma;
    const double a = quadratic_form_check(k, 50, 2000);
    const double b = quadratic_form_check(k, 50, 2000);
    CHECK(a == b);
    CHECK(a >= sigma - 1e-6);
    CHECK(a != quadratic_form_check(k, 50, 2000, 99));
    const auto doc = doc_positive_definiteness_check(k, 50, 2000);
    CHECK(doc.all_positive);
    CHECK(doc.min_ratio > 0.0);
  }
}
