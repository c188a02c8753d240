#include <doctest.h>

#include <chrono>
#include <vector>

#include "bdfdoc/errors.hpp"
#include "bdfdoc/kernel_core.hpp"

using bdfdoc::BdfKernels;
using bdfdoc::Rational;
using bdfdoc::generate_bdf_kernels;

namespace {

std::vector<Rational> fractions(std::initializer_list<std::pair<int, int>> pq) {
  std::vector<Rational> out;
  for (auto [p, q] : pq) out.emplace_back(p, q);
  return out;
}

void check_row(int k, const std::vector<Rational>& expected) {
  const BdfKernels b = generate_bdf_kernels(k);
  REQUIRE(b.order() == k);
  REQUIRE(b.exact().size() == expected.size());
  for (int j = 0; j < k; ++j) CHECK(b.exact(j) == expected[static_cast<std::size_t>(j)]);
}

}  // namespace

TEST_CASE("kernel rows") {
  check_row(1, fractions({{1, 1}}));
  check_row(2, fractions({{3, 2}, {-1, 2}}));
  check_row(3, fractions({{11, 6}, {-7, 6}, {1, 3}}));
  check_row(4, fractions({{25, 12}, {-23, 12}, {13, 12}, {-1, 4}}));
  check_row(5, fractions({{137, 60}, {-163, 60}, {137, 60}, {-21, 20}, {1, 5}}));
}

TEST_CASE("kernels vanish past the order and doubles mirror the fractions") {
  const BdfKernels b = generate_bdf_kernels(4);
  CHECK(b.exact(4).is_zero());
  CHECK(b.exact(-1).is_zero());
  CHECK(b[7] == 0.0);
  for (int j = 0; j < 4; ++j) CHECK(b[j] == b.exact(j).to_double());
}

TEST_CASE("generating polynomial evaluated at a rational point") {
  // sum_j b_j z^j must equal sum_{l=1}^{k} (1/l) (1 - z)^{l-1} for every z.
  for (int k = 1; k <= 5; ++k) {
    for (const Rational& z : {Rational(1, 3), Rational(-2, 5), Rational(7, 4)}) {
      Rational direct(0);
      for (int l = 1; l <= k; ++l) direct += Rational(1, l) * (Rational(1) - z).pow(l - 1);
      const BdfKernels b = generate_bdf_kernels(k);
      Rational series(0);
      for (int j = 0; j < k; ++j) series += b.exact(j) * z.pow(j);
      CHECK(series == direct);
    }
  }
}

TEST_CASE("unsupported orders") {
  CHECK_THROWS_AS(generate_bdf_kernels(0), bdfdoc::UnsupportedOrderError);
  CHECK_THROWS_AS(generate_bdf_kernels(6), bdfdoc::UnsupportedOrderError);
  try {
    generate_bdf_kernels(7);
  } catch (const bdfdoc::UnsupportedOrderError& e) {
    CHECK(e.order() == 7);
  }
}

TEST_CASE("custom coefficient sequences") {
  const BdfKernels b = bdfdoc::kernels_from_coefficients(fractions({{11, 6}, {-7, 6}, {-1, 3}}));
  CHECK(b.order() == 3);
  CHECK(b.exact(2) == Rational(-1, 3));
  CHECK_THROWS_AS(bdfdoc::kernels_from_coefficients(fractions({{0, 1}, {1, 1}})), bdfdoc::DomainError);
  CHECK_THROWS_AS(bdfdoc::kernels_from_coefficients({}), bdfdoc::UnsupportedOrderError);
  CHECK_THROWS_AS(bdfdoc::kernels_from_coefficients(std::vector<Rational>(6, Rational(1))),
                  bdfdoc::UnsupportedOrderError);
}

TEST_CASE("bdf_apply on hand-checked histories") {
  SUBCASE("constant history gives zero") {
    const BdfKernels b = generate_bdf_kernels(5);
    std::vector<std::vector<double>> hist(6, std::vector<double>{2.5, -1.0, 4.0});
    const auto d = bdfdoc::bdf_apply(b, hist, 0.1);
    for (double v : d) CHECK(v == 0.0);
  }
  SUBCASE("k = 2, linear data") {
    const BdfKernels b = generate_bdf_kernels(2);
    std::vector<std::vector<double>> hist{{0.0}, {1.0}, {2.0}};
    CHECK(bdfdoc::bdf_apply(b, hist, 1.0)[0] == doctest::Approx(1.0));
  }
  SUBCASE("k = 3, v^j = j^2 at n = 3") {
    const BdfKernels b = generate_bdf_kernels(3);
    std::vector<std::vector<double>> hist{{0.0}, {1.0}, {4.0}, {9.0}};
    CHECK(bdfdoc::bdf_apply(b, hist, 1.0)[0] == doctest::Approx(6.0).epsilon(1e-14));
  }
  SUBCASE("step size scales the result") {
    const BdfKernels b = generate_bdf_kernels(2);
    std::vector<std::vector<double>> hist{{0.0}, {1.0}, {2.0}};
    CHECK(bdfdoc::bdf_apply(b, hist, 0.5)[0] == doctest::Approx(2.0));
  }
}

TEST_CASE("bdf_apply_exact differentiates polynomials of degree <= k exactly") {
  // v(t) = t^p sampled at t = 0..n with tau = 1; v'(n) = p n^{p-1}.
  for (int k = 1; k <= 5; ++k) {
    const BdfKernels b = generate_bdf_kernels(k);
    const int n = k + 3;
    for (int p = 0; p <= k; ++p) {
      std::vector<Rational> hist;
      for (int t = n - k; t <= n; ++t) hist.push_back(Rational(t).pow(p));
      const Rational expected = p == 0 ? Rational(0) : Rational(p) * Rational(n).pow(p - 1);
      CHECK(bdfdoc::bdf_apply_exact(b, hist, Rational(1)) == expected);
    }
    std::vector<Rational> hist;
    for (int t = n - k; t <= n; ++t) hist.push_back(Rational(t).pow(k + 1));
    CHECK_FALSE(bdfdoc::bdf_apply_exact(b, hist, Rational(1)) == Rational(k + 1) * Rational(n).pow(k));
  }
}

TEST_CASE("bdf_apply errors") {
  const BdfKernels b = generate_bdf_kernels(2);
  std::vector<std::vector<double>> ragged{{0.0}, {1.0, 2.0}, {2.0}};
  CHECK_THROWS_AS(bdfdoc::bdf_apply(b, ragged, 1.0), bdfdoc::DimensionError);
  std::vector<std::vector<double>> short_hist{{0.0}, {1.0}};
  CHECK_THROWS_AS(bdfdoc::bdf_apply(b, short_hist, 1.0), bdfdoc::DimensionError);
  std::vector<std::vector<double>> ok{{0.0}, {1.0}, {2.0}};
  CHECK_THROWS_AS(bdfdoc::bdf_apply(b, ok, 0.0), bdfdoc::DomainError);
  CHECK_THROWS_AS(bdfdoc::bdf_apply(b, ok, -1.0), bdfdoc::DomainError);
}

TEST_CASE("generation is fast") {
  const auto start = std::chrono::steady_clock::now();
  for (int k = 2; k <= 5; ++k) generate_bdf_kernels(k);
  const auto elapsed = std::chrono::steady_clock::now() - start;
  CHECK(std::chrono::duration<double>(elapsed).count() < 1e-3);
}
