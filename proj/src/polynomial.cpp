#include "bdfdoc/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "bdfdoc/errors.hpp"

namespace bdfdoc::poly {

ExactPoly chebyshev_t(int n) {
  // T_0 = 1, T_1 = x, T_{n+1} = 2x T_n - T_{n-1}
  ExactPoly prev{Rational(1)};
  if (n == 0) return prev;
  ExactPoly cur{Rational(0), Rational(1)};
  for (int i = 1; i < n; ++i) {
    ExactPoly next(cur.size() + 1, Rational(0));
    for (std::size_t j = 0; j < cur.size(); ++j) next[j + 1] += Rational(2) * cur[j];
    for (std::size_t j = 0; j < prev.size(); ++j) next[j] -= prev[j];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

ExactPoly chebyshev_to_power(std::span<const Rational> cheb_coeffs) {
  ExactPoly out(std::max<std::size_t>(cheb_coeffs.size(), 1), Rational(0));
  for (std::size_t j = 0; j < cheb_coeffs.size(); ++j) {
    const auto t = chebyshev_t(static_cast<int>(j));
    for (std::size_t i = 0; i < t.size(); ++i) out[i] += cheb_coeffs[j] * t[i];
  }
  return out;
}

ExactPoly derivative(std::span<const Rational> p) {
  if (p.size() <= 1) return {Rational(0)};
  ExactPoly d(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = Rational(static_cast<std::int64_t>(i)) * p[i];
  return d;
}

RealPoly derivative(std::span<const double> p) {
  if (p.size() <= 1) return {0.0};
  RealPoly d(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = static_cast<double>(i) * p[i];
  return d;
}

RealPoly to_real(std::span<const Rational> p) {
  RealPoly out;
  out.reserve(p.size());
  for (const auto& c : p) out.push_back(c.to_double());
  return out;
}

Rational evaluate(std::span<const Rational> p, const Rational& x) {
  Rational acc(0);
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double evaluate(std::span<const double> p, double x) {
  double acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

namespace {

RealPoly trimmed(std::span<const double> p) {
  RealPoly q(p.begin(), p.end());
  while (q.size() > 1 && q.back() == 0.0) q.pop_back();
  return q;
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

double bisect(std::span<const double> p, double a, double b, double tol) {
  int sa = sign_of(evaluate(p, a));
  for (int iter = 0; iter < 400 && (b - a) > tol; ++iter) {
    const double mid = 0.5 * (a + b);
    const int sm = sign_of(evaluate(p, mid));
    if (sm == 0) return mid;
    if (sm == sa) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::vector<double> real_roots_in(std::span<const double> p_in, double lo, double hi, double tol) {
  if (!(tol > 0.0) || !(lo <= hi)) throw DomainError("real_roots_in: bad interval or tolerance");
  const RealPoly p = trimmed(p_in);
  if (p.size() == 1) {
    if (p[0] == 0.0) throw NumericalError("real_roots_in: polynomial vanishes identically");
    return {};
  }
  if (p.size() == 2) {
    const double r = -p[0] / p[1];
    if (r >= lo && r <= hi) return {r};
    return {};
  }

  std::vector<double> breaks{lo};
  for (double c : real_roots_in(derivative(p), lo, hi, tol)) breaks.push_back(c);
  breaks.push_back(hi);

  std::vector<double> roots;
  auto push_unique = [&](double r) {
    if (roots.empty() || std::abs(r - roots.back()) > tol) roots.push_back(r);
  };
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i];
    const double b = breaks[i + 1];
    const int sa = sign_of(evaluate(p, a));
    const int sb = sign_of(evaluate(p, b));
    if (sa == 0) push_unique(a);
    if (sa != 0 && sb != 0 && sa != sb) push_unique(bisect(p, a, b, tol));
    if (i + 2 == breaks.size() && sb == 0) push_unique(b);
  }
  return roots;
}

std::vector<std::complex<double>> complex_roots(std::span<const double> p_in) {
  const RealPoly p = trimmed(p_in);
  const auto degree = static_cast<Eigen::Index>(p.size()) - 1;
  if (degree < 1) throw DomainError("complex_roots: polynomial of degree < 1");
  const double lead = p.back();
  if (lead == 0.0) throw DomainError("complex_roots: zero leading coefficient");

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
  for (Eigen::Index i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < degree; ++i) companion(i, degree - 1) = -p[static_cast<std::size_t>(i)] / lead;

  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw NumericalError("companion eigensolver did not converge");

  std::vector<std::complex<double>> roots;
  roots.reserve(static_cast<std::size_t>(degree));
  const RealPoly dp = derivative(p);
  for (Eigen::Index i = 0; i < degree; ++i) {
    std::complex<double> z = solver.eigenvalues()[i];
    for (int it = 0; it < 3; ++it) {
      std::complex<double> f(0.0), df(0.0);
      for (auto c = p.rbegin(); c != p.rend(); ++c) f = f * z + *c;
      for (auto c = dp.rbegin(); c != dp.rend(); ++c) df = df * z + *c;
      if (std::abs(df) == 0.0) break;
      const std::complex<double> step = f / df;
      z -= step;
      if (std::abs(step) <= 1e-17 * std::max(1.0, std::abs(z))) break;
    }
    roots.push_back(z);
  }
  return roots;
}

double relative_residual(std::span<const double> p, std::complex<double> z) {
  std::complex<double> f(0.0);
  double scale = 0.0;
  const double r = std::abs(z);
  for (auto c = p.rbegin(); c != p.rend(); ++c) {
    f = f * z + *c;
    scale = scale * r + std::abs(*c);
  }
  return scale == 0.0 ? 0.0 : std::abs(f) / scale;
}

}  // namespace bdfdoc::poly
