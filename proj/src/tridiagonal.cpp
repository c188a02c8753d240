#include "bdfdoc/tridiagonal.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "bdfdoc/errors.hpp"

namespace bdfdoc {

std::vector<double> Tridiagonal::apply(std::span<const double> x) const {
  const std::size_t n = size();
  if (x.size() != n) throw DimensionError("tridiagonal apply: size mismatch");
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double v = diag[i] * x[i];
    if (i > 0) v += lower[i - 1] * x[i - 1];
    if (i + 1 < n) v += upper[i] * x[i + 1];
    y[i] = v;
  }
  return y;
}

namespace {

void check_sizes(const Tridiagonal& a, std::span<const double> rhs) {
  const std::size_t n = a.size();
  if (n == 0) throw DimensionError("tridiagonal solve: empty system");
  if (rhs.size() != n || a.lower.size() != n - 1 || a.upper.size() != n - 1) {
    throw DimensionError("tridiagonal solve: size mismatch");
  }
}

std::optional<std::vector<double>> thomas(const Tridiagonal& a, std::span<const double> rhs) {
  constexpr double kPivotFloor = 1e3 * std::numeric_limits<double>::epsilon();
  const std::size_t n = a.size();
  std::vector<double> c(n, 0.0);
  std::vector<double> d(n, 0.0);

  auto row_scale = [&](std::size_t i) {
    double s = std::abs(a.diag[i]);
    if (i > 0) s += std::abs(a.lower[i - 1]);
    if (i + 1 < n) s += std::abs(a.upper[i]);
    return s;
  };

  double pivot = a.diag[0];
  if (std::abs(pivot) <= kPivotFloor * row_scale(0)) return std::nullopt;
  if (n > 1) c[0] = a.upper[0] / pivot;
  d[0] = rhs[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = a.diag[i] - a.lower[i - 1] * c[i - 1];
    if (std::abs(pivot) <= kPivotFloor * row_scale(i)) return std::nullopt;
    if (i + 1 < n) c[i] = a.upper[i] / pivot;
    d[i] = (rhs[i] - a.lower[i - 1] * d[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) d[i] -= c[i] * d[i + 1];
  return d;
}

}  // namespace

std::vector<double> solve_tridiagonal_pivoted(const Tridiagonal& a, std::span<const double> rhs) {
  check_sizes(a, rhs);
  const std::size_t n = a.size();
  // Row i holds entries in columns i-1 (sub), i (d), i+1 (u1), i+2 (u2).
  std::vector<double> sub(n, 0.0), d(a.diag), u1(n, 0.0), u2(n, 0.0);
  std::vector<double> b(rhs.begin(), rhs.end());
  for (std::size_t i = 0; i + 1 < n; ++i) {
    sub[i + 1] = a.lower[i];
    u1[i] = a.upper[i];
  }

  double scale = 0.0;
  for (double v : a.diag) scale = std::max(scale, std::abs(v));
  for (double v : a.lower) scale = std::max(scale, std::abs(v));
  for (double v : a.upper) scale = std::max(scale, std::abs(v));
  const double singular_tol = std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300) * static_cast<double>(n);

  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 < n && std::abs(sub[i + 1]) > std::abs(d[i])) {
      // Swap rows i and i+1. Row i+1 is (sub, d, u1) at columns (i, i+1, i+2).
      std::swap(d[i], sub[i + 1]);
      std::swap(u1[i], d[i + 1]);
      std::swap(u2[i], u1[i + 1]);
      std::swap(b[i], b[i + 1]);
    }
    if (std::abs(d[i]) <= singular_tol) throw NumericalError("tridiagonal system is singular");
    if (i + 1 < n) {
      const double factor = sub[i + 1] / d[i];
      sub[i + 1] = 0.0;
      d[i + 1] -= factor * u1[i];
      if (i + 2 < n) u1[i + 1] -= factor * u2[i];
      b[i + 1] -= factor * b[i];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double v = b[i];
    if (i + 1 < n) v -= u1[i] * x[i + 1];
    if (i + 2 < n) v -= u2[i] * x[i + 2];
    x[i] = v / d[i];
  }
  return x;
}

std::vector<double> solve_tridiagonal(const Tridiagonal& a, std::span<const double> rhs) {
  check_sizes(a, rhs);
  if (auto x = thomas(a, rhs)) return std::move(*x);
  return solve_tridiagonal_pivoted(a, rhs);
}

}  // namespace bdfdoc
