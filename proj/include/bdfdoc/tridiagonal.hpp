#pragma once

#include <span>
#include <vector>

namespace bdfdoc {

/// Square tridiagonal matrix. lower[i] = A(i+1, i), upper[i] = A(i, i+1).
struct Tridiagonal {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  explicit Tridiagonal(std::size_t n = 0) : lower(n ? n - 1 : 0, 0.0), diag(n, 0.0), upper(n ? n - 1 : 0, 0.0) {}
  std::size_t size() const { return diag.size(); }

  std::vector<double> apply(std::span<const double> x) const;
};

/// Thomas elimination; falls back to partial-pivot banded LU when a pivot
/// gets small relative to its row. Throws NumericalError on a singular
/// matrix and DimensionError on a size mismatch.
std::vector<double> solve_tridiagonal(const Tridiagonal& a, std::span<const double> rhs);

/// Gaussian elimination with partial pivoting (fill-in stays within two
/// superdiagonals). Exposed for the fallback path and for testing.
std::vector<double> solve_tridiagonal_pivoted(const Tridiagonal& a, std::span<const double> rhs);

}  // namespace bdfdoc
