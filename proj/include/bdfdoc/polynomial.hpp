#pragma once

#include <complex>
#include <span>
#include <vector>

#include "bdfdoc/rational.hpp"

namespace bdfdoc::poly {

/// Polynomials are stored lowest degree first: p[i] multiplies x^i.
using ExactPoly = std::vector<Rational>;
using RealPoly = std::vector<double>;

/// Power-basis coefficients of the Chebyshev polynomial T_n (integers).
ExactPoly chebyshev_t(int n);

/// sum_j c_j T_j(x) rewritten in powers of x, exactly.
ExactPoly chebyshev_to_power(std::span<const Rational> cheb_coeffs);

ExactPoly derivative(std::span<const Rational> p);
RealPoly derivative(std::span<const double> p);
RealPoly to_real(std::span<const Rational> p);

Rational evaluate(std::span<const Rational> p, const Rational& x);
double evaluate(std::span<const double> p, double x);

/// Every real root of p in [lo, hi], ascending, each refined by bisection
/// until the bracket is narrower than tol. Roots are isolated by recursing
/// on p': between consecutive critical points p is monotone, so each piece
/// holds at most one root. Throws NumericalError if p vanishes identically.
std::vector<double> real_roots_in(std::span<const double> p, double lo, double hi, double tol);

/// All complex roots via eigenvalues of the companion matrix, each polished
/// with a few Newton steps. Leading coefficient must be nonzero.
std::vector<std::complex<double>> complex_roots(std::span<const double> p);

/// |p(z)| / sum_i |p_i||z|^i, a scale-free residual.
double relative_residual(std::span<const double> p, std::complex<double> z);

}  // namespace bdfdoc::poly
