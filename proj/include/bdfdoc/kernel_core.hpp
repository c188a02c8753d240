#pragma once

#include <span>
#include <vector>

#include "bdfdoc/rational.hpp"

namespace bdfdoc {

inline constexpr int kMinOrder = 1;
inline constexpr int kMaxOrder = 5;

/// Coefficients b_j of the k-step BDF formula written as a convolution
/// over backward differences:
///
///   D_k v^n = (1/tau) * sum_{j=0}^{k-1} b_j (v^{n-j} - v^{n-j-1}).
///
/// b_j vanishes for j >= k, so the sequence simply stops at k entries.
/// Immutable once built.
class BdfKernels {
 public:
  int order() const { return order_; }
  std::span<const Rational> exact() const { return exact_; }
  std::span<const double> values() const { return values_; }

  /// b_j as an exact fraction; zero for j >= k.
  Rational exact(int j) const;
  /// b_j as a double; zero for j >= k (or j < 0).
  double operator[](int j) const;

 private:
  friend BdfKernels generate_bdf_kernels(int k);
  friend BdfKernels kernels_from_coefficients(std::vector<Rational> b);
  BdfKernels(int k, std::vector<Rational> b);

  int order_;
  std::vector<Rational> exact_;
  std::vector<double> values_;
};

/// Expands sum_{l=1}^{k} (1/l)(1 - z)^{l-1} in powers of z.
/// Throws UnsupportedOrderError unless 1 <= k <= 5.
BdfKernels generate_bdf_kernels(int k);

/// Wraps an arbitrary sequence b_0..b_{k-1} (perturbation studies, negative
/// controls). Throws UnsupportedOrderError for a length outside 1..5 and
/// DomainError when b_0 = 0.
BdfKernels kernels_from_coefficients(std::vector<Rational> b);

/// Evaluates D_k v^n from the k+1 most recent levels, oldest first:
/// history = {v^{n-k}, ..., v^n}. Vectors must share a length.
std::vector<double> bdf_apply(const BdfKernels& kernels,
                              std::span<const std::vector<double>> history, double tau);

/// Exact scalar counterpart of bdf_apply, used for order-condition checks.
Rational bdf_apply_exact(const BdfKernels& kernels, std::span<const Rational> history,
                         const Rational& tau);

}  // namespace bdfdoc
