#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "bdfdoc/kernel_core.hpp"
#include "bdfdoc/rational.hpp"

namespace bdfdoc {

inline constexpr int kDefaultDocCount = 256;

/// Discrete orthogonal convolution (DOC) kernels theta_j: the convolution
/// inverse of the BDF kernels, sum_{m=0}^{j} theta_{j-m} b_m = delta_{j0}.
class DocKernels {
 public:
  int order() const { return order_; }
  /// Number of computed kernels, theta_0 .. theta_{size()-1}.
  int size() const { return static_cast<int>(exact_.size()); }
  int max_index() const { return size() - 1; }

  std::span<const Rational> exact() const { return exact_; }
  std::span<const double> values() const { return values_; }
  const Rational& exact(int j) const;
  double operator[](int j) const;

 private:
  friend DocKernels compute_doc_kernels(const BdfKernels& kernels, int count);
  DocKernels(int k, std::vector<Rational> theta);

  int order_;
  std::vector<Rational> exact_;
  std::vector<double> values_;
};

/// theta_0 = 1/b_0, theta_i = -(1/b_0) sum_{m=1}^{min(i,k-1)} theta_{i-m} b_m.
/// Throws PreconditionError if count < 1.
DocKernels compute_doc_kernels(const BdfKernels& kernels, int count = kDefaultDocCount);

/// Index of the first vanishing kernel, if any.
std::optional<int> first_zero_kernel(const DocKernels& theta);

struct OrthogonalityResult {
  bool holds = true;
  /// First (n, j) pair where an identity fails, scanning n ascending then j.
  std::optional<std::pair<int, int>> first_failure;
  /// 1 for sum theta_{n-l} b_{l-j}, 2 for sum b_{n-l} theta_{l-j}.
  int failing_identity = 0;
};

/// Checks, in exact arithmetic, for all k <= j <= n <= n_max:
///   sum_{l=j}^{n} theta_{n-l} b_{l-j} = delta_{nj}
///   sum_{l=j}^{n} b_{n-l} theta_{l-j} = delta_{nj}
/// Throws PreconditionError if theta has fewer than n_max-k+1 entries.
OrthogonalityResult verify_orthogonality(const BdfKernels& b, const DocKernels& theta, int n_max);

/// Roots of sum_{m=0}^{k-1} b_m lambda^{k-1-m} together with the
/// coefficients d_i of the closed form theta_j = sum_i d_i lambda_i^j.
struct CharacteristicRoots {
  int order = 0;
  /// Sorted by descending magnitude; within a conjugate pair the root with
  /// positive imaginary part comes first.
  std::vector<std::complex<double>> roots;
  std::vector<std::complex<double>> coefficients;
  /// Largest scale-free residual of the roots in the characteristic polynomial.
  double max_residual = 0.0;
};

/// Real coefficients of the characteristic polynomial, lowest degree first.
std::vector<double> characteristic_polynomial(const BdfKernels& kernels);

/// Requires 2 <= k <= 5. Throws NumericalError when a root residual exceeds
/// 1e-12 or a root lies outside the unit disk.
CharacteristicRoots characteristic_roots(int k);

std::complex<double> closed_form_theta_complex(const CharacteristicRoots& roots, int j);
/// Real part of sum_i d_i lambda_i^j. Throws NumericalError if the
/// imaginary part exceeds 1e-10 (the conjugate symmetry is broken).
double closed_form_theta(const CharacteristicRoots& roots, int j);

/// A geometric envelope |theta_j| <= prefactor * ratio^j.
struct DecayBound {
  Rational prefactor;
  Rational ratio;
};

/// rho_k in the DOC decay envelope: 10/3, 6, 96/5 for k = 3, 4, 5.
Rational decay_rho(int k);
/// The envelope (rho_k / 4) (k/7)^j.
DecayBound standard_decay_bound(int k);

struct DecayCertificate {
  int order = 0;
  Rational rho;
  Rational ratio;
  int j_max = 0;
  /// min over j of (bound_j - |theta_j|), as a double.
  double max_slack = 0.0;
  bool valid = false;
  std::optional<int> first_violation;
};

/// Compares |theta_j| against prefactor * ratio^j in exact arithmetic for
/// 0 <= j <= j_max. Throws PreconditionError if theta is too short.
DecayCertificate certify_decay(const DocKernels& theta, int j_max, const DecayBound& bound);
/// Same, using the standard envelope for the order of theta (k in 3..5).
DecayCertificate certify_decay(const DocKernels& theta, int j_max);

}  // namespace bdfdoc
