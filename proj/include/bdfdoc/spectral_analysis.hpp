#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bdfdoc/kernel_core.hpp"
#include "bdfdoc/rational.hpp"

namespace bdfdoc {

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;
inline constexpr double kDefaultEigenTol = 1e-10;

/// g(phi) = 2 sum_j b_j cos(j phi), the symbol of the symmetric Toeplitz
/// matrix B_k = B_{k,l} + B_{k,l}^T.
struct GeneratingFunction {
  int order = 0;
  /// 2 b_j for j = 0..k-1.
  std::vector<Rational> cosine_coefficients;
};

GeneratingFunction make_generating_function(const BdfKernels& kernels);

double eval_generating_function(const GeneratingFunction& g, double phi);
/// Exact value at a rational cos(phi), through the Chebyshev form Z(x).
Rational eval_generating_function_at_cos(const GeneratingFunction& g, const Rational& cos_phi);

/// Z(x) with g(phi) = Z(cos phi), in powers of x (exact).
std::vector<Rational> chebyshev_form(const GeneratingFunction& g);

/// An extremum of g over phi, located at x = cos(phi) in [-1, 1].
struct SigmaBound {
  int order = 0;
  double sigma = 0.0;
  double argmin_cos = 0.0;
  /// Set when the extremum was found on the exact path (rational location).
  std::optional<Rational> exact_sigma;
  std::optional<Rational> exact_argmin_cos;
  std::string exact_form;
};

/// sigma_k = min g. Critical points of Z on [-1, 1] come from exact linear
/// solves when Z' is linear and from monotone-bracket bisection otherwise;
/// endpoints are always compared. Throws DomainError if tol <= 0.
SigmaBound minimize_generating_function(const GeneratingFunction& g, double tol = 1e-12);
/// max g, same method.
SigmaBound maximize_generating_function(const GeneratingFunction& g, double tol = 1e-12);

/// Banded Toeplitz forms built from the BDF kernels. Entries are kept as
/// the kernel values; dense views are for checks and small problems.
class ToeplitzForm {
 public:
  ToeplitzForm(BdfKernels kernels, int m);

  int order() const { return kernels_.order(); }
  int dim() const { return m_; }
  const BdfKernels& kernels() const { return kernels_; }

  /// (B_{k,l})_{ij} = b_{i-j} for 0 <= i-j < k.
  Rational lower_exact(int i, int j) const;
  /// (B_k)_{ij} = b_{|i-j|}, doubled on the diagonal.
  Rational symmetric_exact(int i, int j) const;
  double symmetric(int i, int j) const;

  Eigen::MatrixXd dense_lower() const;
  Eigen::MatrixXd dense_symmetric() const;

  /// w^T B_k w, computed as 2 sum_m w_m sum_{j<=m} b_{m-j} w_j.
  double quadratic_form(const Eigen::VectorXd& w) const;

 private:
  BdfKernels kernels_;
  int m_;
};

/// Throws PreconditionError if m < 1.
ToeplitzForm build_toeplitz(int k, int m);

/// Number of eigenvalues of B_k strictly below x (Sylvester inertia of an
/// LDL^T factorization of B_k - x I, exploiting the band).
int count_eigenvalues_below(const ToeplitzForm& t, double x);

/// Smallest / largest eigenvalue by Sturm-count bisection to within tol.
double min_eigenvalue(const ToeplitzForm& t, double tol = kDefaultEigenTol);
double max_eigenvalue(const ToeplitzForm& t, double tol = kDefaultEigenTol);

/// Min over `trials` uniform [-1,1]^m vectors (m = n-k+1, reproducible from
/// seed) of w^T B_k w / w^T w.
double quadratic_form_check(int k, int n, int trials, std::uint64_t seed = kDefaultSeed);

struct DocFormCheck {
  bool all_positive = true;
  /// Smallest observed 2 sum_m w_m sum_j theta_{m-j} w_j / sum w^2.
  double min_ratio = 0.0;
};

/// Same randomized test with the DOC kernels replacing the BDF kernels.
DocFormCheck doc_positive_definiteness_check(int k, int n, int trials,
                                             std::uint64_t seed = kDefaultSeed);

}  // namespace bdfdoc
