#include "bdfdoc/doc_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "bdfdoc/errors.hpp"
#include "bdfdoc/polynomial.hpp"

namespace bdfdoc {

DocKernels::DocKernels(int k, std::vector<Rational> theta) : order_(k), exact_(std::move(theta)) {
  values_.reserve(exact_.size());
  for (const auto& t : exact_) values_.push_back(t.to_double());
}

const Rational& DocKernels::exact(int j) const {
  if (j < 0 || j >= size()) throw PreconditionError("DOC kernel index " + std::to_string(j) + " not computed");
  return exact_[static_cast<std::size_t>(j)];
}

double DocKernels::operator[](int j) const {
  if (j < 0 || j >= size()) throw PreconditionError("DOC kernel index " + std::to_string(j) + " not computed");
  return values_[static_cast<std::size_t>(j)];
}

DocKernels compute_doc_kernels(const BdfKernels& kernels, int count) {
  if (count < 1) throw PreconditionError("compute_doc_kernels: count must be >= 1");
  const int k = kernels.order();
  const Rational inv_b0 = Rational(1) / kernels.exact(0);

  std::vector<Rational> theta;
  theta.reserve(static_cast<std::size_t>(count));
  theta.push_back(inv_b0);
  for (int i = 1; i < count; ++i) {
    Rational acc(0);
    for (int m = 1; m <= std::min(i, k - 1); ++m) {
      acc += theta[static_cast<std::size_t>(i - m)] * kernels.exact(m);
    }
    theta.push_back(-(acc * inv_b0));
  }
  return DocKernels(k, std::move(theta));
}

std::optional<int> first_zero_kernel(const DocKernels& theta) {
  for (int j = 0; j < theta.size(); ++j) {
    if (theta.exact(j).is_zero()) return j;
  }
  return std::nullopt;
}

OrthogonalityResult verify_orthogonality(const BdfKernels& b, const DocKernels& theta, int n_max) {
  const int k = b.order();
  if (theta.order() != k) throw PreconditionError("verify_orthogonality: kernel orders differ");
  if (n_max >= k && theta.size() < n_max - k + 1) {
    throw PreconditionError("verify_orthogonality: need " + std::to_string(n_max - k + 1) +
                            " DOC kernels, have " + std::to_string(theta.size()));
  }

  OrthogonalityResult result;
  for (int n = k; n <= n_max; ++n) {
    for (int j = k; j <= n; ++j) {
      const Rational expected(n == j ? 1 : 0);
      Rational forward(0);
      Rational mutual(0);
      for (int l = j; l <= n; ++l) {
        // b vanishes beyond index k-1; skipping those terms keeps the sum exact.
        if (l - j < k) forward += theta.exact(n - l) * b.exact(l - j);
        if (n - l < k) mutual += b.exact(n - l) * theta.exact(l - j);
      }
      if (forward != expected || mutual != expected) {
        result.holds = false;
        result.first_failure = std::make_pair(n, j);
        result.failing_identity = forward != expected ? 1 : 2;
        return result;
      }
    }
  }
  return result;
}

std::vector<double> characteristic_polynomial(const BdfKernels& kernels) {
  // b_0 lambda^{k-1} + b_1 lambda^{k-2} + ... + b_{k-1}; stored lowest degree first.
  const int k = kernels.order();
  std::vector<double> p(static_cast<std::size_t>(k));
  for (int m = 0; m < k; ++m) p[static_cast<std::size_t>(k - 1 - m)] = kernels[m];
  return p;
}

namespace {

// Snap near-real roots onto the axis and make conjugate partners exact
// mirror images, so the closed form is real up to rounding.
void symmetrize_conjugates(std::vector<std::complex<double>>& roots) {
  constexpr double kRealTol = 1e-13;
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    if (std::abs(roots[i].imag()) <= kRealTol * std::max(1.0, std::abs(roots[i]))) {
      roots[i] = {roots[i].real(), 0.0};
      used[i] = true;
      continue;
    }
    std::size_t best = roots.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (used[j]) continue;
      const double dist = std::abs(roots[j] - std::conj(roots[i]));
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    if (best == roots.size()) throw NumericalError("complex root without conjugate partner");
    const std::complex<double> avg = 0.5 * (roots[i] + std::conj(roots[best]));
    roots[i] = avg;
    roots[best] = std::conj(avg);
    used[i] = used[best] = true;
  }
}

}  // namespace

CharacteristicRoots characteristic_roots(int k) {
  if (k < 2 || k > kMaxOrder) throw UnsupportedOrderError(k);
  const BdfKernels b = generate_bdf_kernels(k);
  const auto poly = characteristic_polynomial(b);

  CharacteristicRoots out;
  out.order = k;
  out.roots = poly::complex_roots(poly);
  symmetrize_conjugates(out.roots);
  std::sort(out.roots.begin(), out.roots.end(), [](const auto& a, const auto& c) {
    const double ma = std::abs(a), mc = std::abs(c);
    if (std::abs(ma - mc) > 1e-9 * std::max(ma, mc)) return ma > mc;
    return a.imag() > c.imag();
  });

  for (const auto& z : out.roots) {
    out.max_residual = std::max(out.max_residual, poly::relative_residual(poly, z));
    if (!(std::abs(z) < 1.0)) throw NumericalError("characteristic root outside the unit disk");
  }
  if (out.max_residual > 1e-12) {
    throw NumericalError("characteristic root residual " + std::to_string(out.max_residual) + " exceeds 1e-12");
  }

  // Vandermonde system sum_i d_i lambda_i^j = theta_j, j = 0..k-2.
  const auto dim = static_cast<Eigen::Index>(out.roots.size());
  const DocKernels theta = compute_doc_kernels(b, static_cast<int>(dim));
  Eigen::MatrixXcd vander(dim, dim);
  Eigen::VectorXcd rhs(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      vander(j, i) = std::pow(out.roots[static_cast<std::size_t>(i)], static_cast<int>(j));
    }
    rhs(j) = theta[static_cast<int>(j)];
  }
  const Eigen::VectorXcd d = vander.fullPivLu().solve(rhs);
  out.coefficients.assign(d.data(), d.data() + dim);
  return out;
}

std::complex<double> closed_form_theta_complex(const CharacteristicRoots& roots, int j) {
  if (j < 0) throw DomainError("closed_form_theta: negative index");
  std::complex<double> sum(0.0);
  for (std::size_t i = 0; i < roots.roots.size(); ++i) {
    sum += roots.coefficients[i] * std::pow(roots.roots[i], j);
  }
  return sum;
}

double closed_form_theta(const CharacteristicRoots& roots, int j) {
  const auto z = closed_form_theta_complex(roots, j);
  if (std::abs(z.imag()) >= 1e-10) {
    throw NumericalError("closed form theta has imaginary part " + std::to_string(z.imag()));
  }
  return z.real();
}

Rational decay_rho(int k) {
  switch (k) {
    case 3: return Rational(10, 3);
    case 4: return Rational(6);
    case 5: return Rational(96, 5);
    default: throw UnsupportedOrderError(k);
  }
}

DecayBound standard_decay_bound(int k) { return {decay_rho(k) / Rational(4), Rational(k, 7)}; }

DecayCertificate certify_decay(const DocKernels& theta, int j_max, const DecayBound& bound) {
  if (j_max < 0 || theta.size() < j_max + 1) {
    throw PreconditionError("certify_decay: need " + std::to_string(j_max + 1) + " DOC kernels");
  }
  DecayCertificate cert;
  cert.order = theta.order();
  cert.rho = bound.prefactor * Rational(4);
  cert.ratio = bound.ratio;
  cert.j_max = j_max;
  cert.valid = true;
  cert.max_slack = std::numeric_limits<double>::infinity();

  Rational envelope = bound.prefactor;
  for (int j = 0; j <= j_max; ++j) {
    const Rational slack = envelope - theta.exact(j).abs();
    cert.max_slack = std::min(cert.max_slack, slack.to_double());
    if (slack.sign() < 0 && cert.valid) {
      cert.valid = false;
      cert.first_violation = j;
    }
    envelope *= bound.ratio;
  }
  return cert;
}

DecayCertificate certify_decay(const DocKernels& theta, int j_max) {
  return certify_decay(theta, j_max, standard_decay_bound(theta.order()));
}

}  // namespace bdfdoc
