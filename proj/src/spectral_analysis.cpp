#include "bdfdoc/spectral_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "bdfdoc/doc_kernels.hpp"
#include "bdfdoc/errors.hpp"
#include "bdfdoc/polynomial.hpp"

namespace bdfdoc {

GeneratingFunction make_generating_function(const BdfKernels& kernels) {
  GeneratingFunction g;
  g.order = kernels.order();
  for (const auto& b : kernels.exact()) g.cosine_coefficients.push_back(Rational(2) * b);
  return g;
}

double eval_generating_function(const GeneratingFunction& g, double phi) {
  double sum = 0.0;
  for (std::size_t j = 0; j < g.cosine_coefficients.size(); ++j) {
    sum += g.cosine_coefficients[j].to_double() * std::cos(static_cast<double>(j) * phi);
  }
  return sum;
}

std::vector<Rational> chebyshev_form(const GeneratingFunction& g) {
  return poly::chebyshev_to_power(g.cosine_coefficients);
}

Rational eval_generating_function_at_cos(const GeneratingFunction& g, const Rational& cos_phi) {
  if (cos_phi < Rational(-1) || cos_phi > Rational(1)) throw DomainError("cos(phi) outside [-1, 1]");
  return poly::evaluate(chebyshev_form(g), cos_phi);
}

namespace {

enum class Extremum { Min, Max };

bool is_zero_poly(const std::vector<Rational>& p) {
  return std::all_of(p.begin(), p.end(), [](const Rational& c) { return c.is_zero(); });
}

SigmaBound locate_extremum(const GeneratingFunction& g, double tol, Extremum which) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  const auto z = chebyshev_form(g);
  auto dz = poly::derivative(z);
  while (dz.size() > 1 && dz.back().is_zero()) dz.pop_back();

  std::vector<Rational> exact_candidates{Rational(-1), Rational(1)};
  std::vector<double> float_candidates;
  if (!is_zero_poly(dz)) {
    if (dz.size() == 2) {
      const Rational root = -dz[0] / dz[1];
      if (root >= Rational(-1) && root <= Rational(1)) exact_candidates.push_back(root);
    } else if (dz.size() > 2) {
      float_candidates = poly::real_roots_in(poly::to_real(dz), -1.0, 1.0, tol);
    }
  }

  const bool want_min = which == Extremum::Min;
  SigmaBound best;
  best.order = g.order;
  bool have = false;
  for (const auto& x : exact_candidates) {
    const Rational v = poly::evaluate(z, x);
    if (!have || (want_min ? v < *best.exact_sigma : v > *best.exact_sigma)) {
      best.exact_sigma = v;
      best.exact_argmin_cos = x;
      have = true;
    }
  }
  best.sigma = best.exact_sigma->to_double();
  best.argmin_cos = best.exact_argmin_cos->to_double();

  const auto zr = poly::to_real(z);
  for (double x : float_candidates) {
    const double v = poly::evaluate(zr, x);
    if (want_min ? v < best.sigma : v > best.sigma) {
      best.sigma = v;
      best.argmin_cos = x;
      best.exact_sigma.reset();
      best.exact_argmin_cos.reset();
    }
  }
  if (best.exact_sigma) best.exact_form = best.exact_sigma->str();
  return best;
}

}  // namespace

SigmaBound minimize_generating_function(const GeneratingFunction& g, double tol) {
  return locate_extremum(g, tol, Extremum::Min);
}

SigmaBound maximize_generating_function(const GeneratingFunction& g, double tol) {
  return locate_extremum(g, tol, Extremum::Max);
}

ToeplitzForm::ToeplitzForm(BdfKernels kernels, int m) : kernels_(std::move(kernels)), m_(m) {
  if (m < 1) throw PreconditionError("Toeplitz dimension must be >= 1");
}

Rational ToeplitzForm::lower_exact(int i, int j) const {
  return i >= j ? kernels_.exact(i - j) : Rational(0);
}

Rational ToeplitzForm::symmetric_exact(int i, int j) const {
  if (i == j) return Rational(2) * kernels_.exact(0);
  return kernels_.exact(std::abs(i - j));
}

double ToeplitzForm::symmetric(int i, int j) const {
  if (i == j) return 2.0 * kernels_[0];
  return kernels_[std::abs(i - j)];
}

Eigen::MatrixXd ToeplitzForm::dense_lower() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m_, m_);
  for (int i = 0; i < m_; ++i) {
    for (int j = std::max(0, i - kernels_.order() + 1); j <= i; ++j) a(i, j) = kernels_[i - j];
  }
  return a;
}

Eigen::MatrixXd ToeplitzForm::dense_symmetric() const {
  const Eigen::MatrixXd l = dense_lower();
  return l + l.transpose();
}

double ToeplitzForm::quadratic_form(const Eigen::VectorXd& w) const {
  if (w.size() != m_) throw DimensionError("quadratic_form: vector length differs from dimension");
  const int k = kernels_.order();
  double sum = 0.0;
  for (int m = 0; m < m_; ++m) {
    double inner = 0.0;
    for (int j = std::max(0, m - k + 1); j <= m; ++j) inner += kernels_[m - j] * w(j);
    sum += w(m) * inner;
  }
  return 2.0 * sum;
}

ToeplitzForm build_toeplitz(int k, int m) {
  if (m < 1) throw PreconditionError("build_toeplitz: m must be >= 1");
  return ToeplitzForm(generate_bdf_kernels(k), m);
}

int count_eigenvalues_below(const ToeplitzForm& t, double x) {
  const int m = t.dim();
  const int p = t.order() - 1;  // half bandwidth
  const int width = p + 1;
  // l(i, c) holds L(i, i - p + c) for c = 0..p-1; column p is unused.
  std::vector<double> l(static_cast<std::size_t>(m) * static_cast<std::size_t>(width), 0.0);
  std::vector<double> d(static_cast<std::size_t>(m), 0.0);
  auto L = [&](int i, int j) -> double& {
    return l[static_cast<std::size_t>(i) * static_cast<std::size_t>(width) + static_cast<std::size_t>(j - i + p)];
  };
  const double scale = std::abs(t.symmetric(0, 0)) + std::abs(x) + 1.0;
  const double tiny = std::numeric_limits<double>::epsilon() * scale;

  int negatives = 0;
  for (int i = 0; i < m; ++i) {
    const int first = std::max(0, i - p);
    for (int j = first; j < i; ++j) {
      double s = t.symmetric(i, j);
      for (int q = first; q < j; ++q) s -= L(i, q) * L(j, q) * d[static_cast<std::size_t>(q)];
      L(i, j) = s / d[static_cast<std::size_t>(j)];
    }
    double di = t.symmetric(i, i) - x;
    for (int q = first; q < i; ++q) di -= L(i, q) * L(i, q) * d[static_cast<std::size_t>(q)];
    if (std::abs(di) < tiny) di = -tiny;
    d[static_cast<std::size_t>(i)] = di;
    if (di < 0.0) ++negatives;
  }
  return negatives;
}

namespace {

std::pair<double, double> gershgorin_interval(const ToeplitzForm& t) {
  const double center = t.symmetric(0, 0);
  double radius = 0.0;
  for (int j = 1; j < t.order(); ++j) radius += 2.0 * std::abs(t.kernels()[j]);
  return {center - radius - 1.0, center + radius + 1.0};
}

}  // namespace

double min_eigenvalue(const ToeplitzForm& t, double tol) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  auto [lo, hi] = gershgorin_interval(t);
  for (int iter = 0; iter < 200 && hi - lo > tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (count_eigenvalues_below(t, mid) >= 1) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  if (hi - lo > tol) throw NumericalError("min_eigenvalue bisection did not converge");
  return 0.5 * (lo + hi);
}

double max_eigenvalue(const ToeplitzForm& t, double tol) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  auto [lo, hi] = gershgorin_interval(t);
  for (int iter = 0; iter < 200 && hi - lo > tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (count_eigenvalues_below(t, mid) >= t.dim()) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  if (hi - lo > tol) throw NumericalError("max_eigenvalue bisection did not converge");
  return 0.5 * (lo + hi);
}

double quadratic_form_check(int k, int n, int trials, std::uint64_t seed) {
  if (n < k) throw PreconditionError("quadratic_form_check: n must be >= k");
  if (trials < 1) throw PreconditionError("quadratic_form_check: trials must be >= 1");
  const ToeplitzForm form = build_toeplitz(k, n - k + 1);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd w(form.dim());
  double best = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < trials; ++trial) {
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = dist(rng);
    const double norm2 = w.squaredNorm();
    if (norm2 == 0.0) continue;
    best = std::min(best, form.quadratic_form(w) / norm2);
  }
  return best;
}

DocFormCheck doc_positive_definiteness_check(int k, int n, int trials, std::uint64_t seed) {
  if (n < k) throw PreconditionError("doc_positive_definiteness_check: n must be >= k");
  if (trials < 1) throw PreconditionError("doc_positive_definiteness_check: trials must be >= 1");
  const int m = n - k + 1;
  const DocKernels theta = compute_doc_kernels(generate_bdf_kernels(k), m);
  const auto th = theta.values();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> w(static_cast<std::size_t>(m));
  DocFormCheck out;
  out.min_ratio = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < trials; ++trial) {
    double norm2 = 0.0;
    for (auto& v : w) {
      v = dist(rng);
      norm2 += v * v;
    }
    double form = 0.0;
    for (int i = 0; i < m; ++i) {
      double inner = 0.0;
      for (int j = 0; j <= i; ++j) inner += th[static_cast<std::size_t>(i - j)] * w[static_cast<std::size_t>(j)];
      form += w[static_cast<std::size_t>(i)] * inner;
    }
    form *= 2.0;
    if (!(form > 0.0)) out.all_positive = false;
    if (norm2 > 0.0) out.min_ratio = std::min(out.min_ratio, form / norm2);
  }
  return out;
}

}  // namespace bdfdoc
