#include "bdfdoc/starting_effects.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "bdfdoc/errors.hpp"

namespace bdfdoc {

Rational StartingCoefficients::max_abs() const {
  Rational best(0);
  for (const auto& v : c) best = std::max(best, v.abs());
  return best;
}

StartingCoefficients starting_coefficients(int k, int n, const DocKernels& theta, const BdfKernels& b) {
  if (n < k) throw PreconditionError("starting_coefficients: n must be >= k");
  if (b.order() != k || theta.order() != k) throw PreconditionError("starting_coefficients: order mismatch");
  if (theta.size() < n - k + 1) {
    throw PreconditionError("starting_coefficients: need " + std::to_string(n - k + 1) + " DOC kernels");
  }
  StartingCoefficients out;
  out.order = k;
  out.step = n;
  out.c.assign(static_cast<std::size_t>(k - 1), Rational(0));
  for (int l = 1; l < k; ++l) {
    Rational sum(0);
    // b_{j-l} vanishes once j - l >= k.
    for (int j = k; j <= std::min(n, l + k - 1); ++j) sum += theta.exact(n - j) * b.exact(j - l);
    out.c[static_cast<std::size_t>(l - 1)] = std::move(sum);
  }
  return out;
}

int starting_generic_from(int k) { return 2 * k - 2; }

std::vector<Rational> starting_envelope(int k) {
  const BdfKernels b = generate_bdf_kernels(k);
  const Rational ratio(k, 7);
  std::vector<Rational> env;
  for (int l = 1; l < k; ++l) {
    // theta_{n-l-m} is bounded by (rho/4)(k/7)^{n-k} (k/7)^{k-l-m}.
    Rational direct(0);
    for (int m = k - l; m <= k - 1; ++m) direct += b.exact(m).abs() * ratio.pow(k - l - m);
    Rational collapsed(0);
    for (int m = 0; m <= k - l - 1; ++m) collapsed += b.exact(m).abs() * ratio.pow(k - l - m);
    env.push_back(std::min(direct, collapsed));
  }
  return env;
}

StartingBoundConstant certify_starting_bound(int k, int n_max) {
  if (k < 3 || k > 5) throw UnsupportedOrderError(k);
  if (n_max < k) throw PreconditionError("certify_starting_bound: n_max must be >= k");

  const BdfKernels b = generate_bdf_kernels(k);
  // The collapsed envelope reaches theta_{n-1}, so certify decay that far.
  const DocKernels theta = compute_doc_kernels(b, n_max);
  const Rational rho = decay_rho(k);
  const Rational ratio(k, 7);
  const int generic_from = starting_generic_from(k);

  StartingBoundConstant out;
  out.order = k;
  out.j_max_checked = n_max;
  out.envelope = starting_envelope(k);

  Rational c_I(1);
  const Rational env_max = *std::max_element(out.envelope.begin(), out.envelope.end());
  if (n_max >= generic_from) c_I = std::max(c_I, Rational(2) * env_max);

  // Exact rescaled magnitudes 8 max_l |c_l(n)| / (rho (k/7)^{n-k}).
  std::vector<Rational> magnitudes;
  std::vector<Rational> scaled;
  Rational geometric(1);
  for (int n = k; n <= n_max; ++n) {
    const Rational mag = starting_coefficients(k, n, theta, b).max_abs();
    const Rational rescaled = Rational(8) * mag / (rho * geometric);
    magnitudes.push_back(mag);
    scaled.push_back(geometric);
    if (n < generic_from) {
      out.base_cases.push_back({n, rescaled});
      c_I = std::max(c_I, rescaled);
    }
    out.c_I_tight = std::max(out.c_I_tight, rescaled);
    geometric *= ratio;
  }
  out.c_I = c_I;

  out.valid = certify_decay(theta, n_max - 1).valid;
  out.envelope_slack_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < magnitudes.size(); ++i) {
    const Rational slack = c_I * rho / Rational(8) * scaled[i] - magnitudes[i];
    out.envelope_slack_min = std::min(out.envelope_slack_min, slack.to_double());
    if (slack.sign() < 0) out.valid = false;
  }
  return out;
}

CumulativeStartingSum cumulative_starting_sum(int k, int n, const Rational& c_I) {
  if (k < 3 || k > 5) throw UnsupportedOrderError(k);
  if (n < k) throw PreconditionError("cumulative_starting_sum: n must be >= k");
  const BdfKernels b = generate_bdf_kernels(k);
  const DocKernels theta = compute_doc_kernels(b, n - k + 1);

  CumulativeStartingSum out;
  out.per_ell.assign(static_cast<std::size_t>(k - 1), Rational(0));
  for (int j = k; j <= n; ++j) {
    const auto coeffs = starting_coefficients(k, j, theta, b);
    out.total += coeffs.max_abs();
    for (std::size_t l = 0; l < coeffs.c.size(); ++l) out.per_ell[l] += coeffs.c[l].abs();
  }
  out.bound = Rational(7) * c_I * decay_rho(k) / (Rational(8) * Rational(7 - k));
  out.within_bound = out.total <= out.bound;
  return out;
}

}  // namespace bdfdoc
