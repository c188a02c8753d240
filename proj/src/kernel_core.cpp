#include "bdfdoc/kernel_core.hpp"

#include <string>

#include "bdfdoc/errors.hpp"

namespace bdfdoc {

BdfKernels::BdfKernels(int k, std::vector<Rational> b) : order_(k), exact_(std::move(b)) {
  values_.reserve(exact_.size());
  for (const auto& c : exact_) values_.push_back(c.to_double());
}

Rational BdfKernels::exact(int j) const {
  if (j < 0 || j >= order_) return Rational(0);
  return exact_[static_cast<std::size_t>(j)];
}

double BdfKernels::operator[](int j) const {
  if (j < 0 || j >= order_) return 0.0;
  return values_[static_cast<std::size_t>(j)];
}

BdfKernels generate_bdf_kernels(int k) {
  if (k < kMinOrder || k > kMaxOrder) throw UnsupportedOrderError(k);

  std::vector<Rational> coeffs(static_cast<std::size_t>(k), Rational(0));
  // power holds the coefficients of (1 - z)^{l-1}, grown by one convolution per term.
  std::vector<Rational> power{Rational(1)};
  for (int l = 1; l <= k; ++l) {
    const Rational weight(1, l);
    for (std::size_t i = 0; i < power.size(); ++i) coeffs[i] += weight * power[i];
    std::vector<Rational> next(power.size() + 1, Rational(0));
    for (std::size_t i = 0; i < power.size(); ++i) {
      next[i] += power[i];
      next[i + 1] -= power[i];
    }
    power = std::move(next);
  }
  return BdfKernels(k, std::move(coeffs));
}

BdfKernels kernels_from_coefficients(std::vector<Rational> b) {
  const int k = static_cast<int>(b.size());
  if (k < kMinOrder || k > kMaxOrder) throw UnsupportedOrderError(k);
  if (b.front().is_zero()) throw DomainError("leading kernel b_0 must be nonzero");
  return BdfKernels(k, std::move(b));
}

std::vector<double> bdf_apply(const BdfKernels& kernels,
                              std::span<const std::vector<double>> history, double tau) {
  const int k = kernels.order();
  if (!(tau > 0.0)) throw DomainError("time step must be positive");
  if (history.size() != static_cast<std::size_t>(k + 1)) {
    throw DimensionError("bdf_apply needs " + std::to_string(k + 1) + " history levels, got " +
                         std::to_string(history.size()));
  }
  const std::size_t len = history.front().size();
  for (const auto& level : history) {
    if (level.size() != len) throw DimensionError("history levels differ in length");
  }

  std::vector<double> out(len, 0.0);
  // history.back() is v^n; v^{n-j} sits at index k - j.
  for (int j = 0; j < k; ++j) {
    const auto& newer = history[static_cast<std::size_t>(k - j)];
    const auto& older = history[static_cast<std::size_t>(k - j - 1)];
    const double bj = kernels[j];
    for (std::size_t i = 0; i < len; ++i) out[i] += bj * (newer[i] - older[i]);
  }
  for (auto& v : out) v /= tau;
  return out;
}

Rational bdf_apply_exact(const BdfKernels& kernels, std::span<const Rational> history,
                         const Rational& tau) {
  const int k = kernels.order();
  if (tau.sign() <= 0) throw DomainError("time step must be positive");
  if (history.size() != static_cast<std::size_t>(k + 1)) {
    throw DimensionError("bdf_apply_exact needs " + std::to_string(k + 1) + " history levels");
  }
  Rational sum(0);
  for (int j = 0; j < k; ++j) {
    sum += kernels.exact(j) *
           (history[static_cast<std::size_t>(k - j)] - history[static_cast<std::size_t>(k - j - 1)]);
  }
  return sum / tau;
}

}  // namespace bdfdoc
