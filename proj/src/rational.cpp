#include "bdfdoc/rational.hpp"

#include <cmath>
#include <ostream>

#include "bdfdoc/errors.hpp"

namespace bdfdoc {

namespace {

mpz_class to_mpz(std::int64_t v) {
  // mpz_class has no int64 constructor on every platform; go through a string.
  return mpz_class(std::to_string(v));
}

}  // namespace

Rational::Rational(std::int64_t value) : value_(to_mpz(value)) {}

Rational::Rational(std::int64_t numerator, std::int64_t denominator) {
  if (denominator == 0) throw DomainError("rational with zero denominator");
  value_ = mpq_class(to_mpz(numerator), to_mpz(denominator));
  value_.canonicalize();
}

Rational::Rational(const mpq_class& value) : value_(value) { value_.canonicalize(); }

Rational Rational::parse(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(mpq_class(mpz_class(text)));
    mpz_class num(text.substr(0, slash));
    mpz_class den(text.substr(slash + 1));
    if (den == 0) throw DomainError("rational with zero denominator: " + text);
    return Rational(mpq_class(num, den));
  } catch (const std::invalid_argument&) {
    throw DomainError("malformed rational: '" + text + "'");
  }
}

std::string Rational::numerator_str() const { return value_.get_num().get_str(); }
std::string Rational::denominator_str() const { return value_.get_den().get_str(); }

std::string Rational::str() const {
  if (value_.get_den() == 1) return numerator_str();
  return numerator_str() + "/" + denominator_str();
}

double Rational::to_double() const {
  // mpq_get_d truncates; step one ulp away from zero when that is closer.
  const double d = mpq_get_d(value_.get_mpq_t());
  if (!std::isfinite(d) || value_ == 0) return d;
  const double next = std::nextafter(d, value_ < 0 ? -HUGE_VAL : HUGE_VAL);
  if (!std::isfinite(next)) return d;
  const mpq_class err_d = ::abs(value_ - mpq_class(d));
  const mpq_class err_next = ::abs(value_ - mpq_class(next));
  return err_next < err_d ? next : d;
}

Rational Rational::abs() const { return Rational(mpq_class(::abs(value_))); }

Rational Rational::pow(int exponent) const {
  if (exponent < 0) {
    if (is_zero()) throw DomainError("zero raised to a negative power");
    return (Rational(1) / *this).pow(-exponent);
  }
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), value_.get_num_mpz_t(), static_cast<unsigned long>(exponent));
  mpz_pow_ui(den.get_mpz_t(), value_.get_den_mpz_t(), static_cast<unsigned long>(exponent));
  return Rational(mpq_class(num, den));
}

Rational& Rational::operator+=(const Rational& rhs) {
  value_ += rhs.value_;
  return *this;
}

Rational& Rational::operator-=(const Rational& rhs) {
  value_ -= rhs.value_;
  return *this;
}

Rational& Rational::operator*=(const Rational& rhs) {
  value_ *= rhs.value_;
  return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
  if (rhs.is_zero()) throw DomainError("rational division by zero");
  value_ /= rhs.value_;
  return *this;
}

Rational Rational::operator-() const { return Rational(mpq_class(-value_)); }

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace bdfdoc
