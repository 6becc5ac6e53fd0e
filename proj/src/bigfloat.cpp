#include "cdlab/bigfloat.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace cdlab {

BigFloat::BigFloat(unsigned precision_bits) {
  mpfr_init2(value_, std::max<unsigned>(precision_bits, MPFR_PREC_MIN));
  mpfr_set_zero(value_, 1);
}

BigFloat::BigFloat(long value, unsigned precision_bits) : BigFloat(precision_bits) {
  mpfr_set_si(value_, value, MPFR_RNDN);
}

BigFloat::BigFloat(double value, unsigned precision_bits) : BigFloat(precision_bits) {
  mpfr_set_d(value_, value, MPFR_RNDN);
}

BigFloat::BigFloat(const mpz_class& value, unsigned precision_bits) : BigFloat(precision_bits) {
  mpfr_set_z(value_, value.get_mpz_t(), MPFR_RNDN);
}

BigFloat::BigFloat(const std::string& decimal, unsigned precision_bits)
    : BigFloat(precision_bits) {
  if (mpfr_set_str(value_, decimal.c_str(), 10, MPFR_RNDN) != 0) {
    throw std::invalid_argument("not a decimal number: " + decimal);
  }
}

BigFloat::BigFloat(const BigFloat& other) {
  mpfr_init2(value_, mpfr_get_prec(other.value_));
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& other) noexcept {
  // leave `other` as a valid minimum-precision zero
  mpfr_init2(value_, MPFR_PREC_MIN);
  mpfr_swap(value_, other.value_);
}

BigFloat& BigFloat::operator=(const BigFloat& other) {
  if (this != &other) {
    mpfr_set_prec(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& other) noexcept {
  mpfr_swap(value_, other.value_);
  return *this;
}

BigFloat::~BigFloat() { mpfr_clear(value_); }

void BigFloat::ensure_precision(unsigned bits) {
  if (bits > precision()) mpfr_prec_round(value_, bits, MPFR_RNDN);
}

std::string BigFloat::to_string(int digits) const {
  if (mpfr_nan_p(value_)) return "nan";
  if (mpfr_inf_p(value_)) return sign() < 0 ? "-inf" : "inf";
  std::vector<char> buf(static_cast<std::size_t>(digits) + 64);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Re", digits - 1, value_);
  return buf.data();
}

BigFloat BigFloat::operator-() const {
  BigFloat out(*this);
  mpfr_neg(out.value_, out.value_, MPFR_RNDN);
  return out;
}

BigFloat& BigFloat::operator+=(const BigFloat& rhs) {
  ensure_precision(rhs.precision());
  mpfr_add(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator-=(const BigFloat& rhs) {
  ensure_precision(rhs.precision());
  mpfr_sub(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator*=(const BigFloat& rhs) {
  ensure_precision(rhs.precision());
  mpfr_mul(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator/=(const BigFloat& rhs) {
  ensure_precision(rhs.precision());
  mpfr_div(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}

BigFloat& BigFloat::operator*=(const mpz_class& rhs) {
  mpfr_mul_z(value_, value_, rhs.get_mpz_t(), MPFR_RNDN);
  return *this;
}

std::partial_ordering operator<=>(const BigFloat& a, const BigFloat& b) {
  if (mpfr_unordered_p(a.value_, b.value_)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp(a.value_, b.value_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

BigFloat abs(BigFloat x) {
  mpfr_abs(x.get(), x.get(), MPFR_RNDN);
  return x;
}

BigFloat log(const BigFloat& x) {
  BigFloat out(x.precision());
  mpfr_log(out.get(), x.get(), MPFR_RNDN);
  return out;
}

BigFloat exp(const BigFloat& x) {
  BigFloat out(x.precision());
  mpfr_exp(out.get(), x.get(), MPFR_RNDN);
  return out;
}

BigFloat log1p(const BigFloat& x) {
  BigFloat out(x.precision());
  mpfr_log1p(out.get(), x.get(), MPFR_RNDN);
  return out;
}

BigFloat expm1(const BigFloat& x) {
  BigFloat out(x.precision());
  mpfr_expm1(out.get(), x.get(), MPFR_RNDN);
  return out;
}

BigFloat sqrt(const BigFloat& x) {
  BigFloat out(x.precision());
  mpfr_sqrt(out.get(), x.get(), MPFR_RNDN);
  return out;
}

BigFloat log_of_integer(const mpz_class& n, unsigned precision_bits) {
  // convert with enough headroom that the conversion itself is exact for
  // integers up to the working precision
  BigFloat x(n, std::max<unsigned>(precision_bits, static_cast<unsigned>(mpz_sizeinbase(n.get_mpz_t(), 2))));
  BigFloat out(precision_bits);
  mpfr_log(out.get(), x.get(), MPFR_RNDN);
  return out;
}

BigFloat ln10(unsigned precision_bits) { return log(BigFloat(10L, precision_bits)); }

}  // namespace cdlab
