#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <compare>
#include <string>

namespace cdlab {

// Value-semantic owner of an mpfr_t. Each value carries its own precision;
// binary operations round to the larger of the two operand precisions.
class BigFloat {
 public:
  explicit BigFloat(unsigned precision_bits = 256);
  BigFloat(long value, unsigned precision_bits);
  BigFloat(double value, unsigned precision_bits);
  BigFloat(const mpz_class& value, unsigned precision_bits);
  /// Decimal literal, e.g. "1e-50".
  BigFloat(const std::string& decimal, unsigned precision_bits);

  BigFloat(const BigFloat& other);
  BigFloat(BigFloat&& other) noexcept;
  BigFloat& operator=(const BigFloat& other);
  BigFloat& operator=(BigFloat&& other) noexcept;
  ~BigFloat();

  unsigned precision() const noexcept { return static_cast<unsigned>(mpfr_get_prec(value_)); }

  mpfr_srcptr get() const noexcept { return value_; }
  mpfr_ptr get() noexcept { return value_; }

  bool is_zero() const noexcept { return mpfr_zero_p(value_) != 0; }
  bool is_finite() const noexcept { return mpfr_number_p(value_) != 0; }
  int sign() const noexcept { return mpfr_sgn(value_); }

  double to_double() const noexcept { return mpfr_get_d(value_, MPFR_RNDN); }
  /// Scientific notation with `digits` significant digits.
  std::string to_string(int digits = 20) const;

  BigFloat operator-() const;
  BigFloat& operator+=(const BigFloat& rhs);
  BigFloat& operator-=(const BigFloat& rhs);
  BigFloat& operator*=(const BigFloat& rhs);
  BigFloat& operator/=(const BigFloat& rhs);
  BigFloat& operator*=(const mpz_class& rhs);

  friend BigFloat operator+(BigFloat lhs, const BigFloat& rhs) { return lhs += rhs; }
  friend BigFloat operator-(BigFloat lhs, const BigFloat& rhs) { return lhs -= rhs; }
  friend BigFloat operator*(BigFloat lhs, const BigFloat& rhs) { return lhs *= rhs; }
  friend BigFloat operator/(BigFloat lhs, const BigFloat& rhs) { return lhs /= rhs; }
  friend BigFloat operator*(BigFloat lhs, const mpz_class& rhs) { return lhs *= rhs; }

  friend bool operator==(const BigFloat& a, const BigFloat& b) {
    return mpfr_equal_p(a.value_, b.value_) != 0;
  }
  friend std::partial_ordering operator<=>(const BigFloat& a, const BigFloat& b);

 private:
  void ensure_precision(unsigned bits);

  mpfr_t value_;
};

BigFloat abs(BigFloat x);
BigFloat log(const BigFloat& x);
BigFloat exp(const BigFloat& x);
BigFloat log1p(const BigFloat& x);
/// exp(x) - 1, accurate for small |x|
BigFloat expm1(const BigFloat& x);
BigFloat sqrt(const BigFloat& x);
BigFloat log_of_integer(const mpz_class& n, unsigned precision_bits);
/// ln 10 at the given precision.
BigFloat ln10(unsigned precision_bits);

}  // namespace cdlab
