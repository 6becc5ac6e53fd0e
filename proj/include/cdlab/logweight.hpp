#pragma once

// Log-domain scalars for the cyclic-vector weights
//
//     xi_alpha = 1 / (|alpha|!)^(alpha!)
//
// and their ratios. xi_(3,3) is already ~1e-103 and xi_(4,4) ~1e-2653, so
// nothing here is ever materialized as a double except through to_float(),
// which reports saturation instead of silently returning 0.

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "cdlab/bigfloat.hpp"
#include "cdlab/multiindex.hpp"

namespace cdlab {

inline constexpr unsigned kDefaultPrecisionBits = 256;

enum class Saturation { none, underflow, overflow };

struct FloatValue {
  double value = 0.0;
  Saturation saturation = Saturation::none;

  bool saturated() const noexcept { return saturation != Saturation::none; }
};

// sign * exp(log_magnitude). sign == 0 iff the value is exactly zero, in which
// case log_magnitude is unused.
class LogScalar {
 public:
  explicit LogScalar(unsigned precision_bits = kDefaultPrecisionBits)
      : log_magnitude_(precision_bits) {}

  static LogScalar zero(unsigned precision_bits = kDefaultPrecisionBits) {
    return LogScalar(precision_bits);
  }
  static LogScalar one(unsigned precision_bits = kDefaultPrecisionBits);
  static LogScalar from_log(int sign, BigFloat log_magnitude);
  static LogScalar from_double(double value, unsigned precision_bits = kDefaultPrecisionBits);
  static LogScalar from_integer(const mpz_class& value,
                                unsigned precision_bits = kDefaultPrecisionBits);

  int sign() const noexcept { return sign_; }
  bool is_zero() const noexcept { return sign_ == 0; }
  const BigFloat& log_magnitude() const noexcept { return log_magnitude_; }
  unsigned precision_bits() const noexcept { return log_magnitude_.precision(); }

  /// log10 |x|; -infinity for zero.
  double log10_magnitude() const;
  /// log10 |x| to `digits` significant digits, exact-zero rendered as "-inf".
  std::string log10_string(int digits = 17) const;

  FloatValue to_float() const;

  LogScalar abs() const;
  LogScalar operator-() const;
  LogScalar& operator*=(const LogScalar& rhs);
  LogScalar& operator/=(const LogScalar& rhs);
  LogScalar& operator+=(const LogScalar& rhs);
  LogScalar& operator-=(const LogScalar& rhs) { return *this += -rhs; }

  friend LogScalar operator*(LogScalar a, const LogScalar& b) { return a *= b; }
  friend LogScalar operator/(LogScalar a, const LogScalar& b) { return a /= b; }
  friend LogScalar operator+(LogScalar a, const LogScalar& b) { return a += b; }
  friend LogScalar operator-(LogScalar a, const LogScalar& b) { return a -= b; }

  friend bool operator==(const LogScalar& a, const LogScalar& b);
  friend std::partial_ordering operator<=>(const LogScalar& a, const LogScalar& b);

 private:
  int sign_ = 0;
  BigFloat log_magnitude_;
};

/// Sum of |terms|, log-sum-exp anchored at the largest magnitude; exact
/// zeros are skipped.
LogScalar log_sum_magnitudes(std::span<const LogScalar> terms);

/// Signed sum, same anchoring.
LogScalar log_sum(std::span<const LogScalar> terms);

// Evaluates xi_alpha and ratios at a fixed working precision. ln(n!) is an
// exact summation of ln j, cached; alpha! stays an exact integer multiplier.
//
// The absolute error of log xi_alpha is about |log xi_alpha| * 2^-p. A weight
// is refused (PrecisionExhausted) unless that error stays below 2^-guard,
// i.e. bits(alpha!) + bits(ln |alpha|!) + guard <= p.
class XiWeights {
 public:
  explicit XiWeights(unsigned precision_bits = kDefaultPrecisionBits, unsigned guard_bits = 64);

  unsigned precision_bits() const noexcept { return precision_bits_; }
  unsigned guard_bits() const noexcept { return guard_bits_; }

  LogScalar xi(const MultiIndex& alpha) const;
  /// xi_num / xi_den computed as a difference of log weights.
  LogScalar xi_ratio(const MultiIndex& numerator, const MultiIndex& denominator) const;

  /// log xi_alpha = -(alpha!) ln(|alpha|!)
  BigFloat log_xi(const MultiIndex& alpha) const;
  BigFloat log_factorial(unsigned long n) const;
  bool representable(const MultiIndex& alpha) const;

 private:
  void require_representable(const MultiIndex& alpha) const;

  struct Cache {
    std::mutex mutex;
    std::vector<BigFloat> log_factorials;  // index n -> ln n!
  };

  unsigned precision_bits_;
  unsigned guard_bits_;
  std::shared_ptr<Cache> cache_;
};

namespace naive {

/// 1 / pow(|alpha|!, alpha!) in double precision: the direct evaluation the
/// log-domain path exists to avoid. Underflows to 0 from xi_(4,4) on.
double xi(const MultiIndex& alpha);

}  // namespace naive

}  // namespace cdlab
