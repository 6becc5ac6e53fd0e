#include "cdlab/logweight.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

#include "cdlab/errors.hpp"

namespace cdlab {

LogScalar LogScalar::one(unsigned precision_bits) {
  LogScalar out(precision_bits);
  out.sign_ = 1;
  return out;
}

LogScalar LogScalar::from_log(int sign, BigFloat log_magnitude) {
  LogScalar out(log_magnitude.precision());
  if (sign != 0) {
    out.sign_ = sign > 0 ? 1 : -1;
    out.log_magnitude_ = std::move(log_magnitude);
  }
  return out;
}

LogScalar LogScalar::from_double(double value, unsigned precision_bits) {
  if (!std::isfinite(value)) throw std::domain_error("LogScalar::from_double: non-finite value");
  if (value == 0.0) return zero(precision_bits);
  return from_log(value > 0 ? 1 : -1, log(BigFloat(std::fabs(value), precision_bits)));
}

LogScalar LogScalar::from_integer(const mpz_class& value, unsigned precision_bits) {
  if (value == 0) return zero(precision_bits);
  mpz_class magnitude = ::abs(value);
  return from_log(::sgn(value), log_of_integer(magnitude, precision_bits));
}

double LogScalar::log10_magnitude() const {
  if (is_zero()) return -std::numeric_limits<double>::infinity();
  return (log_magnitude_ / ln10(precision_bits())).to_double();
}

std::string LogScalar::log10_string(int digits) const {
  if (is_zero()) return "-inf";
  return (log_magnitude_ / ln10(precision_bits())).to_string(digits);
}

FloatValue LogScalar::to_float() const {
  if (is_zero()) return {0.0, Saturation::none};
  const double lg = log_magnitude_.to_double();
  static const double kLogMax = std::log(DBL_MAX);
  static const double kLogMinNormal = std::log(DBL_MIN);
  if (lg > kLogMax) {
    return {sign_ * std::numeric_limits<double>::infinity(), Saturation::overflow};
  }
  const double v = sign_ * exp(log_magnitude_).to_double();
  if (lg < kLogMinNormal) return {v, Saturation::underflow};
  return {v, Saturation::none};
}

LogScalar LogScalar::abs() const {
  LogScalar out(*this);
  if (out.sign_ < 0) out.sign_ = 1;
  return out;
}

LogScalar LogScalar::operator-() const {
  LogScalar out(*this);
  out.sign_ = -out.sign_;
  return out;
}

LogScalar& LogScalar::operator*=(const LogScalar& rhs) {
  if (is_zero() || rhs.is_zero()) {
    sign_ = 0;
    log_magnitude_ = BigFloat(std::max(precision_bits(), rhs.precision_bits()));
    return *this;
  }
  sign_ *= rhs.sign_;
  log_magnitude_ += rhs.log_magnitude_;
  return *this;
}

LogScalar& LogScalar::operator/=(const LogScalar& rhs) {
  if (rhs.is_zero()) throw std::domain_error("LogScalar division by zero");
  if (is_zero()) return *this;
  sign_ *= rhs.sign_;
  log_magnitude_ -= rhs.log_magnitude_;
  return *this;
}

LogScalar& LogScalar::operator+=(const LogScalar& rhs) {
  if (rhs.is_zero()) return *this;
  if (is_zero()) {
    const unsigned bits = std::max(precision_bits(), rhs.precision_bits());
    *this = rhs;
    if (log_magnitude_.precision() < bits) log_magnitude_ = log_magnitude_ + BigFloat(bits);
    return *this;
  }
  const bool this_larger = log_magnitude_ >= rhs.log_magnitude_;
  const LogScalar& big = this_larger ? *this : rhs;
  const LogScalar& small = this_larger ? rhs : *this;
  const BigFloat diff = small.log_magnitude_ - big.log_magnitude_;  // <= 0
  const int sign = big.sign_;
  BigFloat lg = big.log_magnitude_;
  if (big.sign_ == small.sign_) {
    lg += log1p(exp(diff));
  } else {
    if (diff.is_zero()) {
      *this = zero(std::max(precision_bits(), rhs.precision_bits()));
      return *this;
    }
    // log(1 - e^diff) = log(-expm1(diff))
    lg += log(-expm1(diff));
  }
  sign_ = sign;
  log_magnitude_ = std::move(lg);
  return *this;
}

bool operator==(const LogScalar& a, const LogScalar& b) {
  if (a.sign_ != b.sign_) return false;
  return a.sign_ == 0 || a.log_magnitude_ == b.log_magnitude_;
}

std::partial_ordering operator<=>(const LogScalar& a, const LogScalar& b) {
  if (a.sign_ != b.sign_) return a.sign_ <=> b.sign_;
  if (a.sign_ == 0) return std::partial_ordering::equivalent;
  const auto c = a.log_magnitude_ <=> b.log_magnitude_;
  if (a.sign_ > 0) return c;
  // both negative: larger magnitude is the smaller value
  if (c == std::partial_ordering::less) return std::partial_ordering::greater;
  if (c == std::partial_ordering::greater) return std::partial_ordering::less;
  return c;
}

namespace {

LogScalar anchored_sum(std::span<const LogScalar> terms, bool magnitudes) {
  unsigned bits = MPFR_PREC_MIN;
  const LogScalar* anchor = nullptr;
  for (const auto& t : terms) {
    bits = std::max(bits, t.precision_bits());
    if (t.is_zero()) continue;
    if (!anchor || t.log_magnitude() > anchor->log_magnitude()) anchor = &t;
  }
  if (!anchor) return LogScalar::zero(bits);
  BigFloat total(0L, bits + 16);
  for (const auto& t : terms) {
    if (t.is_zero()) continue;
    BigFloat scaled = exp(t.log_magnitude() - anchor->log_magnitude());
    if (!magnitudes && t.sign() < 0) {
      total -= scaled;
    } else {
      total += scaled;
    }
  }
  if (total.is_zero()) return LogScalar::zero(bits);
  const int sign = total.sign();
  BigFloat lg = anchor->log_magnitude() + log(abs(total));
  mpfr_prec_round(lg.get(), bits, MPFR_RNDN);
  return LogScalar::from_log(sign, std::move(lg));
}

}  // namespace

LogScalar log_sum_magnitudes(std::span<const LogScalar> terms) { return anchored_sum(terms, true); }

LogScalar log_sum(std::span<const LogScalar> terms) { return anchored_sum(terms, false); }

XiWeights::XiWeights(unsigned precision_bits, unsigned guard_bits)
    : precision_bits_(precision_bits), guard_bits_(guard_bits), cache_(std::make_shared<Cache>()) {
  if (precision_bits < 64) throw std::invalid_argument("precision_bits must be at least 64");
  if (guard_bits >= precision_bits) {
    throw std::invalid_argument("guard_bits must be smaller than precision_bits");
  }
}

BigFloat XiWeights::log_factorial(unsigned long n) const {
  std::lock_guard lock(cache_->mutex);
  auto& table = cache_->log_factorials;
  const unsigned work_bits = precision_bits_ + 32;
  if (table.empty()) table.emplace_back(0L, work_bits);
  while (table.size() <= n) {
    const long j = static_cast<long>(table.size());
    table.push_back(table.back() + log(BigFloat(j, work_bits)));
  }
  BigFloat out = table[n];
  mpfr_prec_round(out.get(), precision_bits_, MPFR_RNDN);
  return out;
}

bool XiWeights::representable(const MultiIndex& alpha) const {
  const BigNat fact = mi_factorial(alpha);
  const std::size_t fact_bits = mpz_sizeinbase(fact.get_mpz_t(), 2);
  // ln(n!) <= n ln n; bits of its integer part
  const double n = static_cast<double>(alpha.degree());
  const double ln_fact = n > 1 ? std::lgamma(n + 1.0) : 0.0;
  const std::size_t log_bits = ln_fact >= 1.0 ? static_cast<std::size_t>(std::log2(ln_fact)) + 1 : 0;
  return fact_bits + log_bits + guard_bits_ <= precision_bits_;
}

void XiWeights::require_representable(const MultiIndex& alpha) const {
  if (!representable(alpha)) {
    throw PrecisionExhausted("xi" + alpha.to_string() + " needs more than " +
                             std::to_string(precision_bits_) +
                             " bits to keep its log-weight accurate to 2^-" +
                             std::to_string(guard_bits_));
  }
}

BigFloat XiWeights::log_xi(const MultiIndex& alpha) const {
  require_representable(alpha);
  BigFloat out = log_factorial(alpha.degree());
  out *= mi_factorial(alpha);
  return -out;
}

LogScalar XiWeights::xi(const MultiIndex& alpha) const {
  BigFloat lg = log_xi(alpha);
  if (lg.is_zero()) return LogScalar::one(precision_bits_);
  return LogScalar::from_log(1, std::move(lg));
}

LogScalar XiWeights::xi_ratio(const MultiIndex& numerator, const MultiIndex& denominator) const {
  if (numerator.size() != denominator.size()) {
    throw DimensionMismatch("xi_ratio: indices of different dimension");
  }
  if (numerator == denominator) {
    require_representable(numerator);
    return LogScalar::one(precision_bits_);
  }
  return LogScalar::from_log(1, log_xi(numerator) - log_xi(denominator));
}

namespace naive {

double xi(const MultiIndex& alpha) {
  double degree_fact = 1.0;
  for (unsigned long j = 2; j <= alpha.degree(); ++j) degree_fact *= static_cast<double>(j);
  double index_fact = 1.0;
  for (unsigned a : alpha.entries()) {
    for (unsigned j = 2; j <= a; ++j) index_fact *= static_cast<double>(j);
  }
  return 1.0 / std::pow(degree_fact, index_fact);
}

}  // namespace naive

}  // namespace cdlab
