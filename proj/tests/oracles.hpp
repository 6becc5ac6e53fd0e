#pragma once

// Reference computations for the test suites. Everything here is written
// against Boost.Multiprecision and plain loops so that it shares no code path
// with the library under test.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace oracle {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;
using Float = boost::multiprecision::cpp_bin_float_100;
using Index = std::vector<unsigned>;

inline cpp_int fact(unsigned n) {
  cpp_int out = 1;
  for (unsigned j = 2; j <= n; ++j) out *= j;
  return out;
}

inline unsigned degree(const Index& a) {
  unsigned d = 0;
  for (unsigned x : a) d += x;
  return d;
}

inline cpp_int index_fact(const Index& a) {
  cpp_int out = 1;
  for (unsigned x : a) out *= fact(x);
  return out;
}

inline Index add(const Index& a, const Index& b) {
  Index out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline Index diag(std::size_t m, unsigned k) { return Index(m, k); }

inline cpp_int power(const cpp_int& base, const cpp_int& exponent) {
  if (exponent > 1000000) throw std::invalid_argument("oracle power exponent too large");
  return boost::multiprecision::pow(base, exponent.convert_to<unsigned>());
}

/// 1 / (|a|!)^(a!) as an exact rational.
inline cpp_rational xi(const Index& a) {
  return cpp_rational(cpp_int(1), power(fact(degree(a)), index_fact(a)));
}

/// xi_num / xi_den exactly: (|den|!)^(den!) / (|num|!)^(num!).
inline cpp_rational xi_ratio(const Index& num, const Index& den) {
  return cpp_rational(power(fact(degree(den)), index_fact(den)),
                      power(fact(degree(num)), index_fact(num)));
}

/// Whether xi_ratio stays small enough to evaluate exactly.
inline bool ratio_computable(const Index& num, const Index& den, unsigned limit = 20000) {
  return index_fact(num) <= limit && index_fact(den) <= limit;
}

/// log10 of a positive integer from its leading bits.
inline double log10_int(const cpp_int& n) {
  if (n <= 0) throw std::invalid_argument("log10 of non-positive integer");
  const unsigned bits = boost::multiprecision::msb(n) + 1;
  if (bits <= 60) return std::log10(n.convert_to<double>());
  const cpp_int top = n >> (bits - 60);
  return std::log10(top.convert_to<double>()) + (bits - 60) * std::log10(2.0);
}

inline double log10_rational(const cpp_rational& q) {
  return log10_int(boost::multiprecision::numerator(q)) - log10_int(boost::multiprecision::denominator(q));
}

/// High-precision value of a rational whose magnitude fits cpp_bin_float.
inline Float to_float(const cpp_rational& q) {
  return Float(boost::multiprecision::numerator(q)) / Float(boost::multiprecision::denominator(q));
}

/// Enumerates all m-tuples of total degree d (any order).
inline void layer(std::size_t m, unsigned d, std::vector<Index>& out, Index prefix = {}) {
  if (prefix.size() + 1 == m) {
    prefix.push_back(d);
    out.push_back(prefix);
    return;
  }
  for (unsigned first = 0; first <= d; ++first) {
    Index next = prefix;
    next.push_back(first);
    layer(m, d - first, out, next);
  }
}

inline std::vector<Index> window(std::size_t m, unsigned N) {
  std::vector<Index> out;
  for (unsigned d = 0; d <= N; ++d) layer(m, d, out);
  return out;
}

/// Layer-0 residual norm for the unweighted model: sqrt of the sum over the
/// degree <= N window (eta != 0) of (xi_(eta+S)/xi_S)^2, S = (k+1) eps. Terms
/// too large to evaluate exactly are dropped only when a crude integer bound
/// shows them below 10^-300 relative to the dominant term; otherwise the
/// oracle refuses.
inline Float layer0_error(std::size_t m, unsigned N, unsigned k) {
  const Index S = diag(m, k + 1);
  Float sum = 0;
  std::optional<double> dominant_log10;
  std::vector<Index> skipped;
  for (const auto& eta : window(m, N)) {
    if (degree(eta) == 0) continue;
    const Index num = add(eta, S);
    if (!ratio_computable(num, S)) {
      skipped.push_back(num);
      continue;
    }
    const cpp_rational r = xi_ratio(num, S);
    const double lg = log10_rational(r);
    if (!dominant_log10 || lg > *dominant_log10) dominant_log10 = lg;
    if (lg < -100000) continue;  // below cpp_bin_float range of interest
    const Float v = to_float(r);
    sum += v * v;
  }
  if (!dominant_log10) throw std::logic_error("no computable term");
  for (const auto& num : skipped) {
    // (|num|!)^(num!) >= 2^(num!) once |num| >= 2, and xi_S >= 10^(log10 of the
    // exact ratio denominator), so the ratio is below 2^-(num!) (|S|!)^(S!).
    const double upper = index_fact(S).convert_to<double>() * log10_int(fact(degree(S))) -
                         index_fact(num).convert_to<double>() * std::log10(2.0);
    if (upper > *dominant_log10 - 300) throw std::logic_error("oracle cannot bound a skipped term");
  }
  return boost::multiprecision::sqrt(sum);
}

/// ln n! as a sum of logs in 100-digit binary floating point.
inline Float ln_fact(unsigned n) {
  Float out = 0;
  for (unsigned j = 2; j <= n; ++j) out += boost::multiprecision::log(Float(j));
  return out;
}

/// ln(xi_num / xi_den) = den! ln|den|! - num! ln|num|!
inline Float ln_xi_ratio(const Index& num, const Index& den) {
  return Float(index_fact(den)) * ln_fact(degree(den)) - Float(index_fact(num)) * ln_fact(degree(num));
}

/// ln of sqrt(sum_eta (xi_(eta+shift)/xi_S)^2) over the unweighted degree <= N
/// window minus `skip`. With skip = {|eta| < |alpha|} + {alpha} and
/// shift = S - alpha this is the exact-corrections extraction error.
inline Float ln_residual_norm(std::size_t m, unsigned N, const Index& shift, const Index& S,
                              const std::vector<Index>& skip) {
  std::vector<Float> logs;
  for (const auto& eta : window(m, N)) {
    bool skipped = false;
    for (const auto& s : skip) skipped = skipped || s == eta;
    if (!skipped) logs.push_back(2 * ln_xi_ratio(add(eta, shift), S));
  }
  if (logs.empty()) throw std::logic_error("empty residual");
  Float top = logs.front();
  for (const auto& x : logs) top = x > top ? x : top;
  Float acc = 0;
  for (const auto& x : logs) acc += boost::multiprecision::exp(x - top);
  return (top + boost::multiprecision::log(acc)) / 2;
}

/// Targets below degree `l` plus alpha itself.
inline std::vector<Index> corrected_set(std::size_t m, const Index& alpha) {
  std::vector<Index> out;
  const unsigned l = degree(alpha);
  for (unsigned d = 0; d < l; ++d) layer(m, d, out);
  out.push_back(alpha);
  return out;
}

/// Rank over the rationals by fraction-exact Gaussian elimination.
inline std::size_t rational_rank(std::vector<std::vector<cpp_rational>> a) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t pivot = rank;
    while (pivot < rows && a[pivot][c] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(a[pivot], a[rank]);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank || a[r][c] == 0) continue;
      const cpp_rational f = a[r][c] / a[rank][c];
      for (std::size_t j = c; j < cols; ++j) a[r][j] -= f * a[rank][j];
    }
    ++rank;
  }
  return rank;
}

/// Rank over Z/p for a prime p.
inline std::size_t modular_rank(std::vector<std::vector<std::uint64_t>> a, std::uint64_t p) {
  auto mulmod = [p](std::uint64_t x, std::uint64_t y) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(x) * y) % p);
  };
  auto inverse = [&](std::uint64_t x) {
    std::uint64_t result = 1, base = x % p, e = p - 2;
    while (e) {
      if (e & 1) result = mulmod(result, base);
      base = mulmod(base, base);
      e >>= 1;
    }
    return result;
  };
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t pivot = rank;
    while (pivot < rows && a[pivot][c] % p == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(a[pivot], a[rank]);
    const std::uint64_t inv = inverse(a[rank][c]);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank || a[r][c] == 0) continue;
      const std::uint64_t f = mulmod(a[r][c], inv);
      for (std::size_t j = c; j < cols; ++j) {
        a[r][j] = (a[r][j] + p - mulmod(f, a[rank][j])) % p;
      }
    }
    ++rank;
  }
  return rank;
}

/// q mod p, with the denominator inverted mod p.
inline std::uint64_t mod_rational(const cpp_rational& q, std::uint64_t p) {
  cpp_int num = boost::multiprecision::numerator(q) % p;
  if (num < 0) num += p;
  const cpp_int den = boost::multiprecision::denominator(q) % p;
  if (den == 0) throw std::domain_error("denominator vanishes mod p");
  // Fermat inverse
  cpp_int inv = boost::multiprecision::powm(den, cpp_int(p - 2), cpp_int(p));
  return ((num * inv) % p).convert_to<std::uint64_t>();
}

/// xi_a mod p, for a prime p above |a|.
inline std::uint64_t xi_mod(const Index& a, std::uint64_t p) {
  const cpp_int P(p);
  const cpp_int den = boost::multiprecision::powm(fact(degree(a)) % P, index_fact(a), P);
  return boost::multiprecision::powm(den, P - 2, P).convert_to<std::uint64_t>();
}

}  // namespace oracle
