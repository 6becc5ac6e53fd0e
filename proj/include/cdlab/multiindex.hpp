#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <vector>

namespace cdlab {

using BigNat = mpz_class;

// An m-tuple of non-negative integers. The dimension is fixed at construction
// and binary operations require matching dimensions.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t m) : entries_(m, 0) {}
  explicit MultiIndex(std::vector<unsigned> entries);
  MultiIndex(std::initializer_list<unsigned> entries);

  static MultiIndex zero(std::size_t m) { return MultiIndex(m); }
  /// epsilon = (1,...,1)
  static MultiIndex ones(std::size_t m);
  /// epsilon_i, 1 in position i (0-based)
  static MultiIndex unit(std::size_t m, std::size_t i);
  /// k * epsilon
  static MultiIndex diagonal(std::size_t m, unsigned k);

  std::size_t size() const noexcept { return entries_.size(); }
  unsigned operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<unsigned>& entries() const noexcept { return entries_; }

  unsigned long degree() const noexcept;
  BigNat factorial() const;

  /// Entrywise alpha >= beta.
  bool dominates(const MultiIndex& other) const;

  MultiIndex operator+(const MultiIndex& other) const;
  /// Entrywise difference; throws DimensionMismatch unless *this dominates other.
  MultiIndex operator-(const MultiIndex& other) const;
  MultiIndex& operator+=(const MultiIndex& other);

  bool operator==(const MultiIndex& other) const = default;
  /// Graded order: by degree, then lexicographically descending entries, so
  /// layer 2 in two variables runs (2,0),(1,1),(0,2).
  std::strong_ordering operator<=>(const MultiIndex& other) const;

  std::string to_string() const;

 private:
  void require_same_size(const MultiIndex& other) const;

  std::vector<unsigned> entries_;
};

std::ostream& operator<<(std::ostream& os, const MultiIndex& alpha);

BigNat factorial(unsigned long n);
/// alpha! = alpha_1! ... alpha_m!
BigNat mi_factorial(const MultiIndex& alpha);

/// All alpha with |alpha| = l in graded-lex order; C(l+m-1, m-1) entries.
std::vector<MultiIndex> enumerate_layer(std::size_t m, unsigned l);
/// Layers 0..max_degree concatenated.
std::vector<MultiIndex> enumerate_up_to(std::size_t m, unsigned max_degree);

BigNat binomial(unsigned long n, unsigned long k);

}  // namespace cdlab
