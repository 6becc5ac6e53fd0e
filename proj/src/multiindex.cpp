#include "cdlab/multiindex.hpp"

#include <numeric>
#include <ostream>
#include <sstream>

#include "cdlab/errors.hpp"

namespace cdlab {

MultiIndex::MultiIndex(std::vector<unsigned> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw DimensionMismatch("multi-index dimension must be at least 1");
}

MultiIndex::MultiIndex(std::initializer_list<unsigned> entries) : entries_(entries) {
  if (entries_.empty()) throw DimensionMismatch("multi-index dimension must be at least 1");
}

MultiIndex MultiIndex::ones(std::size_t m) { return diagonal(m, 1); }

MultiIndex MultiIndex::unit(std::size_t m, std::size_t i) {
  if (i >= m) throw DimensionMismatch("unit index position out of range");
  MultiIndex e(m);
  e.entries_[i] = 1;
  return e;
}

MultiIndex MultiIndex::diagonal(std::size_t m, unsigned k) {
  MultiIndex d(m);
  for (auto& x : d.entries_) x = k;
  return d;
}

unsigned long MultiIndex::degree() const noexcept {
  return std::accumulate(entries_.begin(), entries_.end(), 0UL);
}

BigNat MultiIndex::factorial() const { return mi_factorial(*this); }

void MultiIndex::require_same_size(const MultiIndex& other) const {
  if (size() != other.size()) {
    throw DimensionMismatch("multi-index dimensions differ: " + std::to_string(size()) +
                            " vs " + std::to_string(other.size()));
  }
}

bool MultiIndex::dominates(const MultiIndex& other) const {
  require_same_size(other);
  for (std::size_t i = 0; i < size(); ++i) {
    if (entries_[i] < other.entries_[i]) return false;
  }
  return true;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  MultiIndex out = *this;
  out += other;
  return out;
}

MultiIndex& MultiIndex::operator+=(const MultiIndex& other) {
  require_same_size(other);
  for (std::size_t i = 0; i < size(); ++i) entries_[i] += other.entries_[i];
  return *this;
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const {
  if (!dominates(other)) {
    throw DimensionMismatch("multi-index difference " + to_string() + " - " + other.to_string() +
                            " leaves Z_+^m");
  }
  MultiIndex out = *this;
  for (std::size_t i = 0; i < size(); ++i) out.entries_[i] -= other.entries_[i];
  return out;
}

std::strong_ordering MultiIndex::operator<=>(const MultiIndex& other) const {
  if (auto c = size() <=> other.size(); c != 0) return c;
  if (auto c = degree() <=> other.degree(); c != 0) return c;
  for (std::size_t i = 0; i < size(); ++i) {
    // descending in the leading coordinate
    if (auto c = other.entries_[i] <=> entries_[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << *this;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const MultiIndex& alpha) {
  os << '(';
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (i) os << ',';
    os << alpha[i];
  }
  return os << ')';
}

BigNat factorial(unsigned long n) {
  BigNat out;
  mpz_fac_ui(out.get_mpz_t(), n);
  return out;
}

BigNat mi_factorial(const MultiIndex& alpha) {
  BigNat out = 1;
  for (unsigned a : alpha.entries()) out *= factorial(a);
  return out;
}

BigNat binomial(unsigned long n, unsigned long k) {
  BigNat out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

namespace {

// Fill positions [pos, m) with `remaining` units, leading coordinate largest
// first, which yields the graded-lex order directly.
void fill_layer(std::vector<unsigned>& work, std::size_t pos, unsigned remaining,
                std::vector<MultiIndex>& out) {
  const std::size_t m = work.size();
  if (pos + 1 == m) {
    work[pos] = remaining;
    out.emplace_back(work);
    return;
  }
  for (unsigned v = remaining + 1; v-- > 0;) {
    work[pos] = v;
    fill_layer(work, pos + 1, remaining - v, out);
  }
}

}  // namespace

std::vector<MultiIndex> enumerate_layer(std::size_t m, unsigned l) {
  if (m == 0) throw DimensionMismatch("dimension must be at least 1");
  std::vector<MultiIndex> out;
  out.reserve(binomial(l + m - 1, m - 1).get_ui());
  std::vector<unsigned> work(m, 0);
  fill_layer(work, 0, l, out);
  return out;
}

std::vector<MultiIndex> enumerate_up_to(std::size_t m, unsigned max_degree) {
  std::vector<MultiIndex> out;
  for (unsigned l = 0; l <= max_degree; ++l) {
    auto layer = enumerate_layer(m, l);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

}  // namespace cdlab
