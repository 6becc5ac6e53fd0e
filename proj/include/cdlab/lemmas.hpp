#pragma once

// Exact brute-force checks of the two multi-index factorial inequalities the
// extraction recursion depends on:
//
//   shift dominance:   beta = (k+1+l)eps - eta,  |alpha| = |eta| = l,  alpha != eta
//                      =>  (beta+alpha)! > (beta+eta)!
//   offset dominance:  beta = (k+1+l)eps,  |eta| = l,  |alpha| >= l,  alpha != eta
//                      =>  (beta+alpha-eta)! > beta!
//
// All comparisons are done on exact integers.

#include <cstddef>
#include <vector>

#include "cdlab/multiindex.hpp"

namespace cdlab {

enum class LemmaKind { shift_dominance, offset_dominance, offset_step };

const char* to_string(LemmaKind kind);

struct LemmaParams {
  std::size_t m = 0;
  unsigned l = 0;
  unsigned k = 0;
  MultiIndex eta;
  unsigned max_extra_degree = 0;  // offset checks only
};

struct Counterexample {
  MultiIndex alpha;
  BigNat lhs;
  BigNat rhs;
};

struct LemmaVerdict {
  LemmaKind kind = LemmaKind::shift_dominance;
  LemmaParams params;
  std::size_t checked_count = 0;
  std::vector<Counterexample> counterexamples;

  bool passed() const noexcept { return counterexamples.empty(); }
};

LemmaVerdict verify_lemma1(std::size_t m, unsigned l, unsigned k, const MultiIndex& eta);

LemmaVerdict verify_lemma2(std::size_t m, unsigned l, unsigned k, const MultiIndex& eta,
                           unsigned max_extra_degree = 3);

/// One-step monotonicity: whenever (beta+alpha-eta)! > beta! holds on the
/// enumerated range, (beta+alpha+eps_i-eta)! > beta! holds for every i.
LemmaVerdict verify_lemma2_step(std::size_t m, unsigned l, unsigned k, const MultiIndex& eta,
                                unsigned max_extra_degree = 3);

struct LemmaGrid {
  std::size_t m_min = 2, m_max = 3;
  unsigned l_min = 1, l_max = 4;
  unsigned k_min = 1, k_max = 4;
  unsigned extra_degree = 3;
};

struct GridVerdict {
  LemmaGrid grid;
  std::vector<LemmaVerdict> verdicts;  // deterministic order: m, l, k, eta, kind

  std::size_t checked(LemmaKind kind) const;
  std::size_t counterexamples(LemmaKind kind) const;
  bool passed() const;
};

/// Runs every lemma check over the grid. Work is split across `workers`
/// threads per (m, l, k) cell; the merged result does not depend on it.
GridVerdict verify_lemma_grid(const LemmaGrid& grid, unsigned workers = 0);

}  // namespace cdlab
