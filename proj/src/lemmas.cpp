#include "cdlab/lemmas.hpp"

#include <algorithm>
#include <atomic>
#include <string>
#include <thread>

#include "cdlab/errors.hpp"

namespace cdlab {

const char* to_string(LemmaKind kind) {
  switch (kind) {
    case LemmaKind::shift_dominance: return "shift_dominance";
    case LemmaKind::offset_dominance: return "offset_dominance";
    case LemmaKind::offset_step: return "offset_step";
  }
  return "unknown";
}

namespace {

void check_params(std::size_t m, unsigned l, unsigned k, const MultiIndex& eta) {
  if (m == 0) throw DimensionMismatch("dimension must be at least 1");
  if (l < 1 || k < 1) throw std::invalid_argument("l and k must be positive integers");
  if (eta.size() != m) {
    throw DimensionMismatch("eta has dimension " + std::to_string(eta.size()) + ", expected " +
                            std::to_string(m));
  }
  if (eta.degree() != l) {
    throw DimensionMismatch("|eta| = " + std::to_string(eta.degree()) + " but l = " +
                            std::to_string(l));
  }
}

LemmaParams make_params(std::size_t m, unsigned l, unsigned k, const MultiIndex& eta,
                        unsigned extra) {
  return LemmaParams{m, l, k, eta, extra};
}

}  // namespace

LemmaVerdict verify_lemma1(std::size_t m, unsigned l, unsigned k, const MultiIndex& eta) {
  check_params(m, l, k, eta);
  LemmaVerdict verdict{LemmaKind::shift_dominance, make_params(m, l, k, eta, 0), 0, {}};
  const MultiIndex beta = MultiIndex::diagonal(m, k + 1 + l) - eta;
  const BigNat rhs = mi_factorial(beta + eta);
  for (const auto& alpha : enumerate_layer(m, l)) {
    if (alpha == eta) continue;
    ++verdict.checked_count;
    BigNat lhs = mi_factorial(beta + alpha);
    if (!(lhs > rhs)) verdict.counterexamples.push_back({alpha, std::move(lhs), rhs});
  }
  return verdict;
}

LemmaVerdict verify_lemma2(std::size_t m, unsigned l, unsigned k, const MultiIndex& eta,
                           unsigned max_extra_degree) {
  check_params(m, l, k, eta);
  LemmaVerdict verdict{LemmaKind::offset_dominance, make_params(m, l, k, eta, max_extra_degree),
                       0, {}};
  const MultiIndex beta = MultiIndex::diagonal(m, k + 1 + l);
  const BigNat rhs = mi_factorial(beta);
  for (unsigned deg = l; deg <= l + max_extra_degree; ++deg) {
    for (const auto& alpha : enumerate_layer(m, deg)) {
      if (alpha == eta) continue;
      ++verdict.checked_count;
      BigNat lhs = mi_factorial(beta + alpha - eta);
      if (!(lhs > rhs)) verdict.counterexamples.push_back({alpha, std::move(lhs), rhs});
    }
  }
  return verdict;
}

LemmaVerdict verify_lemma2_step(std::size_t m, unsigned l, unsigned k, const MultiIndex& eta,
                                unsigned max_extra_degree) {
  check_params(m, l, k, eta);
  LemmaVerdict verdict{LemmaKind::offset_step, make_params(m, l, k, eta, max_extra_degree), 0,
                       {}};
  const MultiIndex beta = MultiIndex::diagonal(m, k + 1 + l);
  const BigNat rhs = mi_factorial(beta);
  for (unsigned deg = l; deg <= l + max_extra_degree; ++deg) {
    for (const auto& alpha : enumerate_layer(m, deg)) {
      if (!(mi_factorial(beta + alpha - eta) > rhs)) continue;
      for (std::size_t i = 0; i < m; ++i) {
        const MultiIndex next = alpha + MultiIndex::unit(m, i);
        ++verdict.checked_count;
        BigNat lhs = mi_factorial(beta + next - eta);
        if (!(lhs > rhs)) verdict.counterexamples.push_back({next, std::move(lhs), rhs});
      }
    }
  }
  return verdict;
}

std::size_t GridVerdict::checked(LemmaKind kind) const {
  std::size_t total = 0;
  for (const auto& v : verdicts) {
    if (v.kind == kind) total += v.checked_count;
  }
  return total;
}

std::size_t GridVerdict::counterexamples(LemmaKind kind) const {
  std::size_t total = 0;
  for (const auto& v : verdicts) {
    if (v.kind == kind) total += v.counterexamples.size();
  }
  return total;
}

bool GridVerdict::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(),
                     [](const LemmaVerdict& v) { return v.passed(); });
}

GridVerdict verify_lemma_grid(const LemmaGrid& grid, unsigned workers) {
  if (grid.m_min < 1 || grid.m_min > grid.m_max || grid.l_min < 1 || grid.l_min > grid.l_max ||
      grid.k_min < 1 || grid.k_min > grid.k_max) {
    throw std::invalid_argument("lemma grid ranges must be non-empty with m, l, k >= 1");
  }
  struct Cell {
    std::size_t m;
    unsigned l, k;
  };
  std::vector<Cell> cells;
  for (std::size_t m = grid.m_min; m <= grid.m_max; ++m)
    for (unsigned l = grid.l_min; l <= grid.l_max; ++l)
      for (unsigned k = grid.k_min; k <= grid.k_max; ++k) cells.push_back({m, l, k});

  std::vector<std::vector<LemmaVerdict>> per_cell(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t c; (c = next.fetch_add(1)) < cells.size();) {
      const auto [m, l, k] = cells[c];
      for (const auto& eta : enumerate_layer(m, l)) {
        per_cell[c].push_back(verify_lemma1(m, l, k, eta));
        per_cell[c].push_back(verify_lemma2(m, l, k, eta, grid.extra_degree));
        per_cell[c].push_back(verify_lemma2_step(m, l, k, eta, grid.extra_degree));
      }
    }
  };
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(cells.size()));
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  pool.clear();

  GridVerdict out{grid, {}};
  for (auto& cell : per_cell) {
    for (auto& v : cell) out.verdicts.push_back(std::move(v));
  }
  return out;
}

}  // namespace cdlab
