#include <doctest.h>

#include <cmath>
#include <memory>

#include "cdlab/errors.hpp"
#include "cdlab/synth.hpp"
#include "oracles.hpp"

using namespace cdlab;

namespace {

ModelPtr hardy(unsigned N, std::size_t m = 2) {
  return std::make_shared<const TruncatedTupleModel>(
      build_rank1(WeightProfile::hardy(), m, N, std::vector<double>(m, 0.5),
                  GrowthConstants{1.0, std::vector<double>(m, 1.0)}));
}

double ln_to_log10(const oracle::Float& x) { return static_cast<double>(x / log(oracle::Float(10))); }

// log10 of the exact-corrections error of target alpha at k, from the oracle.
double oracle_log10_error(std::size_t m, unsigned N, const MultiIndex& alpha, unsigned k) {
  const oracle::Index S(m, k + static_cast<unsigned>(alpha.degree()) + 1);
  oracle::Index shift(m);
  for (std::size_t i = 0; i < m; ++i) shift[i] = S[i] - alpha[i];
  return ln_to_log10(oracle::ln_residual_norm(m, N, shift, S, oracle::corrected_set(m, alpha.entries())));
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("S1: synthesize::norm against the exact rational sum of squares") {
  auto model = hardy(2);
  auto syn = synthesize(model, XiWeights());
  oracle::cpp_rational sq = 0;
  for (const auto& alpha : oracle::window(2, 2)) {
    const auto x = oracle::xi(alpha);
    sq += x * x;
  }
  const double exact = static_cast<double>(boost::multiprecision::sqrt(oracle::to_float(sq)));
  CHECK(syn.window_norm.to_float().value == doctest::Approx(exact).epsilon(1e-12));
  CHECK(syn.norm_bound.to_float().value == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
  CHECK(syn.window_norm <= syn.norm_bound);
}

TEST_CASE("S2: synthesize::smallest truncation") {
  auto syn = synthesize(hardy(1), XiWeights());
  // 1 + 1 + 1
  CHECK(syn.window_norm.to_float().value == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("S3: WeightedSeries::shift follows T^beta a_alpha = a_(alpha - beta)") {
  auto model = hardy(4);
  XiWeights w;
  auto f = WeightedSeries::cyclic(model, w, SeriesReach::window);
  const MultiIndex beta{1, 2};
  const CVector direct = model->apply(beta, f.evaluate());
  const CVector shifted = f.shift_by(beta).evaluate();
  CHECK((direct - shifted).norm() <= 1e-15 * direct.norm());

  auto unit = WeightedSeries::unit(model, w, MultiIndex({2, 1}));
  CHECK(unit.shift_by(MultiIndex({1, 1})).coefficient(MultiIndex({1, 0})) == LogScalar::one());
  CHECK(unit.shift_by(MultiIndex({0, 2})).norm().is_zero());

  auto g = WeightedSeries::cyclic(model, w, SeriesReach::unbounded);
  CHECK(g.shift_by(beta).coefficient(MultiIndex({4, 0})) == w.xi(MultiIndex({5, 2})));
}

TEST_CASE("S4: layer0_approximant::k = 1 against the exact rational oracle") {
  const double want = static_cast<double>(oracle::layer0_error(2, 6, 1));
  CHECK(want == doctest::Approx(5.3e-20).epsilon(0.01));
  for (unsigned N : {6u, 8u}) {
    auto f = synthesize(hardy(N), XiWeights()).f;
    auto a = layer0_approximant(f, 1);
    CHECK(a.error.to_float().value == doctest::Approx(want).epsilon(1e-6));
    CHECK(a.shift == MultiIndex({2, 2}));
  }
  // the two eps_i terms dominate
  const double eps_term = static_cast<double>(oracle::to_float(oracle::xi_ratio({3, 2}, {2, 2})));
  CHECK(want == doctest::Approx(std::sqrt(2.0) * eps_term).epsilon(1e-6));
}

TEST_CASE("S5: layer0_approximant::bound and monotone decay") {
  auto f = synthesize(hardy(8), XiWeights()).f;
  LogScalar previous = LogScalar::from_double(1e300);
  for (unsigned k = 1; k <= 6; ++k) {
    auto a = layer0_approximant(f, k);
    CHECK(a.error <= a.bound);
    const double bound = std::exp(2.0) / std::tgamma(k + 2.0);
    CHECK(a.bound.to_float().value == doctest::Approx(bound).epsilon(1e-14));
    CHECK(a.error.log10_magnitude() ==
          doctest::Approx(oracle_log10_error(2, 8, MultiIndex({0, 0}), k)).epsilon(1e-10));
    CHECK(a.error <= previous);
    previous = a.error;
  }
}

TEST_CASE("S6: layer0_approximant::window reach exhausted to a single term") {
  auto f = synthesize(hardy(8), XiWeights(), SeriesReach::window).f;
  auto a = layer0_approximant(f, 3);  // |S| = 8 = N
  CHECK(a.error.is_zero());
  CHECK(a.vector.isApprox(f.model().coefficient(MultiIndex({0, 0}))));
  CHECK_THROWS_AS(layer0_approximant(f, 4), TruncationExhausted);
}

TEST_CASE("S7: layer_approximant::first layer with exact corrections") {
  auto model = hardy(8);
  XiWeights w;
  auto f = synthesize(model, w).f;
  KnownCoefficients known;
  known.emplace(MultiIndex({0, 0}), WeightedSeries::unit(model, w, MultiIndex({0, 0})));
  const MultiIndex alpha{1, 0};
  auto a = layer_approximant(f, alpha, 1, known);
  CHECK(extraction_anchor(alpha, 1) == MultiIndex({3, 3}));
  CHECK(a.shift == MultiIndex({2, 3}));
  CHECK(a.error <= a.bound);
  CHECK(a.error.log10_magnitude() == doctest::Approx(oracle_log10_error(2, 8, alpha, 1)).epsilon(1e-10));
  // the eta = (0,1) term carries essentially all of the error
  const auto dominant = oracle::xi_ratio({2, 4}, {3, 3});
  CHECK(a.error.log10_magnitude() >= oracle::log10_rational(dominant) - 1e-9);
  CHECK(a.error.log10_magnitude() == doctest::Approx(oracle::log10_rational(dominant)).epsilon(1e-6));
}

TEST_CASE("S8: layer_approximant::error paths") {
  auto model = hardy(8);
  XiWeights w;
  auto f = synthesize(model, w).f;
  KnownCoefficients none;
  CHECK_THROWS_AS(layer_approximant(f, MultiIndex({1, 0}), 1, none), MissingLowerLayer);
  CHECK_THROWS_AS(layer0_approximant(f, 0), std::invalid_argument);
  CHECK_THROWS_AS(layer0_approximant(f, 40), PrecisionExhausted);
}

TEST_CASE("S9: extract_all::target 0 reduces to layer 0") {
  auto f = synthesize(hardy(8), XiWeights()).f;
  auto rep = extract_all(f, 0, KSchedule::constant(2), CorrectionMode::exact, 1e-10);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].error == layer0_approximant(f, 2).error);
}

TEST_CASE("S10: extract_all::target 2, constant k = 2, exact corrections") {
  auto f = synthesize(hardy(8), XiWeights()).f;
  auto rep = extract_all(f, 2, KSchedule::constant(2), CorrectionMode::exact, 1e-15);
  CHECK(rep.rows.size() == 6);
  CHECK(rep.passed());
  for (const auto& row : rep.rows) {
    CHECK(row.error <= row.bound);
    CHECK(row.relative_error.log10_magnitude() < -15);
    CHECK(row.error.log10_magnitude() ==
          doctest::Approx(oracle_log10_error(2, 8, row.alpha, 2)).epsilon(1e-10));
  }
}

TEST_CASE("S11: extract_all::recovered corrections need a staircase") {
  auto f = synthesize(hardy(8), XiWeights()).f;
  const auto stairs = KSchedule::staircase(2);
  CHECK(stairs.per_layer == std::vector<unsigned>{6, 4, 2});
  auto exact = extract_all(f, 2, stairs, CorrectionMode::exact, 1e-10);
  auto recovered = extract_all(f, 2, stairs, CorrectionMode::recovered, 1e-10);
  CHECK(exact.passed());
  CHECK(recovered.passed());
  for (const auto& row : recovered.rows) CHECK(row.error >= exact.row(row.alpha).error);

  // a constant schedule lets layer-0 error swamp the higher layers
  auto flat = extract_all(f, 2, KSchedule::constant(2), CorrectionMode::recovered, 1e-10,
                          BoundPolicy::report);
  CHECK_FALSE(flat.bounds_hold());
  CHECK_THROWS_AS(extract_all(f, 2, KSchedule::constant(2), CorrectionMode::recovered, 1e-10),
                  BoundViolation);
}

TEST_CASE("S12: feasibility::window reach and working precision") {
  auto model = hardy(8);
  XiWeights w;
  auto windowed = synthesize(model, w, SeriesReach::window).f;
  CHECK_THROWS_AS(check_schedule(windowed, 3, KSchedule::staircase(3)), TruncationExhausted);
  auto full = synthesize(model, w).f;
  const unsigned kmax = max_feasible_k(full, 0);
  CHECK(kmax >= 8);
  CHECK_NOTHROW(check_schedule(full, 0, KSchedule::constant(kmax)));
  CHECK_THROWS_AS(check_schedule(full, 0, KSchedule::constant(kmax + 1)), PrecisionExhausted);
  CHECK(max_feasible_k(windowed, 0) == 3);
}

TEST_CASE("S13: KSchedule::reuses the last entry") {
  KSchedule s{{5, 3}};
  CHECK(s.at(0) == 5);
  CHECK(s.at(1) == 3);
  CHECK(s.at(7) == 3);
  CHECK(KSchedule::staircase(3).per_layer == std::vector<unsigned>{8, 6, 4, 2});
}

TEST_CASE("S14: naive_layer0::double precision breaks down") {
  auto model = hardy(8);
  auto k1 = naive_layer0(*model, 1);
  CHECK(k1.error == doctest::Approx(static_cast<double>(oracle::layer0_error(2, 8, 1))).epsilon(1e-6));
  CHECK_FALSE(k1.violates_bound());
  for (unsigned k = 3; k <= 6; ++k) CHECK(naive_layer0(*model, k).violates_bound());
}

}  // TEST_SUITE
