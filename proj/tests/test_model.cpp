#include <doctest.h>

#include <random>

#include "cdlab/errors.hpp"
#include "cdlab/model.hpp"
#include "oracles.hpp"

using namespace cdlab;
using oracle::cpp_rational;

namespace {

using RationalMatrix = std::vector<std::vector<cpp_rational>>;

// Exact copy of a matrix whose entries are exactly representable rationals
// (here 0, 1 and dyadic shifts of the evaluation point).
RationalMatrix to_rational(const CMatrix& a) {
  RationalMatrix out(static_cast<std::size_t>(a.rows()),
                     std::vector<cpp_rational>(static_cast<std::size_t>(a.cols())));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      REQUIRE(a(i, j).imag() == 0.0);
      out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = cpp_rational(a(i, j).real());
    }
  }
  return out;
}

std::size_t oracle_nullity(const CMatrix& stacked) {
  return static_cast<std::size_t>(stacked.cols()) - oracle::rational_rank(to_rational(stacked));
}

TruncatedTupleModel hardy(std::size_t m, unsigned N) {
  return build_rank1(WeightProfile::hardy(), m, N, std::vector<double>(m, 0.5));
}

TruncatedTupleModel rank2(unsigned N, const std::vector<Polynomial>& phi,
                          SpanningPolicy policy = SpanningPolicy::require) {
  std::vector<TruncatedTupleModel> blocks{hardy(2, N), hardy(2, N)};
  return build_rank_n(blocks, phi, policy);
}

Polynomial constant_one() { return {{MultiIndex({0, 0}), Complex(1.0)}}; }
Polynomial z1() { return {{MultiIndex({1, 0}), Complex(1.0)}}; }

}  // namespace

TEST_SUITE("model") {

TEST_CASE("T1: build_rank1::hardy shift action on the degree-2 bidisc window") {
  auto model = hardy(2, 2);
  CHECK(model.dim() == 6);
  const auto& idx = model.indices();
  const auto& T1 = model.shift(0);
  auto e = [&](std::initializer_list<unsigned> a) {
    CVector v = CVector::Zero(6);
    v(static_cast<Eigen::Index>(idx.position(MultiIndex(a)))) = 1.0;
    return v;
  };
  CHECK((T1 * e({1, 0}) - e({0, 0})).norm() == 0.0);
  CHECK((T1 * e({2, 0}) - e({1, 0})).norm() == 0.0);
  CHECK((T1 * e({1, 1}) - e({0, 1})).norm() == 0.0);
  CHECK((T1 * e({0, 1})).norm() == 0.0);
  CHECK((T1 * e({0, 2})).norm() == 0.0);
  CHECK((T1 * e({0, 0})).norm() == 0.0);
}

TEST_CASE("T2: build_rank1::backward shift identity on frame coefficients") {
  auto model = build_rank1(WeightProfile::bergman(), 2, 5, {0.5, 0.5}, GrowthConstants{1.0, {0.5, 0.5}});
  for (const auto& alpha : model.indices()) {
    for (const auto& beta : enumerate_up_to(2, 3)) {
      const CVector got = model.apply(beta, model.coefficient(alpha));
      const CVector want = alpha.dominates(beta) ? model.coefficient(alpha - beta)
                                                 : CVector::Zero(static_cast<Eigen::Index>(model.dim()));
      CHECK((got - want).norm() <= 1e-14 * (1.0 + want.norm()));
    }
  }
}

TEST_CASE("T3: build_rank1::bergman growth constants") {
  auto model = build_rank1(WeightProfile::bergman(), 2, 4, {0.5, 0.5}, GrowthConstants{1.0, {0.5, 0.5}});
  CHECK(model.coefficient_norm(MultiIndex({2, 1})) == doctest::Approx(6.0));
  // independent maximum of ||a_alpha|| delta^alpha
  double tight = 0.0;
  for (const auto& alpha : enumerate_up_to(2, 4)) {
    double c = 1.0;
    for (unsigned a : alpha.entries()) c *= a + 1.0;
    tight = std::max(tight, c * std::pow(0.5, static_cast<double>(alpha.degree())));
  }
  CHECK(tight == doctest::Approx(1.0));
  CHECK(tightest_growth_constant(model.coefficients(), model.indices(), std::vector<double>{0.5, 0.5}) ==
        doctest::Approx(tight));
  CHECK_THROWS_AS(build_rank1(WeightProfile::bergman(), 2, 4, {0.5, 0.5}, GrowthConstants{0.5, {0.5, 0.5}}),
                  GrowthViolation);
  CHECK_THROWS_AS(build_rank1(WeightProfile::hardy(), 2, 4, {0.5, 0.5}, GrowthConstants{1.0, {0.4, 1.0}}),
                  GrowthViolation);
}

TEST_CASE("T4: frame_vector::listed values and domain check") {
  auto model = hardy(2, 2);
  std::vector<Complex> zero{0.0, 0.0};
  CHECK((model.frame_vector(zero) - model.coefficient(MultiIndex({0, 0}))).norm() == 0.0);

  std::vector<Complex> w{0.5, 0.0};
  CVector want = CVector::Zero(6);
  want(static_cast<Eigen::Index>(model.indices().position(MultiIndex({0, 0})))) = 1.0;
  want(static_cast<Eigen::Index>(model.indices().position(MultiIndex({1, 0})))) = 0.5;
  want(static_cast<Eigen::Index>(model.indices().position(MultiIndex({2, 0})))) = 0.25;
  CHECK((model.frame_vector(w) - want).norm() <= 1e-15);

  std::vector<Complex> outside{0.6, 0.0};
  CHECK_THROWS_AS(model.frame_vector(outside), PointOutsideDomain);
}

TEST_CASE("T5: frame_tail_bound::shrinks with the truncation degree") {
  std::vector<Complex> w{0.3, 0.2};
  double previous = 1.0;
  for (unsigned N = 2; N <= 10; N += 2) {
    auto model = hardy(2, N);
    const double tail = model.frame_tail_bound(w, 0);
    CHECK(tail < previous);
    const CVector g = model.frame_vector(w);
    CHECK((model.shift(0) * g - w[0] * g).norm() <= tail * (1 + 1e-12));
    previous = tail;
  }
}

TEST_CASE("T6: joint_kernel_dim::matches the exact nullspace of the stacked matrix") {
  std::vector<Complex> origin{0.0, 0.0};
  std::vector<Complex> generic{0.25, 0.125};
  for (unsigned N = 1; N <= 4; ++N) {
    auto model = hardy(2, N);
    for (const auto* w : {&origin, &generic}) {
      const auto stacked = stacked_shift_matrix(model, *w);
      CHECK(static_cast<std::size_t>(joint_kernel_dim(model, *w)) == oracle_nullity(stacked));
    }
    CHECK(joint_kernel_dim(model, origin) == 1);
  }
  // one variable, N = 1: T = [[0,1],[0,0]], kernel spanned by e_0
  auto line = build_rank1(WeightProfile::hardy(), 1, 1, {0.5});
  std::vector<Complex> w0{0.0};
  CHECK(line.shift(0)(0, 1) == Complex(1.0));
  CHECK(line.shift(0)(0, 0) == Complex(0.0));
  CHECK(joint_kernel_dim(line, w0) == 1);

  auto sum = rank2(3, {constant_one(), z1()}, SpanningPolicy::report);
  for (const auto* w : {&origin, &generic}) {
    CHECK(static_cast<std::size_t>(joint_kernel_dim(sum, *w)) ==
          oracle_nullity(stacked_shift_matrix(sum, *w)));
  }
  CHECK(joint_kernel_dim(sum, origin) == 2);
}

TEST_CASE("T7: build_rank_n::identity section reproduces the rank-1 model") {
  std::vector<TruncatedTupleModel> one{hardy(2, 4)};
  std::vector<Polynomial> phi{constant_one()};
  auto model = build_rank_n(one, phi);
  CHECK(model.rank() == 1);
  CHECK((model.coefficients() - one[0].coefficients()).norm() == 0.0);
  CHECK((model.shift(1) - one[0].shift(1)).norm() == 0.0);
}

TEST_CASE("T8: build_rank_n::diagonal section fails spanning with rank d/2") {
  try {
    rank2(4, {constant_one(), constant_one()});
    FAIL("expected SpanningFailure");
  } catch (const SpanningFailure& e) {
    CHECK(e.dim() == 30);
    CHECK(e.rank() == 15);
  }
  auto model = rank2(4, {constant_one(), constant_one()}, SpanningPolicy::report);
  CHECK(oracle::rational_rank(to_rational(model.coefficients())) == model.dim() / 2);
}

TEST_CASE("T9: build_rank_n::section (1, z1) on a truncation") {
  // The section has C(N+2,2) coefficients in dimension 2 C(N+2,2), so the
  // spanning requirement cannot hold on any truncation.
  for (unsigned N = 1; N <= 5; ++N) {
    auto model = rank2(N, {constant_one(), z1()}, SpanningPolicy::report);
    const auto exact = oracle::rational_rank(to_rational(model.coefficients()));
    CHECK(exact == model.dim() / 2);
    CHECK(verify_spanning(model).rank == static_cast<long>(exact));
    CHECK_THROWS_AS(require_spanning(model), SpanningFailure);
  }
}

TEST_CASE("T10: verify_spanning::rank-1 models span") {
  for (unsigned N = 1; N <= 6; ++N) {
    auto model = hardy(3, N);
    auto rep = verify_spanning(model);
    CHECK(rep.spanning());
    CHECK(rep.rank == static_cast<long>(oracle::window(3, N).size()));
  }
}

TEST_CASE("T11: conjugated::unitary change of basis") {
  auto model = hardy(2, 3);
  std::mt19937_64 rng(7);
  const CMatrix U = random_unitary(model.dim(), rng);
  CHECK((U.adjoint() * U - CMatrix::Identity(U.rows(), U.cols())).norm() < 1e-12);
  auto c = model.conjugated(U);
  CHECK((c.shift(0) - U * model.shift(0) * U.adjoint()).norm() < 1e-12);
  CHECK((c.coefficients() - U * model.coefficients()).norm() < 1e-12);
  CHECK(verify_spanning(c).rank == verify_spanning(model).rank);
}

TEST_CASE("T12: with_flipped_coefficient::keeps spanning") {
  auto model = hardy(2, 3);
  auto flipped = with_flipped_coefficient(model, MultiIndex({1, 0}));
  CHECK(verify_spanning(flipped).spanning());
  CHECK(flipped.coefficient(MultiIndex({1, 0})).real().sum() == doctest::Approx(-1.0));
}

TEST_CASE("T13: build_rank1::rejects malformed input") {
  CHECK_THROWS_AS(build_rank1(WeightProfile::hardy(), 2, 3, {0.5}), DimensionMismatch);
  CHECK_THROWS_AS(build_rank1(WeightProfile::hardy(), 2, 0, {0.5, 0.5}), ConfigError);
  CHECK_THROWS_AS(build_rank1(WeightProfile::hardy(), 2, 3, {1.5, 0.5}), ConfigError);
}

}  // TEST_SUITE
