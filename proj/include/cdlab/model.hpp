#pragma once

// Finite-degree realizations of weighted backward multi-shifts over the
// polydisc.
//
// The ambient space of a rank-1 model is spanned by e_alpha, |alpha| <= N, in
// graded-lex order. The frame coefficients are a_alpha = c_alpha e_alpha and
// T_i acts by T_i a_alpha = a_(alpha - eps_i) (zero when alpha_i = 0). Backward
// shifts map the degree <= N window into itself, so the operator action is
// exact on the truncation; only the frame vector gamma(w) = sum a_alpha w^alpha
// carries a truncation tail.
//
// Rank-n models are direct sums of rank-1 models with a distinguished section
// gamma = phi_1 gamma_1 + ... + phi_n gamma_n whose coefficients are
// a_alpha = (+)_i sum_(beta <= alpha) phi_(i,beta) a^(i)_(alpha - beta).

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cdlab/multiindex.hpp"

namespace cdlab {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

// The graded-lex window {alpha : |alpha| <= N}.
class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(std::size_t m, unsigned max_degree);

  std::size_t dimension() const noexcept { return m_; }
  unsigned max_degree() const noexcept { return max_degree_; }
  std::size_t size() const noexcept { return indices_.size(); }
  const MultiIndex& operator[](std::size_t pos) const { return indices_[pos]; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  bool contains(const MultiIndex& alpha) const { return lookup_.count(alpha) != 0; }
  std::optional<std::size_t> find(const MultiIndex& alpha) const;
  /// Throws TruncationExhausted when alpha is outside the window.
  std::size_t position(const MultiIndex& alpha) const;

 private:
  std::size_t m_ = 0;
  unsigned max_degree_ = 0;
  std::vector<MultiIndex> indices_;
  std::map<MultiIndex, std::size_t> lookup_;
};

struct WeightProfile {
  enum class Kind { hardy, bergman, custom };

  Kind kind = Kind::hardy;
  std::map<MultiIndex, double> table;  // custom only

  static WeightProfile hardy() { return {Kind::hardy, {}}; }
  /// c_alpha = prod (alpha_i + 1)
  static WeightProfile bergman() { return {Kind::bergman, {}}; }
  /// Must contain c_0 = 1 and a positive entry for every window index.
  static WeightProfile custom(std::map<MultiIndex, double> table);

  std::string name() const;
  double coefficient(const MultiIndex& alpha) const;
};

struct GrowthConstants {
  double M = 0.0;  // 0 on input: use the tightest constant for delta
  std::vector<double> delta;

  /// sum_i 1/delta_i, the exponent in the M e^(sum 1/delta_i) bounds.
  double inverse_delta_sum() const;
};

enum class SpanningPolicy {
  require,  // throw SpanningFailure unless the section coefficients span
  report,   // build anyway; callers inspect verify_spanning
};

class TruncatedTupleModel {
 public:
  std::size_t m() const noexcept { return indices_.dimension(); }
  std::size_t rank() const noexcept { return rank_; }
  unsigned truncation_degree() const noexcept { return indices_.max_degree(); }
  /// ambient dimension d = rank * C(N+m, m)
  std::size_t dim() const noexcept { return static_cast<std::size_t>(coefficients_.rows()); }
  std::size_t block_dim() const noexcept { return indices_.size(); }
  const IndexSet& indices() const noexcept { return indices_; }

  /// d x |window| matrix; column j is a_(indices()[j]).
  const CMatrix& coefficients() const noexcept { return coefficients_; }
  CVector coefficient(const MultiIndex& alpha) const;
  double coefficient_norm(const MultiIndex& alpha) const;

  const CMatrix& shift(std::size_t i) const { return shifts_.at(i); }
  /// Multiplication by z_i in the function-space inner product defined by the
  /// frame norms; shift(i) is its adjoint.
  const CMatrix& multiplication(std::size_t i) const { return multiplications_.at(i); }
  /// Unitary taking standard coordinates to the current ones (identity unless
  /// the model was conjugated).
  const CMatrix& basis() const noexcept { return basis_; }
  /// Standard-basis rows holding the top degree layer of each block.
  const std::vector<std::size_t>& boundary_rows() const noexcept { return boundary_rows_; }

  const GrowthConstants& growth() const noexcept { return growth_; }
  const std::vector<double>& radii() const noexcept { return radii_; }
  const std::string& label() const noexcept { return label_; }

  /// T^beta v
  CVector apply(const MultiIndex& beta, const CVector& v) const;

  /// sum_(|alpha| <= N) a_alpha w^alpha; requires |w_i| <= r_i.
  CVector frame_vector(std::span<const Complex> w) const;
  /// |w_i| sum_(|beta| = N) ||a_beta|| |w^beta|: bounds
  /// ||T_i gamma(w) - w_i gamma(w)||, the part of T_i gamma pushed in from the
  /// dropped degree N+1 layer.
  double frame_tail_bound(std::span<const Complex> w, std::size_t i) const;

  /// U a_alpha, U T_i U^*, U M_i U^*.
  TruncatedTupleModel conjugated(const CMatrix& unitary) const;

 private:
  friend TruncatedTupleModel build_rank1(const WeightProfile&, std::size_t, unsigned,
                                         std::vector<double>, std::optional<GrowthConstants>);
  friend TruncatedTupleModel build_rank_n(std::span<const TruncatedTupleModel>,
                                          std::span<const std::map<MultiIndex, Complex>>,
                                          SpanningPolicy, std::optional<GrowthConstants>);
  friend TruncatedTupleModel with_flipped_coefficient(const TruncatedTupleModel&,
                                                      const MultiIndex&);

  void require_in_domain(std::span<const Complex> w) const;

  IndexSet indices_;
  std::size_t rank_ = 1;
  CMatrix coefficients_;
  std::vector<CMatrix> shifts_;
  std::vector<CMatrix> multiplications_;
  CMatrix basis_;
  std::vector<std::size_t> boundary_rows_;
  // per block, per window index: the signed scalar c_alpha of the rank-1 frame
  std::vector<std::vector<double>> block_weights_;
  GrowthConstants growth_;
  std::vector<double> radii_;
  std::string label_;
};

/// max over the window of ||a_alpha|| delta^alpha.
double tightest_growth_constant(const CMatrix& coefficients, const IndexSet& indices,
                                std::span<const double> delta);

/// Weighted backward multi-shift of the given profile truncated at degree N.
/// Without explicit growth constants, delta = (1,...,1) clipped below by the
/// radii and M is the tightest constant for that delta. Throws GrowthViolation
/// if delta < r anywhere or the supplied M is too small.
TruncatedTupleModel build_rank1(const WeightProfile& profile, std::size_t m, unsigned N,
                                std::vector<double> radii,
                                std::optional<GrowthConstants> growth = std::nullopt);

using Polynomial = std::map<MultiIndex, Complex>;

/// phi_i(z) = z_1^(i-1)
std::vector<Polynomial> default_section_polynomials(std::size_t n, std::size_t m);
/// Seeded random coefficients on all monomials of degree <= max_degree.
std::vector<Polynomial> random_section_polynomials(std::size_t n, std::size_t m,
                                                   unsigned max_degree, std::mt19937_64& rng);

/// Direct sum of rank-1 models with the section built from `phi`. delta
/// defaults to the entrywise minimum over constituents and M to the tightest
/// constant for the section coefficients.
///
/// The section has only C(N+m, m) coefficients in a space of dimension
/// n C(N+m, m), so for n >= 2 the spanning requirement cannot hold on a
/// truncation; SpanningPolicy::report builds the model regardless.
TruncatedTupleModel build_rank_n(std::span<const TruncatedTupleModel> models,
                                 std::span<const Polynomial> phi,
                                 SpanningPolicy policy = SpanningPolicy::require,
                                 std::optional<GrowthConstants> growth = std::nullopt);

/// Negative control: a_alpha -> -a_alpha in a rank-1 model. The shifts are
/// rebuilt from the signed frame, the multiplication operators keep the
/// (unchanged) norms, so the adjoint identity breaks while spanning survives.
TruncatedTupleModel with_flipped_coefficient(const TruncatedTupleModel& model,
                                             const MultiIndex& alpha);

struct SpanningReport {
  long rank = 0;
  long dim = 0;
  double relative_tolerance = 1e-10;
  std::vector<double> singular_values;

  bool spanning() const noexcept { return rank == dim; }
};

/// Numerical rank of {a_alpha : |alpha| <= N} against the ambient dimension.
SpanningReport verify_spanning(const TruncatedTupleModel& model, double relative_tolerance = 1e-10);

/// Like verify_spanning but throws SpanningFailure when the family is not
/// spanning.
void require_spanning(const TruncatedTupleModel& model, double relative_tolerance = 1e-10);

/// [T_1 - w_1; ...; T_m - w_m], an (m d) x d matrix.
CMatrix stacked_shift_matrix(const TruncatedTupleModel& model, std::span<const Complex> w);

/// dim of the joint kernel of (T_i - w_i) on the truncated space, by singular
/// value threshold relative to the largest singular value.
long joint_kernel_dim(const TruncatedTupleModel& model, std::span<const Complex> w,
                      double relative_tolerance = 1e-10);

/// Haar-ish random unitary (QR of a complex Gaussian matrix).
CMatrix random_unitary(std::size_t d, std::mt19937_64& rng);

}  // namespace cdlab
