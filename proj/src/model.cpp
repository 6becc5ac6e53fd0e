#include "cdlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cdlab/errors.hpp"

namespace cdlab {

IndexSet::IndexSet(std::size_t m, unsigned max_degree)
    : m_(m), max_degree_(max_degree), indices_(enumerate_up_to(m, max_degree)) {
  for (std::size_t j = 0; j < indices_.size(); ++j) lookup_.emplace(indices_[j], j);
}

std::optional<std::size_t> IndexSet::find(const MultiIndex& alpha) const {
  if (auto it = lookup_.find(alpha); it != lookup_.end()) return it->second;
  return std::nullopt;
}

std::size_t IndexSet::position(const MultiIndex& alpha) const {
  if (auto pos = find(alpha)) return *pos;
  throw TruncationExhausted("index " + alpha.to_string() + " lies outside the degree <= " +
                            std::to_string(max_degree_) + " window");
}

WeightProfile WeightProfile::custom(std::map<MultiIndex, double> table) {
  if (table.empty()) throw ConfigError("custom weight profile has no coefficients");
  const std::size_t m = table.begin()->first.size();
  auto zero = table.find(MultiIndex::zero(m));
  if (zero == table.end() || zero->second != 1.0) {
    throw ConfigError("custom weight profile must have c_0 = 1");
  }
  for (const auto& [alpha, c] : table) {
    if (alpha.size() != m) throw ConfigError("custom weight profile mixes dimensions");
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw ConfigError("custom weight c" + alpha.to_string() + " must be positive");
    }
  }
  return {Kind::custom, std::move(table)};
}

std::string WeightProfile::name() const {
  switch (kind) {
    case Kind::hardy: return "hardy";
    case Kind::bergman: return "bergman";
    case Kind::custom: return "custom";
  }
  return "unknown";
}

double WeightProfile::coefficient(const MultiIndex& alpha) const {
  switch (kind) {
    case Kind::hardy: return 1.0;
    case Kind::bergman: {
      double c = 1.0;
      for (unsigned a : alpha.entries()) c *= a + 1.0;
      return c;
    }
    case Kind::custom: {
      auto it = table.find(alpha);
      if (it == table.end()) {
        throw ConfigError("custom weight profile has no coefficient for " + alpha.to_string());
      }
      return it->second;
    }
  }
  return 0.0;
}

double GrowthConstants::inverse_delta_sum() const {
  double s = 0.0;
  for (double d : delta) s += 1.0 / d;
  return s;
}

CVector TruncatedTupleModel::coefficient(const MultiIndex& alpha) const {
  return coefficients_.col(static_cast<Eigen::Index>(indices_.position(alpha)));
}

double TruncatedTupleModel::coefficient_norm(const MultiIndex& alpha) const {
  return coefficients_.col(static_cast<Eigen::Index>(indices_.position(alpha))).norm();
}

CVector TruncatedTupleModel::apply(const MultiIndex& beta, const CVector& v) const {
  if (beta.size() != m()) throw DimensionMismatch("shift index has the wrong dimension");
  CVector out = v;
  for (std::size_t i = 0; i < m(); ++i) {
    for (unsigned p = 0; p < beta[i]; ++p) out = shifts_[i] * out;
  }
  return out;
}

void TruncatedTupleModel::require_in_domain(std::span<const Complex> w) const {
  if (w.size() != m()) throw DimensionMismatch("point has the wrong dimension");
  for (std::size_t i = 0; i < m(); ++i) {
    if (std::abs(w[i]) > radii_[i]) {
      std::ostringstream os;
      os << "|w_" << i + 1 << "| = " << std::abs(w[i]) << " exceeds the polydisc radius "
         << radii_[i];
      throw PointOutsideDomain(os.str());
    }
  }
}

namespace {

Complex monomial(const MultiIndex& alpha, std::span<const Complex> w) {
  Complex out = 1.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) out *= std::pow(w[i], static_cast<int>(alpha[i]));
  return out;
}

}  // namespace

CVector TruncatedTupleModel::frame_vector(std::span<const Complex> w) const {
  require_in_domain(w);
  CVector out = CVector::Zero(static_cast<Eigen::Index>(dim()));
  for (std::size_t j = 0; j < indices_.size(); ++j) {
    out += monomial(indices_[j], w) * coefficients_.col(static_cast<Eigen::Index>(j));
  }
  return out;
}

double TruncatedTupleModel::frame_tail_bound(std::span<const Complex> w, std::size_t i) const {
  require_in_domain(w);
  double tail = 0.0;
  for (std::size_t j = 0; j < indices_.size(); ++j) {
    if (indices_[j].degree() != truncation_degree()) continue;
    tail += coefficients_.col(static_cast<Eigen::Index>(j)).norm() *
            std::abs(monomial(indices_[j], w));
  }
  return std::abs(w[i]) * tail;
}

TruncatedTupleModel TruncatedTupleModel::conjugated(const CMatrix& unitary) const {
  if (unitary.rows() != static_cast<Eigen::Index>(dim()) || unitary.cols() != unitary.rows()) {
    throw DimensionMismatch("conjugating matrix must be d x d");
  }
  TruncatedTupleModel out = *this;
  out.coefficients_ = unitary * coefficients_;
  for (auto& t : out.shifts_) t = unitary * t * unitary.adjoint();
  for (auto& mz : out.multiplications_) mz = unitary * mz * unitary.adjoint();
  out.basis_ = unitary * basis_;
  out.label_ = label_ + "^U";
  return out;
}

double tightest_growth_constant(const CMatrix& coefficients, const IndexSet& indices,
                                std::span<const double> delta) {
  double best = 0.0;
  for (std::size_t j = 0; j < indices.size(); ++j) {
    double scale = 1.0;
    for (std::size_t i = 0; i < delta.size(); ++i) scale *= std::pow(delta[i], indices[j][i]);
    best = std::max(best, coefficients.col(static_cast<Eigen::Index>(j)).norm() * scale);
  }
  return best;
}

namespace {

void validate_radii(std::size_t m, const std::vector<double>& radii) {
  if (radii.size() != m) throw DimensionMismatch("need one polydisc radius per variable");
  for (double r : radii) {
    if (!(r > 0.0 && r < 1.0)) throw ConfigError("polydisc radii must lie in (0, 1)");
  }
}

GrowthConstants settle_growth(const CMatrix& coefficients, const IndexSet& indices,
                              const std::vector<double>& radii,
                              std::optional<GrowthConstants> growth, std::vector<double> fallback) {
  GrowthConstants g;
  const bool explicit_m = growth.has_value() && growth->M > 0.0;
  g.delta = (growth && !growth->delta.empty()) ? growth->delta : std::move(fallback);
  if (g.delta.size() != radii.size()) throw DimensionMismatch("need one delta per variable");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(g.delta[i] >= radii[i])) {
      throw GrowthViolation("delta_" + std::to_string(i + 1) + " = " + std::to_string(g.delta[i]) +
                            " is smaller than the polydisc radius " + std::to_string(radii[i]));
    }
  }
  const double tight = tightest_growth_constant(coefficients, indices, g.delta);
  if (explicit_m) {
    g.M = growth->M;
    if (tight > g.M * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "||a_alpha|| <= M / delta^alpha fails: needs M >= " << tight << ", got " << g.M;
      throw GrowthViolation(os.str());
    }
  } else {
    g.M = tight;
  }
  return g;
}

std::vector<std::size_t> top_layer_rows(const IndexSet& indices, std::size_t blocks) {
  std::vector<std::size_t> rows;
  for (std::size_t b = 0; b < blocks; ++b) {
    for (std::size_t j = 0; j < indices.size(); ++j) {
      if (indices[j].degree() == indices.max_degree()) rows.push_back(b * indices.size() + j);
    }
  }
  return rows;
}

// Shift and multiplication matrices of one rank-1 block with signed weights c.
void fill_block(const IndexSet& indices, const std::vector<double>& c, std::size_t offset,
                std::vector<CMatrix>& shifts, std::vector<CMatrix>& mults) {
  const std::size_t m = indices.dimension();
  for (std::size_t j = 0; j < indices.size(); ++j) {
    const MultiIndex& alpha = indices[j];
    for (std::size_t i = 0; i < m; ++i) {
      const auto col = static_cast<Eigen::Index>(offset + j);
      if (alpha[i] > 0) {
        const std::size_t lower = indices.position(alpha - MultiIndex::unit(m, i));
        shifts[i](static_cast<Eigen::Index>(offset + lower), col) = c[lower] / c[j];
      }
      if (auto upper = indices.find(alpha + MultiIndex::unit(m, i))) {
        mults[i](static_cast<Eigen::Index>(offset + *upper), col) =
            std::abs(c[j]) / std::abs(c[*upper]);
      }
    }
  }
}

}  // namespace

TruncatedTupleModel build_rank1(const WeightProfile& profile, std::size_t m, unsigned N,
                                std::vector<double> radii, std::optional<GrowthConstants> growth) {
  if (m == 0) throw DimensionMismatch("dimension must be at least 1");
  if (N < 1) throw ConfigError("truncation degree must be at least 1");
  validate_radii(m, radii);

  TruncatedTupleModel model;
  model.indices_ = IndexSet(m, N);
  const auto D = static_cast<Eigen::Index>(model.indices_.size());

  std::vector<double> c(model.indices_.size());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = profile.coefficient(model.indices_[j]);
  if (c[0] != 1.0) throw ConfigError("weight profile must have c_0 = 1");
  for (double x : c) {
    if (!(x > 0.0)) throw ConfigError("weight profile coefficients must be positive");
  }

  model.coefficients_ = CMatrix::Zero(D, D);
  for (Eigen::Index j = 0; j < D; ++j) model.coefficients_(j, j) = c[static_cast<std::size_t>(j)];
  model.shifts_.assign(m, CMatrix::Zero(D, D));
  model.multiplications_.assign(m, CMatrix::Zero(D, D));
  fill_block(model.indices_, c, 0, model.shifts_, model.multiplications_);
  model.basis_ = CMatrix::Identity(D, D);
  model.boundary_rows_ = top_layer_rows(model.indices_, 1);
  model.block_weights_ = {c};
  model.growth_ = settle_growth(model.coefficients_, model.indices_, radii, std::move(growth),
                                std::vector<double>(m, 1.0));
  model.radii_ = std::move(radii);

  std::ostringstream label;
  label << profile.name() << "(m=" << m << ",N=" << N << ")";
  model.label_ = label.str();
  return model;
}

std::vector<Polynomial> default_section_polynomials(std::size_t n, std::size_t m) {
  std::vector<Polynomial> phi(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<unsigned> power(m, 0);
    power[0] = static_cast<unsigned>(i);
    phi[i][MultiIndex(std::move(power))] = 1.0;
  }
  return phi;
}

std::vector<Polynomial> random_section_polynomials(std::size_t n, std::size_t m,
                                                   unsigned max_degree, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::vector<Polynomial> phi(n);
  for (auto& p : phi) {
    for (const auto& alpha : enumerate_up_to(m, max_degree)) p[alpha] = coeff(rng);
  }
  return phi;
}

TruncatedTupleModel build_rank_n(std::span<const TruncatedTupleModel> models,
                                 std::span<const Polynomial> phi, SpanningPolicy policy,
                                 std::optional<GrowthConstants> growth) {
  if (models.empty()) throw ConfigError("rank-n model needs at least one constituent");
  if (phi.size() != models.size()) {
    throw ConfigError("need one section polynomial per constituent");
  }
  const auto& first = models.front();
  const std::size_t m = first.m();
  const unsigned N = first.truncation_degree();
  for (const auto& c : models) {
    if (c.rank() != 1) throw ConfigError("rank-n constituents must be rank-1 models");
    if (c.m() != m || c.truncation_degree() != N || c.radii() != first.radii()) {
      throw ConfigError("rank-n constituents must share dimension, truncation and radii");
    }
    if (c.basis() != CMatrix::Identity(c.basis().rows(), c.basis().cols())) {
      throw ConfigError("rank-n constituents must be in standard coordinates");
    }
  }
  for (const auto& p : phi) {
    for (const auto& [beta, coeff] : p) {
      if (beta.size() != m) throw DimensionMismatch("section polynomial has the wrong dimension");
    }
  }

  const std::size_t n = models.size();
  const std::size_t D = first.block_dim();
  const auto d = static_cast<Eigen::Index>(n * D);

  TruncatedTupleModel model;
  model.indices_ = first.indices_;
  model.rank_ = n;
  model.coefficients_ = CMatrix::Zero(d, static_cast<Eigen::Index>(D));
  model.shifts_.assign(m, CMatrix::Zero(d, d));
  model.multiplications_.assign(m, CMatrix::Zero(d, d));
  for (std::size_t b = 0; b < n; ++b) {
    const auto& blk = models[b];
    fill_block(model.indices_, blk.block_weights_.front(), b * D, model.shifts_,
               model.multiplications_);
    model.block_weights_.push_back(blk.block_weights_.front());
    const auto off = static_cast<Eigen::Index>(b * D);
    for (std::size_t j = 0; j < D; ++j) {
      const MultiIndex& alpha = model.indices_[j];
      for (const auto& [beta, coeff] : phi[b]) {
        if (!alpha.dominates(beta)) continue;
        const std::size_t src = model.indices_.position(alpha - beta);
        model.coefficients_.block(off, static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(D), 1) +=
            coeff * blk.coefficients_.col(static_cast<Eigen::Index>(src));
      }
    }
  }
  model.basis_ = CMatrix::Identity(d, d);
  model.boundary_rows_ = top_layer_rows(model.indices_, n);

  std::vector<double> min_delta = first.growth().delta;
  for (const auto& c : models) {
    for (std::size_t i = 0; i < m; ++i) min_delta[i] = std::min(min_delta[i], c.growth().delta[i]);
  }
  model.growth_ = settle_growth(model.coefficients_, model.indices_, first.radii(),
                                std::move(growth), std::move(min_delta));
  model.radii_ = first.radii();

  std::ostringstream label;
  label << "sum[";
  for (std::size_t b = 0; b < n; ++b) {
    if (b) label << ',';
    label << models[b].label();
  }
  label << "]";
  model.label_ = label.str();

  if (policy == SpanningPolicy::require) require_spanning(model);
  return model;
}

TruncatedTupleModel with_flipped_coefficient(const TruncatedTupleModel& model,
                                             const MultiIndex& alpha) {
  if (model.rank() != 1 || model.basis() != CMatrix::Identity(model.basis().rows(), model.basis().cols())) {
    throw ConfigError("coefficient flip applies to rank-1 models in standard coordinates");
  }
  TruncatedTupleModel out = model;
  const std::size_t j = out.indices_.position(alpha);
  out.block_weights_[0][j] = -out.block_weights_[0][j];
  const auto D = static_cast<Eigen::Index>(out.indices_.size());
  out.coefficients_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) *= -1.0;
  out.shifts_.assign(out.m(), CMatrix::Zero(D, D));
  out.multiplications_.assign(out.m(), CMatrix::Zero(D, D));
  fill_block(out.indices_, out.block_weights_[0], 0, out.shifts_, out.multiplications_);
  out.label_ = model.label_ + "[flip " + alpha.to_string() + "]";
  return out;
}

SpanningReport verify_spanning(const TruncatedTupleModel& model, double relative_tolerance) {
  Eigen::JacobiSVD<CMatrix> svd(model.coefficients());
  SpanningReport report;
  report.dim = static_cast<long>(model.dim());
  report.relative_tolerance = relative_tolerance;
  const auto& sv = svd.singularValues();
  report.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double top = sv.size() ? sv(0) : 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (top > 0.0 && sv(i) > relative_tolerance * top) ++report.rank;
  }
  return report;
}

void require_spanning(const TruncatedTupleModel& model, double relative_tolerance) {
  const auto report = verify_spanning(model, relative_tolerance);
  if (!report.spanning()) {
    throw SpanningFailure("section coefficients have numerical rank " +
                              std::to_string(report.rank) + " < ambient dimension " +
                              std::to_string(report.dim),
                          report.rank, report.dim);
  }
}

CMatrix stacked_shift_matrix(const TruncatedTupleModel& model, std::span<const Complex> w) {
  if (w.size() != model.m()) throw DimensionMismatch("point has the wrong dimension");
  const auto d = static_cast<Eigen::Index>(model.dim());
  CMatrix stacked(d * static_cast<Eigen::Index>(model.m()), d);
  for (std::size_t i = 0; i < model.m(); ++i) {
    stacked.block(static_cast<Eigen::Index>(i) * d, 0, d, d) =
        model.shift(i) - w[i] * CMatrix::Identity(d, d);
  }
  return stacked;
}

long joint_kernel_dim(const TruncatedTupleModel& model, std::span<const Complex> w,
                      double relative_tolerance) {
  const CMatrix stacked = stacked_shift_matrix(model, w);
  Eigen::JacobiSVD<CMatrix> svd(stacked);
  const auto& sv = svd.singularValues();
  const double top = sv.size() ? sv(0) : 0.0;
  long rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (top > 0.0 && sv(i) > relative_tolerance * top) ++rank;
  }
  return static_cast<long>(model.dim()) - rank;
}

CMatrix random_unitary(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(d);
  CMatrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<CMatrix> qr(a);
  return qr.householderQ() * CMatrix::Identity(n, n);
}

}  // namespace cdlab
