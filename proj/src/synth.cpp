#include "cdlab/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cdlab/errors.hpp"

namespace cdlab {

const char* to_string(SeriesReach reach) {
  return reach == SeriesReach::unbounded ? "unbounded" : "window";
}

const char* to_string(CorrectionMode mode) {
  return mode == CorrectionMode::exact ? "exact" : "recovered";
}

WeightedSeries::WeightedSeries(ModelPtr model, XiWeights weights, std::vector<LogScalar> coefficients)
    : model_(std::move(model)), weights_(std::move(weights)), coefficients_(std::move(coefficients)) {
  if (!model_) throw std::invalid_argument("WeightedSeries needs a model");
  if (coefficients_.size() != model_->block_dim()) {
    throw DimensionMismatch("series has " + std::to_string(coefficients_.size()) +
                            " coefficients, window has " + std::to_string(model_->block_dim()));
  }
}

WeightedSeries WeightedSeries::zero(ModelPtr model, XiWeights weights) {
  const std::size_t n = model->block_dim();
  const unsigned bits = weights.precision_bits();
  return WeightedSeries(std::move(model), std::move(weights),
                        std::vector<LogScalar>(n, LogScalar::zero(bits)));
}

WeightedSeries WeightedSeries::unit(ModelPtr model, XiWeights weights, const MultiIndex& alpha) {
  auto out = zero(model, weights);
  out.coefficients_[model->indices().position(alpha)] = LogScalar::one(weights.precision_bits());
  return out;
}

WeightedSeries WeightedSeries::cyclic(ModelPtr model, XiWeights weights, SeriesReach reach,
                                      std::optional<MultiIndex> offset,
                                      std::optional<LogScalar> scale) {
  const std::size_t m = model->m();
  MultiIndex off = offset.value_or(MultiIndex(m));
  if (off.size() != m) throw DimensionMismatch("cyclic offset has the wrong dimension");
  LogScalar s = scale.value_or(LogScalar::one(weights.precision_bits()));
  auto out = zero(model, weights);
  out.generator_ = Generator{reach, std::move(off), std::move(s)};
  out.fill_from_generator();
  return out;
}

void WeightedSeries::fill_from_generator() {
  const auto& g = *generator_;
  const auto& window = model_->indices();
  const unsigned N = window.max_degree();
  for (std::size_t j = 0; j < window.size(); ++j) {
    const MultiIndex index = window[j] + g.offset;
    if (g.scale.is_zero() || (g.reach == SeriesReach::window && index.degree() > N)) {
      coefficients_[j] = LogScalar::zero(weights_.precision_bits());
    } else {
      coefficients_[j] = g.scale * weights_.xi(index);
    }
  }
}

const LogScalar& WeightedSeries::coefficient(const MultiIndex& alpha) const {
  return coefficients_[model_->indices().position(alpha)];
}

std::optional<SeriesReach> WeightedSeries::reach() const {
  if (!generator_) return std::nullopt;
  return generator_->reach;
}

std::optional<MultiIndex> WeightedSeries::offset() const {
  if (!generator_) return std::nullopt;
  return generator_->offset;
}

WeightedSeries WeightedSeries::shift_by(const MultiIndex& beta) const {
  if (beta.size() != model_->m()) throw DimensionMismatch("shift index has the wrong dimension");
  WeightedSeries out = *this;
  if (generator_) {
    out.generator_->offset += beta;
    out.fill_from_generator();
    return out;
  }
  const auto& window = model_->indices();
  for (std::size_t j = 0; j < window.size(); ++j) {
    const auto src = window.find(window[j] + beta);
    out.coefficients_[j] = src ? coefficients_[*src] : LogScalar::zero(weights_.precision_bits());
  }
  return out;
}

WeightedSeries WeightedSeries::scaled(const LogScalar& factor) const {
  // Scale the stored coefficients rather than refilling from the generator:
  // refilling reassociates the log sums and spoils exact cancellations.
  WeightedSeries out = *this;
  if (out.generator_) out.generator_->scale *= factor;
  for (auto& c : out.coefficients_) c *= factor;
  return out;
}

void WeightedSeries::require_compatible(const WeightedSeries& rhs) const {
  if (model_ != rhs.model_) throw DimensionMismatch("series over different models");
}

WeightedSeries& WeightedSeries::operator+=(const WeightedSeries& rhs) {
  require_compatible(rhs);
  for (std::size_t j = 0; j < coefficients_.size(); ++j) coefficients_[j] += rhs.coefficients_[j];
  generator_.reset();
  return *this;
}

WeightedSeries& WeightedSeries::operator-=(const WeightedSeries& rhs) {
  require_compatible(rhs);
  for (std::size_t j = 0; j < coefficients_.size(); ++j) coefficients_[j] -= rhs.coefficients_[j];
  generator_.reset();
  return *this;
}

WeightedSeries::Scaled WeightedSeries::evaluate_scaled() const {
  const unsigned bits = weights_.precision_bits();
  CVector direction = CVector::Zero(static_cast<Eigen::Index>(model_->dim()));
  std::vector<std::size_t> order;
  for (std::size_t j = 0; j < coefficients_.size(); ++j) {
    if (!coefficients_[j].is_zero()) order.push_back(j);
  }
  if (order.empty()) return {direction, LogScalar::zero(bits)};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return coefficients_[a].log_magnitude() > coefficients_[b].log_magnitude();
  });
  const BigFloat& anchor = coefficients_[order.front()].log_magnitude();
  for (std::size_t j : order) {
    const auto& c = coefficients_[j];
    const double weight = c.sign() * exp(c.log_magnitude() - anchor).to_double();
    if (weight == 0.0) break;  // sorted: everything after underflows too
    direction += weight * model_->coefficients().col(static_cast<Eigen::Index>(j));
  }
  return {direction, LogScalar::from_log(1, anchor)};
}

CVector WeightedSeries::evaluate() const {
  auto [direction, scale] = evaluate_scaled();
  if (scale.is_zero()) return direction;
  return direction * scale.to_float().value;
}

LogScalar WeightedSeries::norm() const {
  auto [direction, scale] = evaluate_scaled();
  const double n = direction.norm();
  if (scale.is_zero() || n == 0.0) return LogScalar::zero(weights_.precision_bits());
  return scale * LogScalar::from_double(n, weights_.precision_bits());
}

namespace {

LogScalar growth_factor(const TruncatedTupleModel& model, unsigned bits) {
  const auto& g = model.growth();
  BigFloat lg = log(BigFloat(g.M, bits)) + BigFloat(g.inverse_delta_sum(), bits);
  return LogScalar::from_log(1, std::move(lg));
}

}  // namespace

Synthesis synthesize(ModelPtr model, const XiWeights& weights, SeriesReach reach) {
  auto f = WeightedSeries::cyclic(model, weights, reach);
  LogScalar bound = growth_factor(*model, weights.precision_bits());
  LogScalar norm = f.norm();
  if (norm > bound) {
    throw BoundViolation("||f|| = 10^" + norm.log10_string(6) + " exceeds M e^(sum 1/delta) = 10^" +
                         bound.log10_string(6));
  }
  return {std::move(f), std::move(bound), std::move(norm)};
}

LogScalar extraction_bound(const TruncatedTupleModel& model, unsigned k, unsigned precision_bits) {
  LogScalar out = growth_factor(model, precision_bits);
  out /= LogScalar::from_integer(factorial(k + 1), precision_bits);
  return out;
}

MultiIndex extraction_anchor(const MultiIndex& alpha, unsigned k) {
  return MultiIndex::diagonal(alpha.size(), k + static_cast<unsigned>(alpha.degree()) + 1);
}

namespace {

// Shifts that A_alpha(k) evaluates: the anchor S and every eta + offset + S -
// alpha over the window. Returns a description of the first obstacle.
std::optional<std::string> layer_obstacle(const WeightedSeries& f, unsigned layer, unsigned k,
                                          bool* precision) {
  const auto& model = f.model();
  const std::size_t m = model.m();
  const unsigned N = model.truncation_degree();
  const MultiIndex offset = f.offset().value_or(MultiIndex(m));
  const MultiIndex S = MultiIndex::diagonal(m, k + layer + 1);
  const auto reach = f.reach();
  std::ostringstream os;
  if (reach == SeriesReach::window) {
    if (S.degree() + offset.degree() > N) {
      os << "layer " << layer << " with k = " << k << " needs T^" << S.to_string()
         << "-alpha f to reach a_alpha, but the series stops at degree " << N;
      *precision = false;
      return os.str();
    }
    return std::nullopt;
  }
  const auto& weights = f.weights();
  if (!weights.representable(S)) {
    os << "layer " << layer << " with k = " << k << ": xi" << S.to_string() << " exceeds "
       << weights.precision_bits() << "-bit working precision";
    *precision = true;
    return os.str();
  }
  // A general vector of the truncated space: the shifts act exactly.
  if (!reach) return std::nullopt;
  // The largest shifted index dominates every other, and representability is
  // monotone along domination, so the top layer of the window suffices.
  for (const auto& alpha : enumerate_layer(m, layer)) {
    for (const auto& eta : enumerate_layer(m, N)) {
      const MultiIndex index = eta + offset + S - alpha;
      if (!weights.representable(index)) {
        os << "layer " << layer << " with k = " << k << ": xi" << index.to_string() << " exceeds "
           << weights.precision_bits() << "-bit working precision";
        *precision = true;
        return os.str();
      }
    }
  }
  return std::nullopt;
}

void require_feasible(const WeightedSeries& f, unsigned layer, unsigned k) {
  if (k == 0) throw std::invalid_argument("extraction order k must be at least 1");
  if (layer > f.model().truncation_degree()) {
    throw TruncationExhausted("layer " + std::to_string(layer) + " lies beyond the truncation degree " +
                              std::to_string(f.model().truncation_degree()));
  }
  bool precision = false;
  if (auto why = layer_obstacle(f, layer, k, &precision)) {
    if (precision) throw PrecisionExhausted(*why);
    throw TruncationExhausted(*why);
  }
}

Approximant finish(const WeightedSeries& f, const MultiIndex& alpha, unsigned k, MultiIndex shift,
                   WeightedSeries series) {
  const auto target = WeightedSeries::unit(f.model_ptr(), f.weights(), alpha);
  LogScalar error = (series - target).norm();
  CVector vector = series.evaluate();
  LogScalar bound = extraction_bound(f.model(), k, f.weights().precision_bits());
  return Approximant{alpha, k, std::move(shift), std::move(series), std::move(vector),
                     std::move(error), std::move(bound)};
}

}  // namespace

Approximant layer0_approximant(const WeightedSeries& f, unsigned k) {
  const MultiIndex origin(f.model().m());
  return layer_approximant(f, origin, k, {});
}

Approximant layer_approximant(const WeightedSeries& f, const MultiIndex& alpha, unsigned k,
                              const KnownCoefficients& known) {
  const auto& model = f.model();
  if (alpha.size() != model.m()) throw DimensionMismatch("target index has the wrong dimension");
  const unsigned layer = static_cast<unsigned>(alpha.degree());
  require_feasible(f, layer, k);

  const auto& weights = f.weights();
  const MultiIndex S = extraction_anchor(alpha, k);
  const MultiIndex shift = S - alpha;
  const LogScalar inverse_xi_S = LogScalar::one(weights.precision_bits()) / weights.xi(S);
  WeightedSeries series = f.shift_by(shift).scaled(inverse_xi_S);

  if (layer > 0) {
    for (unsigned l = 0; l < layer; ++l) {
      for (const auto& beta : enumerate_layer(model.m(), l)) {
        const auto it = known.find(beta);
        if (it == known.end()) {
          throw MissingLowerLayer("extracting a" + alpha.to_string() + " needs a" +
                                  beta.to_string() + ", which has not been recovered");
        }
        series -= it->second.scaled(weights.xi_ratio(beta + shift, S));
      }
    }
  }
  return finish(f, alpha, k, shift, std::move(series));
}

KSchedule KSchedule::staircase(unsigned target_degree, unsigned last, unsigned step) {
  KSchedule out;
  out.per_layer.clear();
  for (unsigned l = 0; l <= target_degree; ++l) out.per_layer.push_back(last + step * (target_degree - l));
  return out;
}

unsigned KSchedule::at(unsigned layer) const {
  if (per_layer.empty()) throw std::invalid_argument("empty k schedule");
  return per_layer[std::min<std::size_t>(layer, per_layer.size() - 1)];
}

std::string KSchedule::to_string() const {
  std::string out = "[";
  for (std::size_t i = 0; i < per_layer.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(per_layer[i]);
  }
  return out + "]";
}

bool ExtractionReport::bounds_hold() const {
  return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.within_bound; });
}

bool ExtractionReport::passed() const {
  return !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.passed(); });
}

const ExtractionRow& ExtractionReport::row(const MultiIndex& alpha) const {
  for (const auto& r : rows) {
    if (r.alpha == alpha) return r;
  }
  throw std::out_of_range("no extraction row for " + alpha.to_string());
}

LogScalar ExtractionReport::worst_relative_error() const {
  LogScalar worst = LogScalar::zero(precision_bits);
  for (const auto& r : rows) {
    if (r.relative_error > worst) worst = r.relative_error;
  }
  return worst;
}

unsigned max_feasible_k(const WeightedSeries& f, unsigned layer, unsigned cap) {
  unsigned best = 0;
  for (unsigned k = 1; k <= cap; ++k) {
    bool precision = false;
    if (layer_obstacle(f, layer, k, &precision)) break;
    best = k;
  }
  return best;
}

void check_schedule(const WeightedSeries& f, unsigned target_degree, const KSchedule& schedule) {
  for (unsigned layer = 0; layer <= target_degree; ++layer) {
    require_feasible(f, layer, schedule.at(layer));
  }
}

ExtractionReport extract_all(const WeightedSeries& f, unsigned target_degree,
                             const KSchedule& schedule, CorrectionMode mode, double tolerance,
                             BoundPolicy policy) {
  const auto start = std::chrono::steady_clock::now();
  check_schedule(f, target_degree, schedule);

  const auto& model = f.model();
  const auto& weights = f.weights();
  const unsigned bits = weights.precision_bits();
  ExtractionReport report;
  report.model_label = model.label();
  report.mode = mode;
  report.schedule = schedule;
  report.target_degree = target_degree;
  report.tolerance = tolerance;
  report.precision_bits = bits;

  KnownCoefficients known;
  if (mode == CorrectionMode::exact) {
    for (const auto& beta : enumerate_up_to(model.m(), target_degree)) {
      known.emplace(beta, WeightedSeries::unit(f.model_ptr(), weights, beta));
    }
  }
  const LogScalar tol = LogScalar::from_double(tolerance, bits);

  KnownCoefficients recovered;
  for (unsigned layer = 0; layer <= target_degree; ++layer) {
    const unsigned k = schedule.at(layer);
    for (const auto& alpha : enumerate_layer(model.m(), layer)) {
      Approximant a = layer_approximant(f, alpha, k, mode == CorrectionMode::exact ? known : recovered);
      ExtractionRow row;
      row.alpha = alpha;
      row.k = k;
      row.relative_error = a.error / LogScalar::from_double(model.coefficient_norm(alpha), bits);
      row.within_bound = a.error <= a.bound;
      row.within_tolerance = row.relative_error <= tol;
      row.error = std::move(a.error);
      row.bound = std::move(a.bound);
      report.recovered.emplace(alpha, std::move(a.vector));
      report.rows.push_back(std::move(row));
      if (mode == CorrectionMode::recovered) recovered.emplace(alpha, std::move(a.series));
    }
  }
  report.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(
      std::chrono::steady_clock::now() - start);

  if (policy == BoundPolicy::enforce) {
    for (const auto& r : report.rows) {
      if (!r.within_bound) {
        throw BoundViolation("a" + r.alpha.to_string() + ": error 10^" + r.error.log10_string(6) +
                             " exceeds the bound 10^" + r.bound.log10_string(6) + " at k = " +
                             std::to_string(r.k));
      }
    }
  }
  return report;
}

NaiveLayer0 naive_layer0(const TruncatedTupleModel& model, unsigned k) {
  if (k == 0) throw std::invalid_argument("extraction order k must be at least 1");
  const auto& window = model.indices();
  CVector f = CVector::Zero(static_cast<Eigen::Index>(model.dim()));
  for (std::size_t j = 0; j < window.size(); ++j) {
    f += naive::xi(window[j]) * model.coefficients().col(static_cast<Eigen::Index>(j));
  }
  const MultiIndex S = MultiIndex::diagonal(model.m(), k + 1);
  const CVector approx = model.apply(S, f) / naive::xi(S);
  const MultiIndex origin(model.m());

  NaiveLayer0 out;
  out.k = k;
  out.error = (approx - model.coefficient(origin)).norm();
  double fact = 1.0;
  for (unsigned j = 2; j <= k + 1; ++j) fact *= j;
  out.bound = model.growth().M * std::exp(model.growth().inverse_delta_sum()) / fact;
  return out;
}

}  // namespace cdlab
