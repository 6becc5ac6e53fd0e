#pragma once

// The cyclic vector f = sum_alpha xi_alpha a_alpha and the layered extraction
// of the frame coefficients a_alpha from shifted copies of f.
//
// Layer 0 recovers a_0 from
//     A_0(k) = (1/xi_S) T^S f,                              S = (k+1) eps,
// and a target alpha with |alpha| = l+1 from
//     A_alpha(k) = (1/xi_S) T^(S-alpha) f
//                  - sum_(|beta| <= l) (xi_(beta+S-alpha)/xi_S) a_beta,   S = (k+l+2) eps.
// Both agree with S = (k + |alpha| + 1) eps. Every measured error is checked
// against M e^(1/delta_1 + ... + 1/delta_m) / (k+1)!.
//
// Series are kept as log-domain coefficient maps over the frame window; the
// ratios involved span thousands of decimal orders of magnitude, and the
// huge correction terms cancel coefficient-by-coefficient rather than in
// floating point.

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cdlab/logweight.hpp"
#include "cdlab/model.hpp"

namespace cdlab {

using ModelPtr = std::shared_ptr<const TruncatedTupleModel>;

// How far the coefficient sequence of f extends.
//  - unbounded: f is the full series; the window holds the projection of
//    T^beta f onto {a_eta : |eta| <= N}, i.e. coefficients xi_(eta+beta).
//  - window: f is cut at degree N, so it lives in the truncated space and
//    T^beta acts by the finite matrices; coefficients vanish once
//    |eta + beta| > N.
enum class SeriesReach { unbounded, window };

const char* to_string(SeriesReach reach);

// sum_eta c_eta a_eta over the frame window with log-domain c_eta.
class WeightedSeries {
 public:
  WeightedSeries(ModelPtr model, XiWeights weights, std::vector<LogScalar> coefficients);

  static WeightedSeries zero(ModelPtr model, XiWeights weights);
  /// The frame coefficient a_alpha itself.
  static WeightedSeries unit(ModelPtr model, XiWeights weights, const MultiIndex& alpha);
  /// scale * T^offset f
  static WeightedSeries cyclic(ModelPtr model, XiWeights weights, SeriesReach reach,
                               std::optional<MultiIndex> offset = std::nullopt,
                               std::optional<LogScalar> scale = std::nullopt);

  const TruncatedTupleModel& model() const noexcept { return *model_; }
  const ModelPtr& model_ptr() const noexcept { return model_; }
  const XiWeights& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return coefficients_.size(); }
  const std::vector<LogScalar>& coefficients() const noexcept { return coefficients_; }
  const LogScalar& coefficient(const MultiIndex& alpha) const;

  /// Reach of the generating cyclic vector; nullopt for a general
  /// combination, which behaves like a window vector under shifts.
  std::optional<SeriesReach> reach() const;
  /// Shift already applied to the generating cyclic vector.
  std::optional<MultiIndex> offset() const;

  /// T^beta applied to the series: c'_eta = c_(eta+beta).
  WeightedSeries shift_by(const MultiIndex& beta) const;
  WeightedSeries scaled(const LogScalar& factor) const;
  WeightedSeries& operator+=(const WeightedSeries& rhs);
  WeightedSeries& operator-=(const WeightedSeries& rhs);
  friend WeightedSeries operator+(WeightedSeries a, const WeightedSeries& b) { return a += b; }
  friend WeightedSeries operator-(WeightedSeries a, const WeightedSeries& b) { return a -= b; }

  /// Vector of unit-scale magnitude and the log-domain factor it must be
  /// multiplied by: the series equals scale * direction. Terms are scaled by
  /// the largest coefficient and accumulated largest first.
  struct Scaled {
    CVector direction;
    LogScalar scale;
  };
  Scaled evaluate_scaled() const;
  /// Plain double evaluation (saturates for extreme magnitudes).
  CVector evaluate() const;
  LogScalar norm() const;

 private:
  struct Generator {
    SeriesReach reach;
    MultiIndex offset;
    LogScalar scale;
  };

  void require_compatible(const WeightedSeries& rhs) const;
  void fill_from_generator();

  ModelPtr model_;
  XiWeights weights_;
  std::vector<LogScalar> coefficients_;
  std::optional<Generator> generator_;
};

struct Synthesis {
  WeightedSeries f;
  /// M e^(1/delta_1 + ... + 1/delta_m)
  LogScalar norm_bound;
  /// Norm of f restricted to the frame window.
  LogScalar window_norm;
};

/// Builds f with coefficients xi_alpha and checks ||f|| <= M e^(sum 1/delta_i)
/// on the window (BoundViolation otherwise).
Synthesis synthesize(ModelPtr model, const XiWeights& weights,
                     SeriesReach reach = SeriesReach::unbounded);

/// M e^(sum 1/delta_i) / (k+1)!
LogScalar extraction_bound(const TruncatedTupleModel& model, unsigned k, unsigned precision_bits);

/// (k + |alpha| + 1) eps
MultiIndex extraction_anchor(const MultiIndex& alpha, unsigned k);

struct Approximant {
  MultiIndex target;
  unsigned k = 0;
  MultiIndex shift;  // S - alpha
  WeightedSeries series;
  CVector vector;
  /// ||series - a_target||, evaluated on the residual coefficient map
  LogScalar error;
  LogScalar bound;
};

using KnownCoefficients = std::map<MultiIndex, WeightedSeries>;

Approximant layer0_approximant(const WeightedSeries& f, unsigned k);

/// `known` must hold a series for every beta with |beta| < |alpha|.
Approximant layer_approximant(const WeightedSeries& f, const MultiIndex& alpha, unsigned k,
                              const KnownCoefficients& known);

enum class CorrectionMode {
  exact,      // corrections use the model's true a_beta
  recovered,  // corrections use previously recovered approximants
};

const char* to_string(CorrectionMode mode);

enum class BoundPolicy {
  enforce,  // BoundViolation if any measured error exceeds its bound
  report,   // record measured/bound ratios only
};

// k per layer; layers past the end reuse the last entry.
struct KSchedule {
  std::vector<unsigned> per_layer{2};

  static KSchedule constant(unsigned k) { return KSchedule{{k}}; }
  /// k_l = last + step (target_degree - l). With recovered corrections the
  /// error carried up from layer l is amplified by the next layer's
  /// correction ratios, so lower layers need a larger k.
  static KSchedule staircase(unsigned target_degree, unsigned last = 2, unsigned step = 2);
  unsigned at(unsigned layer) const;
  std::string to_string() const;
};

struct ExtractionRow {
  MultiIndex alpha;
  unsigned k = 0;
  LogScalar error;
  LogScalar relative_error;
  LogScalar bound;
  bool within_bound = false;
  bool within_tolerance = false;

  bool passed() const noexcept { return within_bound && within_tolerance; }
};

struct ExtractionReport {
  std::string model_label;
  CorrectionMode mode = CorrectionMode::exact;
  KSchedule schedule;
  unsigned target_degree = 0;
  double tolerance = 0.0;
  unsigned precision_bits = kDefaultPrecisionBits;
  std::vector<ExtractionRow> rows;  // graded-lex order
  std::map<MultiIndex, CVector> recovered;
  std::chrono::nanoseconds elapsed{0};

  bool bounds_hold() const;
  bool passed() const;
  const ExtractionRow& row(const MultiIndex& alpha) const;
  LogScalar worst_relative_error() const;
};

/// Largest k (<= cap) for which every shift of the given layer is
/// representable: limited by N under window reach and by the working
/// precision under unbounded reach. 0 when no k >= 1 is feasible.
unsigned max_feasible_k(const WeightedSeries& f, unsigned layer, unsigned cap = 64);

/// Throws TruncationExhausted / PrecisionExhausted describing the first
/// layer the schedule cannot reach.
void check_schedule(const WeightedSeries& f, unsigned target_degree, const KSchedule& schedule);

/// Recovers a_alpha for all |alpha| <= target_degree, layer by layer.
ExtractionReport extract_all(const WeightedSeries& f, unsigned target_degree,
                             const KSchedule& schedule, CorrectionMode mode, double tolerance,
                             BoundPolicy policy = BoundPolicy::enforce);

struct NaiveLayer0 {
  unsigned k = 0;
  double error = 0.0;
  double bound = 0.0;

  /// NaN errors count as violations.
  bool violates_bound() const noexcept { return !(error <= bound); }
};

/// Layer 0 with f materialized in double precision (window reach), T^S
/// applied as matrices and the result divided by a double xi_S.
NaiveLayer0 naive_layer0(const TruncatedTupleModel& model, unsigned k);

}  // namespace cdlab
