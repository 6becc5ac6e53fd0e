#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cdlab/model.hpp"
#include "cdlab/synth.hpp"

namespace cdlab {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct SuiteReport {
  std::string model_label;
  std::vector<CheckResult> checks;

  bool passed() const;
  const CheckResult& check(const std::string& name) const;
};

struct StructureOptions {
  double commutativity_tolerance = 1e-14;
  double adjoint_tolerance = 1e-12;
  double spanning_tolerance = 1e-10;
  double kernel_tolerance = 1e-10;
  /// Points for the eigenvector and joint-kernel checks; w = 0 is always
  /// added to the kernel check.
  std::vector<std::vector<Complex>> points{{Complex(0.3), Complex(0.2)}};
};

/// Commutativity, adjoint realization (off the boundary rows), approximate
/// joint eigenvector against the tail bound, spanning, and joint-kernel
/// dimension (SVD against a rank-revealing LU, and = rank at w = 0).
SuiteReport run_structure_suite(const TruncatedTupleModel& model, const StructureOptions& options = {});

enum class CertificateMethod { extraction, krylov_rank };

const char* to_string(CertificateMethod method);

struct CyclicityCertificate {
  std::string model_label;
  std::string vector_description;
  CertificateMethod method = CertificateMethod::extraction;
  bool passed = false;
  long ambient_dim = 0;
  std::vector<std::string> notes;

  // extraction
  std::optional<ExtractionReport> extraction;
  double tolerance = 0.0;
  /// log10 of the worst relative error, -inf when all exact
  double worst_log10_relative_error = 0.0;
  long recovered_rank = 0;  // numerical rank of the recovered family
  long target_rank = 0;     // same for the true family {a_alpha : |alpha| <= target}

  // krylov
  unsigned max_degree = 0;
  double svd_tolerance = 0.0;
  long krylov_rank = 0;
  std::vector<double> singular_values;
  bool ill_conditioned = false;
};

/// Recovers every a_alpha up to target_degree with recovered corrections.
/// Passes when every row meets its bound and the tolerance and the recovered
/// family has the numerical rank of the true one.
CyclicityCertificate certify_extraction(const WeightedSeries& f, unsigned target_degree,
                                        const KSchedule& schedule, double tolerance,
                                        double rank_tolerance = 1e-10);

/// Columns T^beta f, |beta| <= max_degree, each scaled to unit norm; passes
/// when their numerical rank reaches the ambient dimension.
CyclicityCertificate certify_krylov(const WeightedSeries& f, unsigned max_degree,
                                    double svd_tolerance = 1e-8);

/// Numerical rank of the columns by SVD relative to the largest singular value.
long numerical_rank(const CMatrix& columns, double relative_tolerance,
                    std::vector<double>* singular_values = nullptr);

}  // namespace cdlab
