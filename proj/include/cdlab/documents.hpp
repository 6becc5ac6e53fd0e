#pragma once

// Structured (JSON) and tabular (CSV) renderings of every result type. All
// magnitudes that can leave the double range are written as log10 values and
// the field names say so. Nothing time-dependent is ever serialized.

#include <json.hpp>

#include <string>

#include "cdlab/certify.hpp"
#include "cdlab/lemmas.hpp"
#include "cdlab/synth.hpp"

namespace cdlab {

inline constexpr const char* kToolName = "cdlab";
inline constexpr const char* kToolVersion = "0.3.0";
inline constexpr int kCertificateSchemaVersion = 1;

/// {"sign": s, "log10_magnitude": x}; x is null for an exact zero.
nlohmann::json to_json(const LogScalar& value);
nlohmann::json to_json(const LemmaVerdict& verdict);
nlohmann::json to_json(const GridVerdict& verdict);
nlohmann::json to_json(const SuiteReport& report);
nlohmann::json to_json(const ExtractionReport& report);
nlohmann::json to_json(const CyclicityCertificate& certificate);

/// Coefficients, operator matrices and growth data for external inspection.
nlohmann::json model_bundle(const TruncatedTupleModel& model);

std::string lemma_csv(const GridVerdict& verdict);
std::string structure_csv(const SuiteReport& report);
/// One row per target index and correction mode.
std::string extraction_csv(std::span<const ExtractionReport* const> reports);
std::string series_csv(const WeightedSeries& series);

/// log10 rendering used in every table: fixed significant digits, "-inf"
/// for exact zeros.
std::string log10_field(const LogScalar& value);

}  // namespace cdlab
