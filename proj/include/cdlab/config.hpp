#pragma once

// Run configuration for the command-line front end. The on-disk format is a
// JSON document with a versioned schema; unknown keys are rejected at every
// level and every default is written back into the effective-config echo.

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cdlab/lemmas.hpp"
#include "cdlab/model.hpp"
#include "cdlab/synth.hpp"

namespace cdlab {

inline constexpr int kConfigSchemaVersion = 1;

struct ModelConfig {
  std::size_t dimension = 2;
  std::size_t rank = 1;
  /// One profile for every block, or one per block.
  std::vector<std::string> profiles{"hardy"};
  std::map<MultiIndex, double> custom_coefficients;
  unsigned truncation_degree = 8;
  std::vector<double> radii;  // empty: 0.5 in every coordinate
  std::optional<std::vector<double>> delta;
  std::optional<double> M;
  /// Section polynomials for rank > 1; empty means z_1^(i-1).
  std::vector<Polynomial> section;
  unsigned section_retries = 8;
  unsigned section_random_degree = 1;
};

enum class Arithmetic { log_domain, naive };

struct KrylovConfig {
  bool enabled = true;
  std::optional<unsigned> max_degree;  // default: the truncation degree
  double svd_tolerance = 1e-8;
};

struct SynthesisConfig {
  unsigned precision_bits = kDefaultPrecisionBits;
  SeriesReach reach = SeriesReach::unbounded;
  Arithmetic arithmetic = Arithmetic::log_domain;
  unsigned target_degree = 3;
  /// Unset: KSchedule::staircase(target_degree).
  std::optional<KSchedule> k_schedule;
  double tolerance = 1e-10;
  double rank_tolerance = 1e-10;
  BoundPolicy bound_policy = BoundPolicy::enforce;
  unsigned plot_max_k = 12;
  KrylovConfig krylov;

  KSchedule schedule() const;
};

struct OutputConfig {
  std::string directory = "cdlab-out";
  bool csv = true;
  bool json = true;
};

struct RunConfig {
  int schema_version = kConfigSchemaVersion;
  std::uint64_t seed = 0;
  ModelConfig model;
  LemmaGrid lemmas;
  SynthesisConfig synthesis;
  OutputConfig output;
};

/// Throws ConfigError naming the offending key.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

/// Fully expanded configuration, defaults included.
nlohmann::json effective_config(const RunConfig& config);

/// SHA-256 (hex) of the effective configuration without its output section,
/// so relocating a run does not change its identity.
std::string config_hash(const RunConfig& config);

std::string sha256_hex(const std::string& data);

}  // namespace cdlab
