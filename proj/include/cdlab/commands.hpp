#pragma once

// Subcommands of the cdlab tool. Each returns a process exit code; every
// output file is written to a temporary name and renamed into place.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cdlab/config.hpp"

namespace cdlab {

// Stable exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,     // certification failed or lemma counterexamples found
  kExitConfig = 2,      // malformed or invalid configuration
  kExitInfeasible = 3,  // k schedule beyond the truncation or working precision
  kExitBound = 4,       // a measured error exceeds its factorial bound
  kExitMissing = 5,     // report inputs absent
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> precision_bits;
  std::optional<std::string> output_directory;
};

void apply_overrides(RunConfig& config, const Overrides& overrides);

struct BuiltModel {
  ModelPtr model;
  std::vector<Polynomial> section;  // rank > 1 only
  unsigned attempts = 0;
  std::optional<SpanningReport> spanning_failure;
};

/// Builds the configured model. For rank > 1 a section that fails to span is
/// retried with seeded random polynomials; if every attempt fails the model
/// is built from the first section and the failure is returned alongside.
BuiltModel build_model(const RunConfig& config);

int cmd_verify_lemmas(const RunConfig& config, std::ostream& log);
int cmd_build_model(const RunConfig& config, std::ostream& log);
int cmd_synthesize(const RunConfig& config, std::ostream& log);
int cmd_certify(const RunConfig& config, std::ostream& log);
/// Summarizes every certificate.json and lemmas.json under `directory` into
/// summary.md (in `directory` unless `output` is given).
int cmd_report(const std::filesystem::path& directory, std::ostream& log,
               std::optional<std::filesystem::path> output = std::nullopt);

/// Runs `body`, mapping library exceptions onto exit codes.
int run_guarded(const std::function<int()>& body, std::ostream& err);

/// Write-temp-then-rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace cdlab
