#include <CLI11.hpp>

#include <iostream>

#include "cdlab/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Cyclic-vector laboratory for weighted multi-shift models"};
  app.require_subcommand(1);

  std::string config_path;
  cdlab::Overrides overrides;
  std::uint64_t seed = 0;
  unsigned precision = 0;
  std::string output;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "run configuration (JSON)")->required();
    cmd->add_option("-o,--output", output, "output directory (overrides the config)");
    cmd->add_option("--seed", seed, "seed override");
    cmd->add_option("--precision", precision, "working precision in bits");
  };

  auto* lemmas = app.add_subcommand("verify-lemmas", "exhaustive factorial-inequality grids");
  auto* build = app.add_subcommand("build-model", "build a model, export it, run the structure suite");
  auto* synth = app.add_subcommand("synthesize", "build the cyclic vector and check its norm bound");
  auto* certify = app.add_subcommand("certify", "full certification pipeline");
  for (auto* cmd : {lemmas, build, synth, certify}) add_common(cmd);

  auto* report = app.add_subcommand("report", "summarize prior run directories");
  std::string report_dir;
  std::string report_out;
  report->add_option("directory", report_dir, "directory holding prior outputs")->required();
  report->add_option("--summary", report_out, "summary path (default: <directory>/summary.md)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cdlab::kExitConfig;
  }

  return cdlab::run_guarded(
      [&]() -> int {
        if (report->parsed()) {
          std::optional<std::filesystem::path> out;
          if (!report_out.empty()) out = report_out;
          return cdlab::cmd_report(report_dir, std::cout, out);
        }
        auto config = cdlab::load_config(config_path);
        for (auto* cmd : {lemmas, build, synth, certify}) {
          if (!cmd->parsed()) continue;
          if (cmd->count("--seed")) overrides.seed = seed;
          if (cmd->count("--precision")) overrides.precision_bits = precision;
          if (cmd->count("--output")) overrides.output_directory = output;
        }
        cdlab::apply_overrides(config, overrides);
        if (lemmas->parsed()) return cdlab::cmd_verify_lemmas(config, std::cout);
        if (build->parsed()) return cdlab::cmd_build_model(config, std::cout);
        if (synth->parsed()) return cdlab::cmd_synthesize(config, std::cout);
        return cdlab::cmd_certify(config, std::cout);
      },
      std::cerr);
}
