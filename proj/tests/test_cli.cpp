#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cdlab/commands.hpp"
#include "cdlab/errors.hpp"

using namespace cdlab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ScratchDir {
  fs::path path;
  explicit ScratchDir(const std::string& tag) {
    std::random_device rd;
    path = fs::temp_directory_path() / ("cdlab-test-" + tag + "-" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunConfig bundled(const std::string& name, const fs::path& out) {
  auto config = load_config(fs::path(CDLAB_SOURCE_DIR) / "configs" / name);
  config.output.directory = out.string();
  return config;
}

json hardy_doc() {
  return json::parse(R"({
    "schema_version": 1,
    "seed": 3,
    "model": {"dimension": 2, "profile": "hardy", "truncation_degree": 6,
              "radii": [0.5, 0.5], "delta": [1.0, 1.0], "M": 1.0},
    "synthesis": {"target_degree": 2}
  })");
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("X1: parse_config::defaults and strict keys") {
  auto config = parse_config(hardy_doc());
  CHECK(config.model.truncation_degree == 6);
  CHECK(config.synthesis.schedule().per_layer == std::vector<unsigned>{6, 4, 2});

  auto bad = hardy_doc();
  bad["model"]["truncation_degre"] = 4;
  CHECK_THROWS_AS(parse_config(bad), ConfigError);

  auto unversioned = hardy_doc();
  unversioned.erase("schema_version");
  CHECK_THROWS_AS(parse_config(unversioned), ConfigError);

  auto wrong_type = hardy_doc();
  wrong_type["synthesis"]["tolerance"] = "small";
  CHECK_THROWS_AS(parse_config(wrong_type), ConfigError);
}

TEST_CASE("X2: config_hash::ignores the output section") {
  auto a = parse_config(hardy_doc());
  auto b = a;
  b.output.directory = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 4;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("X3: verify-lemmas::single-point grid") {
  ScratchDir dir("lemmas");
  auto config = parse_config(json::parse(R"({"schema_version": 1,
      "lemmas": {"m": [2, 2], "l": [1, 1], "k": [1, 1]}})"));
  config.output.directory = dir.path.string();
  std::ostringstream log;
  CHECK(cmd_verify_lemmas(config, log) == kExitOk);
  auto doc = json::parse(slurp(dir.path / "lemmas.json"));
  CHECK(doc.at("passed").get<bool>());
  CHECK(fs::exists(dir.path / "lemmas.csv"));
  CHECK(fs::exists(dir.path / "effective_config.json"));
}

TEST_CASE("X4: malformed config::exit 2 and no outputs") {
  ScratchDir dir("bad");
  const fs::path cfg = dir.path / "bad.json";
  std::ofstream(cfg) << R"({"schema_version": 1, "model": {"dimension": 2, "colour": 1},
                           "output": {"directory": ")" << (dir.path / "out").generic_string() << R"("}})";
  std::ostringstream err;
  const int code = run_guarded([&] { return cmd_certify(load_config(cfg), err); }, err);
  CHECK(code == kExitConfig);
  CHECK_FALSE(fs::exists(dir.path / "out"));
  CHECK(err.str().find("colour") != std::string::npos);
}

TEST_CASE("X5: certify::bundled hardy config writes a passing certificate") {
  ScratchDir dir("hardy");
  std::ostringstream log;
  CHECK(cmd_certify(bundled("hardy_bidisc.json", dir.path), log) == kExitOk);
  auto cert = json::parse(slurp(dir.path / "certificate.json"));
  CHECK(cert.at("verdict") == "pass");
  for (const auto& a : cert.at("artifacts")) CHECK(fs::exists(dir.path / a.get<std::string>()));
}

TEST_CASE("X6: certify::naive demo exits with a bound violation") {
  ScratchDir dir("naive");
  std::ostringstream err;
  const int code = run_guarded([&] { return cmd_certify(bundled("naive_demo.json", dir.path), err); }, err);
  CHECK(code == kExitBound);
  CHECK(fs::exists(dir.path / "naive.csv"));
  CHECK(fs::exists(dir.path / "certificate.json"));
}

TEST_CASE("X7: certify::infeasible schedule maps to exit 3") {
  ScratchDir dir("infeasible");
  auto doc = hardy_doc();
  doc["synthesis"]["reach"] = "window";
  doc["synthesis"]["target_degree"] = 3;
  auto config = parse_config(doc);
  config.output.directory = dir.path.string();
  std::ostringstream err;
  CHECK(run_guarded([&] { return cmd_certify(config, err); }, err) == kExitInfeasible);
}

TEST_CASE("X8: report::one certificate, empty directory, determinism") {
  ScratchDir dir("report");
  auto config = parse_config(hardy_doc());
  std::ostringstream log;
  for (const char* run : {"a", "b"}) {
    config.output.directory = (dir.path / run / "hardy").string();
    REQUIRE(cmd_certify(config, log) == kExitOk);
  }
  CHECK(slurp(dir.path / "a" / "hardy" / "certificate.json") ==
        slurp(dir.path / "b" / "hardy" / "certificate.json"));
  REQUIRE(cmd_report(dir.path / "a", log) == kExitOk);
  REQUIRE(cmd_report(dir.path / "b", log) == kExitOk);
  const auto summary = slurp(dir.path / "a" / "summary.md");
  CHECK(summary == slurp(dir.path / "b" / "summary.md"));
  CHECK(summary.find("1 certificate(s)") != std::string::npos);

  fs::create_directories(dir.path / "empty");
  std::ostringstream err;
  CHECK(run_guarded([&] { return cmd_report(dir.path / "empty", err); }, err) == kExitMissing);

  fs::remove(dir.path / "a" / "hardy" / "extraction.csv");
  CHECK(run_guarded([&] { return cmd_report(dir.path / "a", err); }, err) == kExitMissing);
}

TEST_CASE("X9: overrides::seed and precision land in the effective config") {
  auto config = parse_config(hardy_doc());
  apply_overrides(config, Overrides{99, 320, std::nullopt});
  auto eff = effective_config(config);
  CHECK(eff.at("seed") == 99);
  CHECK(eff.at("synthesis").at("precision_bits") == 320);
}

}  // TEST_SUITE
