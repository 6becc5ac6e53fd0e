#include "cdlab/commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "cdlab/certify.hpp"
#include "cdlab/documents.hpp"
#include "cdlab/errors.hpp"

namespace cdlab {

namespace fs = std::filesystem;
using nlohmann::json;

void apply_overrides(RunConfig& config, const Overrides& overrides) {
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.precision_bits) {
    if (*overrides.precision_bits < 64) throw ConfigError("--precision must be at least 64");
    config.synthesis.precision_bits = *overrides.precision_bits;
  }
  if (overrides.output_directory) config.output.directory = *overrides.output_directory;
}

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

int run_guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const GrowthViolation& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const PointOutsideDomain& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const TruncationExhausted& e) {
    err << "infeasible schedule: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const PrecisionExhausted& e) {
    err << "infeasible schedule: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const BoundViolation& e) {
    err << "bound violation: " << e.what() << '\n';
    return kExitBound;
  } catch (const MissingInput& e) {
    err << "missing input: " << e.what() << '\n';
    return kExitMissing;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

namespace {

WeightProfile profile_for(const ModelConfig& c, std::size_t block) {
  const auto& name = c.profiles.at(block);
  if (name == "bergman") return WeightProfile::bergman();
  if (name == "custom") return WeightProfile::custom(c.custom_coefficients);
  return WeightProfile::hardy();
}

std::optional<GrowthConstants> growth_for(const ModelConfig& c) {
  if (!c.delta && !c.M) return std::nullopt;
  GrowthConstants g;
  g.M = c.M.value_or(0.0);
  g.delta = c.delta.value_or(std::vector<double>(c.dimension, 1.0));
  return g;
}

json header(const RunConfig& config, const std::string& kind) {
  return {{"document", kind},
          {"schema_version", kCertificateSchemaVersion},
          {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
          {"config_sha256", config_hash(config)},
          {"seed", config.seed}};
}

// Files of one run, written together once everything has been computed.
class RunOutput {
 public:
  explicit RunOutput(const RunConfig& config) : config_(config), dir_(config.output.directory) {}

  void add(const std::string& name, std::string content) { files_[name] = std::move(content); }
  void add_json(const std::string& name, const json& doc) { add(name, doc.dump(2) + "\n"); }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : files_) out.push_back(name);
    return out;
  }

  void commit(std::ostream& log) {
    add_json("effective_config.json", effective_config(config_));
    for (const auto& [name, content] : files_) write_atomic(dir_ / name, content);
    log << "wrote " << files_.size() << " files to " << dir_.string() << '\n';
  }

 private:
  const RunConfig& config_;
  fs::path dir_;
  std::map<std::string, std::string> files_;
};

json model_summary(const BuiltModel& built) {
  const auto& model = *built.model;
  json out = {{"label", model.label()},
              {"dimension", model.m()},
              {"rank", model.rank()},
              {"truncation_degree", model.truncation_degree()},
              {"ambient_dim", model.dim()},
              {"growth", {{"M", model.growth().M}, {"delta", model.growth().delta}}},
              {"radii", model.radii()}};
  if (model.rank() > 1) {
    json section = json::array();
    for (const auto& p : built.section) {
      json terms = json::array();
      for (const auto& [power, c] : p) {
        terms.push_back({{"index", power.entries()}, {"re", c.real()}, {"im", c.imag()}});
      }
      section.push_back(terms);
    }
    out["section"] = section;
    out["section_attempts"] = built.attempts;
    out["section_spans"] = !built.spanning_failure.has_value();
  }
  return out;
}

void log_suite(const SuiteReport& suite, std::ostream& log) {
  for (const auto& c : suite.checks) {
    log << "  " << std::left << std::setw(18) << c.name << (c.passed ? "pass" : "FAIL") << "  "
        << c.detail << '\n';
  }
}

}  // namespace

BuiltModel build_model(const RunConfig& config) {
  const auto& c = config.model;
  BuiltModel out;
  if (c.rank == 1) {
    out.model = std::make_shared<const TruncatedTupleModel>(
        build_rank1(profile_for(c, 0), c.dimension, c.truncation_degree, c.radii, growth_for(c)));
    out.attempts = 1;
    return out;
  }

  std::vector<TruncatedTupleModel> blocks;
  for (std::size_t b = 0; b < c.rank; ++b) {
    blocks.push_back(build_rank1(profile_for(c, b), c.dimension, c.truncation_degree, c.radii));
  }
  const std::vector<Polynomial> first =
      c.section.empty() ? default_section_polynomials(c.rank, c.dimension) : c.section;

  std::mt19937_64 rng(config.seed);
  std::vector<Polynomial> phi = first;
  for (unsigned attempt = 0; attempt <= c.section_retries; ++attempt) {
    out.attempts = attempt + 1;
    try {
      out.model = std::make_shared<const TruncatedTupleModel>(
          build_rank_n(blocks, phi, SpanningPolicy::require, growth_for(c)));
      out.section = phi;
      return out;
    } catch (const SpanningFailure&) {
      phi = random_section_polynomials(c.rank, c.dimension, c.section_random_degree, rng);
    }
  }
  out.model = std::make_shared<const TruncatedTupleModel>(
      build_rank_n(blocks, first, SpanningPolicy::report, growth_for(c)));
  out.section = first;
  out.spanning_failure = verify_spanning(*out.model);
  return out;
}

int cmd_verify_lemmas(const RunConfig& config, std::ostream& log) {
  const auto verdict = verify_lemma_grid(config.lemmas);
  RunOutput out(config);
  json doc = header(config, "lemma-verdicts");
  doc.update(to_json(verdict));
  if (config.output.json) out.add_json("lemmas.json", doc);
  if (config.output.csv) out.add("lemmas.csv", lemma_csv(verdict));
  out.commit(log);

  for (auto kind : {LemmaKind::shift_dominance, LemmaKind::offset_dominance, LemmaKind::offset_step}) {
    log << std::left << std::setw(18) << to_string(kind) << verdict.checked(kind) << " checked, "
        << verdict.counterexamples(kind) << " counterexamples\n";
  }
  if (!verdict.passed()) {
    for (const auto& v : verdict.verdicts) {
      for (const auto& ce : v.counterexamples) {
        log << "  counterexample " << to_string(v.kind) << " m=" << v.params.m << " l=" << v.params.l
            << " k=" << v.params.k << " eta=" << v.params.eta << " alpha=" << ce.alpha << '\n';
      }
    }
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_build_model(const RunConfig& config, std::ostream& log) {
  const auto built = build_model(config);
  const auto suite = run_structure_suite(*built.model);
  RunOutput out(config);
  if (config.output.json) {
    json bundle = header(config, "model-bundle");
    bundle["model"] = model_bundle(*built.model);
    bundle["summary"] = model_summary(built);
    out.add_json("model.json", bundle);
    json s = header(config, "structure-suite");
    s["structure"] = to_json(suite);
    out.add_json("structure.json", s);
  }
  if (config.output.csv) out.add("structure.csv", structure_csv(suite));
  out.commit(log);
  log << built.model->label() << ": d = " << built.model->dim() << '\n';
  log_suite(suite, log);
  return suite.passed() ? kExitOk : kExitFailure;
}

int cmd_synthesize(const RunConfig& config, std::ostream& log) {
  const auto built = build_model(config);
  const XiWeights weights(config.synthesis.precision_bits);
  const auto syn = synthesize(built.model, weights, config.synthesis.reach);

  json feasible = json::array();
  for (unsigned l = 0; l <= config.synthesis.target_degree; ++l) {
    feasible.push_back({{"layer", l}, {"max_k", max_feasible_k(syn.f, l)}});
  }
  RunOutput out(config);
  if (config.output.json) {
    json doc = header(config, "synthesis");
    doc["model"] = model_summary(built);
    doc["reach"] = to_string(config.synthesis.reach);
    doc["precision_bits"] = weights.precision_bits();
    doc["norm"] = to_json(syn.window_norm);
    doc["norm_bound"] = to_json(syn.norm_bound);
    doc["feasible_k"] = feasible;
    out.add_json("synthesis.json", doc);
  }
  if (config.output.csv) out.add("series.csv", series_csv(syn.f));
  out.commit(log);
  log << "||f|| = 10^" << syn.window_norm.log10_string(8) << " <= M e^(sum 1/delta) = 10^"
      << syn.norm_bound.log10_string(8) << '\n';
  return kExitOk;
}

namespace {

struct PlotRow {
  unsigned layer;
  unsigned k;
  MultiIndex worst;
  LogScalar error;
  LogScalar bound;
};

std::vector<PlotRow> plot_rows(const WeightedSeries& f, unsigned target, unsigned max_k) {
  const auto& model = f.model();
  KnownCoefficients known;
  for (const auto& beta : enumerate_up_to(model.m(), target)) {
    known.emplace(beta, WeightedSeries::unit(f.model_ptr(), f.weights(), beta));
  }
  std::vector<PlotRow> rows;
  for (unsigned layer = 0; layer <= target; ++layer) {
    const unsigned top = std::min(max_k, max_feasible_k(f, layer, max_k));
    for (unsigned k = 1; k <= top; ++k) {
      std::optional<PlotRow> worst;
      for (const auto& alpha : enumerate_layer(model.m(), layer)) {
        auto a = layer_approximant(f, alpha, k, known);
        if (!worst || a.error > worst->error) {
          worst = PlotRow{layer, k, alpha, std::move(a.error), std::move(a.bound)};
        }
      }
      rows.push_back(std::move(*worst));
    }
  }
  return rows;
}

std::string plot_csv(const std::vector<PlotRow>& rows) {
  std::ostringstream os;
  os << "layer,k,worst_alpha,error_log10,bound_log10\n";
  for (const auto& r : rows) {
    os << r.layer << ',' << r.k << ",\"" << r.worst.to_string() << "\"," << log10_field(r.error) << ','
       << log10_field(r.bound) << '\n';
  }
  return os.str();
}

int certify_naive(const RunConfig& config, const BuiltModel& built, const SuiteReport& suite,
                  std::ostream& log) {
  const auto& model = *built.model;
  const auto& s = config.synthesis;
  std::vector<NaiveLayer0> rows;
  bool violated = false;
  for (unsigned k = 1; k <= s.plot_max_k; ++k) {
    rows.push_back(naive_layer0(model, k));
    violated = violated || rows.back().violates_bound();
  }

  std::ostringstream csv;
  csv << "k,xi_anchor_double,error,bound,violates_bound\n";
  json table = json::array();
  for (const auto& r : rows) {
    const double xi = naive::xi(MultiIndex::diagonal(model.m(), r.k + 1));
    std::ostringstream err;
    err << std::setprecision(10) << r.error;
    csv << r.k << ',' << std::setprecision(10) << xi << ',' << err.str() << ',' << r.bound << ','
        << (r.violates_bound() ? "yes" : "no") << '\n';
    table.push_back({{"k", r.k},
                     {"xi_anchor_double", xi},
                     {"error", std::isfinite(r.error) ? json(r.error) : json(err.str())},
                     {"bound", r.bound},
                     {"violates_bound", r.violates_bound()}});
  }

  const int code = violated ? (s.bound_policy == BoundPolicy::enforce ? kExitBound : kExitFailure)
                            : (suite.passed() ? kExitOk : kExitFailure);
  RunOutput out(config);
  if (config.output.json) {
    json doc = header(config, "cyclicity-certificate");
    doc["scope"] = "finite truncation of total degree <= N";
    doc["model"] = model_summary(built);
    doc["arithmetic"] = "naive";
    doc["structure"] = to_json(suite);
    doc["naive_layer0"] = table;
    doc["notes"] = {
        "f materialized in double precision; xi weights below the double range become 0",
        "once xi_(k+1)eps underflows, T^((k+1)eps) f / xi_(k+1)eps is 0/0 and the error is NaN"};
    doc["verdict"] = violated ? "fail" : "pass";
    doc["exit_code"] = code;
    out.add_json("certificate.json", doc);
  }
  if (config.output.csv) out.add("naive.csv", csv.str());
  out.commit(log);
  for (const auto& r : rows) {
    log << "naive k=" << r.k << " error=" << r.error << " bound=" << r.bound
        << (r.violates_bound() ? "  VIOLATION" : "") << '\n';
  }
  return code;
}

}  // namespace

int cmd_certify(const RunConfig& config, std::ostream& log) {
  const auto built = build_model(config);
  const auto& model = *built.model;
  const auto& s = config.synthesis;
  const auto suite = run_structure_suite(model);
  if (s.arithmetic == Arithmetic::naive) return certify_naive(config, built, suite, log);

  const XiWeights weights(s.precision_bits);
  const auto syn = synthesize(built.model, weights, s.reach);
  const KSchedule schedule = s.schedule();
  check_schedule(syn.f, s.target_degree, schedule);

  const auto start = std::chrono::steady_clock::now();
  const auto exact = extract_all(syn.f, s.target_degree, schedule, CorrectionMode::exact, s.tolerance,
                                 BoundPolicy::report);
  const auto cert = certify_extraction(syn.f, s.target_degree, schedule, s.tolerance, s.rank_tolerance);
  std::optional<CyclicityCertificate> krylov;
  if (s.krylov.enabled) {
    krylov = certify_krylov(syn.f, s.krylov.max_degree.value_or(model.truncation_degree()),
                            s.krylov.svd_tolerance);
  }
  const auto plot = plot_rows(syn.f, s.target_degree, s.plot_max_k);
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);

  const bool bounds_hold = exact.bounds_hold() && cert.extraction->bounds_hold();
  const bool certified = cert.passed && suite.passed() && !built.spanning_failure;
  int code = kExitOk;
  if (!bounds_hold && s.bound_policy == BoundPolicy::enforce) {
    code = kExitBound;
  } else if (!certified) {
    code = kExitFailure;
  }

  RunOutput out(config);
  std::vector<std::string> artifacts{"effective_config.json"};
  if (config.output.csv) {
    const ExtractionReport* reports[] = {&exact, &*cert.extraction};
    out.add("extraction.csv", extraction_csv(reports));
    out.add("plot_data.csv", plot_csv(plot));
    out.add("structure.csv", structure_csv(suite));
  }
  if (config.output.json) {
    for (const auto& name : out.names()) artifacts.push_back(name);
    artifacts.push_back("certificate.json");
    std::sort(artifacts.begin(), artifacts.end());

    json doc = header(config, "cyclicity-certificate");
    doc["scope"] = "finite truncation of total degree <= N";
    doc["model"] = model_summary(built);
    doc["arithmetic"] = "log";
    doc["precision_bits"] = s.precision_bits;
    doc["synthesis"] = {{"reach", to_string(s.reach)},
                        {"norm", to_json(syn.window_norm)},
                        {"norm_bound", to_json(syn.norm_bound)}};
    doc["structure"] = to_json(suite);
    json certs = json::array({to_json(cert)});
    if (krylov) certs.push_back(to_json(*krylov));
    doc["certificates"] = certs;
    doc["exact_corrections"] = to_json(exact);
    doc["artifacts"] = artifacts;
    doc["verdict"] = certified && bounds_hold ? "pass" : "fail";
    doc["exit_code"] = code;
    out.add_json("certificate.json", doc);
  }
  out.commit(log);

  log << model.label() << ": d = " << model.dim() << '\n';
  log_suite(suite, log);
  if (built.spanning_failure) {
    log << "  section does not span after " << built.attempts << " attempts: rank "
        << built.spanning_failure->rank << " of " << built.spanning_failure->dim << '\n';
  }
  log << "extraction (exact corrections): " << (exact.passed() ? "pass" : "FAIL") << '\n';
  log << "extraction (recovered corrections): " << (cert.passed ? "pass" : "FAIL")
      << ", worst relative error 10^" << cert.worst_log10_relative_error << '\n';
  if (krylov) {
    log << "krylov rank: " << krylov->krylov_rank << " of " << krylov->ambient_dim
        << (krylov->passed ? "" : " (cross-check only)") << '\n';
  }
  log << "elapsed " << std::fixed << std::setprecision(3) << elapsed.count() << " s\n";
  return code;
}

namespace {

std::string fmt_log10(const json& v) {
  if (v.is_null()) return "-inf";
  std::ostringstream os;
  os << std::setprecision(6) << v.get<double>();
  return os.str();
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw MissingInput(path.string() + " is not a readable document: " + e.what());
  }
}

void summarize_certificate(const json& doc, const fs::path& rel, std::ostream& os) {
  os << "## " << rel.generic_string() << "\n\n";
  os << "- model: " << doc.at("model").at("label").get<std::string>() << ", d = "
     << doc.at("model").at("ambient_dim") << '\n';
  os << "- verdict: " << doc.at("verdict").get<std::string>() << " (exit " << doc.at("exit_code") << ")\n";
  os << "- arithmetic: " << doc.at("arithmetic").get<std::string>() << '\n';
  os << "- config sha256: " << doc.at("config_sha256").get<std::string>() << "\n\n";

  os << "| check | result | detail |\n|---|---|---|\n";
  for (const auto& c : doc.at("structure").at("checks")) {
    os << "| " << c.at("name").get<std::string>() << " | " << (c.at("passed").get<bool>() ? "pass" : "fail")
       << " | " << c.at("detail").get<std::string>() << " |\n";
  }
  os << '\n';

  if (doc.contains("naive_layer0")) {
    os << "| k | error | bound | violates bound |\n|---|---|---|---|\n";
    for (const auto& r : doc.at("naive_layer0")) {
      os << "| " << r.at("k") << " | " << r.at("error").dump() << " | " << r.at("bound") << " | "
         << (r.at("violates_bound").get<bool>() ? "yes" : "no") << " |\n";
    }
    os << '\n';
    return;
  }
  for (const auto& c : doc.at("certificates")) {
    const auto method = c.at("method").get<std::string>();
    os << "### " << method << ": " << (c.at("passed").get<bool>() ? "pass" : "fail") << "\n\n";
    if (method == "extraction") {
      os << "worst relative error log10 " << fmt_log10(c.at("worst_relative_error_log10"))
         << ", recovered rank " << c.at("recovered_rank") << " of " << c.at("target_rank") << "\n\n";
      os << "| alpha | k | error log10 | bound log10 | verdict |\n|---|---|---|---|---|\n";
      for (const auto& r : c.at("extraction").at("rows")) {
        os << "| " << r.at("alpha").dump() << " | " << r.at("k") << " | " << fmt_log10(r.at("error_log10"))
           << " | " << fmt_log10(r.at("bound_log10")) << " | " << r.at("verdict").get<std::string>()
           << " |\n";
      }
      os << '\n';
    } else {
      os << "numerical rank " << c.at("numerical_rank") << " of " << c.at("ambient_dim")
         << " at tolerance " << c.at("svd_tolerance") << "\n\n";
    }
    for (const auto& n : c.at("notes")) os << "- " << n.get<std::string>() << '\n';
    if (!c.at("notes").empty()) os << '\n';
  }
}

void summarize_lemmas(const json& doc, const fs::path& rel, std::ostream& os) {
  os << "## " << rel.generic_string() << "\n\n";
  os << "- verdict: " << (doc.at("passed").get<bool>() ? "pass" : "fail") << '\n';
  os << "- config sha256: " << doc.at("config_sha256").get<std::string>() << "\n\n";
  os << "| check | cases | counterexamples |\n|---|---|---|\n";
  for (const auto& [kind, t] : doc.at("totals").items()) {
    os << "| " << kind << " | " << t.at("checked") << " | " << t.at("counterexamples") << " |\n";
  }
  os << '\n';
}

}  // namespace

int cmd_report(const fs::path& directory, std::ostream& log, std::optional<fs::path> output) {
  if (!fs::is_directory(directory)) {
    throw MissingInput(directory.string() + " is not a directory");
  }
  std::vector<fs::path> certificates;
  std::vector<fs::path> lemmas;
  for (const auto& entry : fs::recursive_directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename();
    if (name == "certificate.json") certificates.push_back(entry.path());
    if (name == "lemmas.json") lemmas.push_back(entry.path());
  }
  if (certificates.empty() && lemmas.empty()) {
    throw MissingInput("no certificate.json or lemmas.json under " + directory.string());
  }
  std::sort(certificates.begin(), certificates.end());
  std::sort(lemmas.begin(), lemmas.end());

  std::vector<std::string> missing;
  for (const auto& path : certificates) {
    const json doc = read_json(path);
    if (!doc.contains("artifacts")) continue;
    for (const auto& a : doc.at("artifacts")) {
      const fs::path companion = path.parent_path() / a.get<std::string>();
      if (!fs::exists(companion)) missing.push_back(fs::relative(companion, directory).generic_string());
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += "\n  " + m;
    throw MissingInput("artifacts listed by a certificate are absent:" + list);
  }

  std::ostringstream os;
  os << "# cdlab run summary\n\n";
  os << certificates.size() << " certificate(s), " << lemmas.size() << " lemma report(s)\n\n";
  for (const auto& path : lemmas) summarize_lemmas(read_json(path), fs::relative(path, directory), os);
  for (const auto& path : certificates) {
    summarize_certificate(read_json(path), fs::relative(path, directory), os);
  }
  const fs::path target = output.value_or(directory / "summary.md");
  write_atomic(target, os.str());
  log << "wrote " << target.string() << '\n';
  return kExitOk;
}

}  // namespace cdlab
