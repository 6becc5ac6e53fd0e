#include "cdlab/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "cdlab/errors.hpp"

namespace cdlab {

using nlohmann::json;

namespace {

// Hands out keys of one JSON object and rejects whatever was not asked for.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return node_.contains(key);
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return node_.at(key);
  }

  template <class T>
  std::optional<T> get(const std::string& key) {
    if (!has(key)) return std::nullopt;
    try {
      return node_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where(key) + ": wrong type");
    }
  }

  template <class T>
  void read(const std::string& key, T& target) {
    if (auto v = get<T>(key)) target = std::move(*v);
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.count(key)) throw ConfigError(where(key) + ": unknown key");
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

MultiIndex parse_index(const json& node, const std::string& where, std::size_t m) {
  std::vector<unsigned> entries;
  try {
    entries = node.get<std::vector<unsigned>>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": index must be a list of non-negative integers");
  }
  if (entries.size() != m) {
    throw ConfigError(where + ": index has " + std::to_string(entries.size()) +
                      " entries, dimension is " + std::to_string(m));
  }
  return MultiIndex(std::move(entries));
}

std::pair<unsigned, unsigned> parse_range(Section& s, const std::string& key,
                                          std::pair<unsigned, unsigned> fallback) {
  auto v = s.get<std::vector<unsigned>>(key);
  if (!v) return fallback;
  if (v->size() != 2 || (*v)[0] > (*v)[1]) {
    throw ConfigError(s.where(key) + ": expected [min, max] with min <= max");
  }
  return {(*v)[0], (*v)[1]};
}

void parse_model(const json& node, ModelConfig& out) {
  Section s(node, "model");
  s.read("dimension", out.dimension);
  s.read("rank", out.rank);
  if (out.dimension < 1) throw ConfigError("model.dimension must be at least 1");
  if (out.rank < 1) throw ConfigError("model.rank must be at least 1");

  if (s.has("profile")) {
    const json& p = s.raw("profile");
    if (p.is_string()) {
      out.profiles = {p.get<std::string>()};
    } else if (p.is_array() && std::all_of(p.begin(), p.end(), [](const json& x) { return x.is_string(); })) {
      out.profiles = p.get<std::vector<std::string>>();
    } else {
      throw ConfigError("model.profile: expected a name or a list of names");
    }
  }
  if (out.profiles.size() == 1) out.profiles.assign(out.rank, out.profiles.front());
  if (out.profiles.size() != out.rank) {
    throw ConfigError("model.profile: " + std::to_string(out.profiles.size()) +
                      " profiles for rank " + std::to_string(out.rank));
  }
  for (const auto& name : out.profiles) {
    if (name != "hardy" && name != "bergman" && name != "custom") {
      throw ConfigError("model.profile: unknown profile '" + name + "'");
    }
  }

  if (s.has("custom_coefficients")) {
    const json& table = s.raw("custom_coefficients");
    if (!table.is_array()) throw ConfigError("model.custom_coefficients: expected a list");
    for (std::size_t j = 0; j < table.size(); ++j) {
      Section entry(table[j], "model.custom_coefficients[" + std::to_string(j) + "]");
      const MultiIndex alpha = parse_index(entry.raw("index"), entry.where("index"), out.dimension);
      auto value = entry.get<double>("value");
      if (!value) throw ConfigError(entry.where("value") + ": required");
      entry.finish();
      out.custom_coefficients[alpha] = *value;
    }
  }
  const bool uses_custom =
      std::find(out.profiles.begin(), out.profiles.end(), "custom") != out.profiles.end();
  if (uses_custom && out.custom_coefficients.empty()) {
    throw ConfigError("model.custom_coefficients: required by the custom profile");
  }

  s.read("truncation_degree", out.truncation_degree);
  if (out.truncation_degree < 1) throw ConfigError("model.truncation_degree must be at least 1");
  s.read("radii", out.radii);
  if (out.radii.empty()) out.radii.assign(out.dimension, 0.5);
  if (out.radii.size() != out.dimension) throw ConfigError("model.radii: one radius per coordinate");
  if (auto d = s.get<std::vector<double>>("delta")) {
    if (d->size() != out.dimension) throw ConfigError("model.delta: one entry per coordinate");
    out.delta = std::move(*d);
  }
  if (auto M = s.get<double>("M")) {
    if (!(*M > 0.0)) throw ConfigError("model.M must be positive");
    out.M = *M;
  }

  if (s.has("section")) {
    const json& sec = s.raw("section");
    if (!sec.is_array() || sec.size() != out.rank) {
      throw ConfigError("model.section: expected one polynomial per block");
    }
    out.section.assign(out.rank, {});
    for (std::size_t b = 0; b < out.rank; ++b) {
      if (!sec[b].is_array()) throw ConfigError("model.section: polynomials are lists of terms");
      for (std::size_t t = 0; t < sec[b].size(); ++t) {
        Section term(sec[b][t], "model.section[" + std::to_string(b) + "][" + std::to_string(t) + "]");
        const MultiIndex power = parse_index(term.raw("index"), term.where("index"), out.dimension);
        double re = 0.0, im = 0.0;
        term.read("re", re);
        term.read("im", im);
        term.finish();
        out.section[b][power] += Complex(re, im);
      }
    }
  }
  s.read("section_retries", out.section_retries);
  s.read("section_random_degree", out.section_random_degree);
  s.finish();
}

void parse_lemmas(const json& node, LemmaGrid& out) {
  Section s(node, "lemmas");
  auto [m_min, m_max] = parse_range(s, "m", {static_cast<unsigned>(out.m_min), static_cast<unsigned>(out.m_max)});
  out.m_min = m_min;
  out.m_max = m_max;
  std::tie(out.l_min, out.l_max) = parse_range(s, "l", {out.l_min, out.l_max});
  std::tie(out.k_min, out.k_max) = parse_range(s, "k", {out.k_min, out.k_max});
  s.read("extra_degree", out.extra_degree);
  s.finish();
  if (out.m_min < 1) throw ConfigError("lemmas.m must start at 1 or above");
  if (out.l_min < 1 || out.k_min < 1) throw ConfigError("lemmas.l and lemmas.k must start at 1 or above");
}

void parse_synthesis(const json& node, SynthesisConfig& out, unsigned N) {
  Section s(node, "synthesis");
  s.read("precision_bits", out.precision_bits);
  if (out.precision_bits < 64) throw ConfigError("synthesis.precision_bits must be at least 64");
  if (auto r = s.get<std::string>("reach")) {
    if (*r == "unbounded") {
      out.reach = SeriesReach::unbounded;
    } else if (*r == "window") {
      out.reach = SeriesReach::window;
    } else {
      throw ConfigError("synthesis.reach: expected 'unbounded' or 'window'");
    }
  }
  if (auto a = s.get<std::string>("arithmetic")) {
    if (*a == "log") {
      out.arithmetic = Arithmetic::log_domain;
    } else if (*a == "naive") {
      out.arithmetic = Arithmetic::naive;
    } else {
      throw ConfigError("synthesis.arithmetic: expected 'log' or 'naive'");
    }
  }
  s.read("target_degree", out.target_degree);
  if (out.target_degree > N) throw ConfigError("synthesis.target_degree exceeds the truncation degree");
  if (s.has("k_schedule")) {
    const json& k = s.raw("k_schedule");
    if (k.is_string() && k.get<std::string>() == "staircase") {
      out.k_schedule.reset();
    } else if (k.is_array()) {
      KSchedule schedule;
      try {
        schedule.per_layer = k.get<std::vector<unsigned>>();
      } catch (const json::exception&) {
        throw ConfigError("synthesis.k_schedule: expected positive integers");
      }
      if (schedule.per_layer.empty() ||
          std::any_of(schedule.per_layer.begin(), schedule.per_layer.end(), [](unsigned x) { return x == 0; })) {
        throw ConfigError("synthesis.k_schedule: expected positive integers");
      }
      out.k_schedule = std::move(schedule);
    } else {
      throw ConfigError("synthesis.k_schedule: expected a list or \"staircase\"");
    }
  }
  s.read("tolerance", out.tolerance);
  s.read("rank_tolerance", out.rank_tolerance);
  if (!(out.tolerance > 0.0) || !(out.rank_tolerance > 0.0)) {
    throw ConfigError("synthesis tolerances must be positive");
  }
  if (auto p = s.get<std::string>("bound_policy")) {
    if (*p == "enforce") {
      out.bound_policy = BoundPolicy::enforce;
    } else if (*p == "report") {
      out.bound_policy = BoundPolicy::report;
    } else {
      throw ConfigError("synthesis.bound_policy: expected 'enforce' or 'report'");
    }
  }
  s.read("plot_max_k", out.plot_max_k);
  if (s.has("krylov")) {
    Section kr(s.raw("krylov"), "synthesis.krylov");
    kr.read("enabled", out.krylov.enabled);
    if (auto d = kr.get<unsigned>("max_degree")) out.krylov.max_degree = *d;
    kr.read("svd_tolerance", out.krylov.svd_tolerance);
    kr.finish();
  }
  if (!out.krylov.max_degree) out.krylov.max_degree = N;
  s.finish();
}

void parse_output(const json& node, OutputConfig& out) {
  Section s(node, "output");
  s.read("directory", out.directory);
  if (auto formats = s.get<std::vector<std::string>>("formats")) {
    out.csv = out.json = false;
    for (const auto& f : *formats) {
      if (f == "csv") {
        out.csv = true;
      } else if (f == "json") {
        out.json = true;
      } else {
        throw ConfigError("output.formats: unknown format '" + f + "'");
      }
    }
  }
  s.finish();
}

json polynomial_json(const Polynomial& p) {
  json terms = json::array();
  for (const auto& [power, c] : p) {
    terms.push_back({{"index", power.entries()}, {"re", c.real()}, {"im", c.imag()}});
  }
  return terms;
}

}  // namespace

KSchedule SynthesisConfig::schedule() const {
  return k_schedule.value_or(KSchedule::staircase(target_degree));
}

RunConfig parse_config(const json& doc) {
  RunConfig config;
  Section s(doc, "config");
  auto version = s.get<int>("schema_version");
  if (!version) throw ConfigError("config.schema_version: required");
  if (*version != kConfigSchemaVersion) {
    throw ConfigError("config.schema_version: unsupported version " + std::to_string(*version));
  }
  config.schema_version = *version;
  s.read("seed", config.seed);
  if (s.has("model")) parse_model(s.raw("model"), config.model);
  else parse_model(json::object(), config.model);
  if (s.has("lemmas")) parse_lemmas(s.raw("lemmas"), config.lemmas);
  const json synthesis = s.has("synthesis") ? s.raw("synthesis") : json::object();
  parse_synthesis(synthesis, config.synthesis, config.model.truncation_degree);
  if (s.has("output")) parse_output(s.raw("output"), config.output);
  s.finish();
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

json effective_config(const RunConfig& c) {
  json model = {
      {"dimension", c.model.dimension},
      {"rank", c.model.rank},
      {"profile", c.model.profiles},
      {"truncation_degree", c.model.truncation_degree},
      {"radii", c.model.radii},
      {"section_retries", c.model.section_retries},
      {"section_random_degree", c.model.section_random_degree},
  };
  if (!c.model.custom_coefficients.empty()) {
    json table = json::array();
    for (const auto& [alpha, v] : c.model.custom_coefficients) {
      table.push_back({{"index", alpha.entries()}, {"value", v}});
    }
    model["custom_coefficients"] = table;
  }
  if (c.model.delta) model["delta"] = *c.model.delta;
  if (c.model.M) model["M"] = *c.model.M;
  if (!c.model.section.empty()) {
    json sec = json::array();
    for (const auto& p : c.model.section) sec.push_back(polynomial_json(p));
    model["section"] = sec;
  }

  const auto& g = c.lemmas;
  json lemmas = {{"m", {g.m_min, g.m_max}},
                 {"l", {g.l_min, g.l_max}},
                 {"k", {g.k_min, g.k_max}},
                 {"extra_degree", g.extra_degree}};

  const auto& s = c.synthesis;
  json synthesis = {
      {"precision_bits", s.precision_bits},
      {"reach", to_string(s.reach)},
      {"arithmetic", s.arithmetic == Arithmetic::naive ? "naive" : "log"},
      {"target_degree", s.target_degree},
      {"k_schedule", s.schedule().per_layer},
      {"tolerance", s.tolerance},
      {"rank_tolerance", s.rank_tolerance},
      {"bound_policy", s.bound_policy == BoundPolicy::enforce ? "enforce" : "report"},
      {"plot_max_k", s.plot_max_k},
      {"krylov",
       {{"enabled", s.krylov.enabled},
        {"max_degree", s.krylov.max_degree.value_or(c.model.truncation_degree)},
        {"svd_tolerance", s.krylov.svd_tolerance}}},
  };

  std::vector<std::string> formats;
  if (c.output.csv) formats.push_back("csv");
  if (c.output.json) formats.push_back("json");
  json output = {{"directory", c.output.directory}, {"formats", formats}};

  return {{"schema_version", c.schema_version},
          {"seed", c.seed},
          {"model", model},
          {"lemmas", lemmas},
          {"synthesis", synthesis},
          {"output", output}};
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return os.str();
}

std::string config_hash(const RunConfig& config) {
  json doc = effective_config(config);
  doc.erase("output");
  return sha256_hex(doc.dump());
}

}  // namespace cdlab
