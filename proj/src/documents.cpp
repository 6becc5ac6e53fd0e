#include "cdlab/documents.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace cdlab {

using nlohmann::json;

namespace {

json nullable(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

json complex_matrix(const CMatrix& a) {
  json re = json::array();
  json im = json::array();
  bool any_imag = false;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    json r = json::array();
    json c = json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      r.push_back(a(i, j).real());
      c.push_back(a(i, j).imag());
      any_imag = any_imag || a(i, j).imag() != 0.0;
    }
    re.push_back(std::move(r));
    im.push_back(std::move(c));
  }
  json out = {{"re", re}};
  if (any_imag) out["im"] = im;
  return out;
}

std::string csv_double(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

}  // namespace

std::string log10_field(const LogScalar& value) { return value.log10_string(10); }

json to_json(const LogScalar& value) {
  if (value.is_zero()) return {{"sign", 0}, {"log10_magnitude", nullptr}};
  return {{"sign", value.sign()}, {"log10_magnitude", value.log10_magnitude()}};
}

json to_json(const LemmaVerdict& v) {
  json ces = json::array();
  for (const auto& c : v.counterexamples) {
    ces.push_back({{"alpha", c.alpha.entries()}, {"lhs", c.lhs.get_str()}, {"rhs", c.rhs.get_str()}});
  }
  json params = {{"m", v.params.m}, {"l", v.params.l}, {"k", v.params.k}, {"eta", v.params.eta.entries()}};
  if (v.kind != LemmaKind::shift_dominance) params["max_extra_degree"] = v.params.max_extra_degree;
  return {{"kind", to_string(v.kind)},
          {"params", params},
          {"checked_count", v.checked_count},
          {"counterexamples", ces}};
}

json to_json(const GridVerdict& g) {
  json totals = json::object();
  for (auto kind : {LemmaKind::shift_dominance, LemmaKind::offset_dominance, LemmaKind::offset_step}) {
    totals[to_string(kind)] = {{"checked", g.checked(kind)}, {"counterexamples", g.counterexamples(kind)}};
  }
  json verdicts = json::array();
  for (const auto& v : g.verdicts) verdicts.push_back(to_json(v));
  return {{"grid",
           {{"m", {g.grid.m_min, g.grid.m_max}},
            {"l", {g.grid.l_min, g.grid.l_max}},
            {"k", {g.grid.k_min, g.grid.k_max}},
            {"extra_degree", g.grid.extra_degree}}},
          {"passed", g.passed()},
          {"totals", totals},
          {"verdicts", verdicts}};
}

json to_json(const SuiteReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"measured", c.measured},
                      {"threshold", c.threshold},
                      {"detail", c.detail}});
  }
  return {{"model", report.model_label}, {"passed", report.passed()}, {"checks", checks}};
}

json to_json(const ExtractionReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"alpha", row.alpha.entries()},
                    {"degree", row.alpha.degree()},
                    {"k", row.k},
                    {"error_log10", nullable(row.error.log10_magnitude())},
                    {"relative_error_log10", nullable(row.relative_error.log10_magnitude())},
                    {"bound_log10", row.bound.log10_magnitude()},
                    {"within_bound", row.within_bound},
                    {"within_tolerance", row.within_tolerance},
                    {"verdict", row.passed() ? "pass" : "fail"}});
  }
  return {{"model", r.model_label},
          {"corrections", to_string(r.mode)},
          {"k_schedule", r.schedule.per_layer},
          {"target_degree", r.target_degree},
          {"tolerance", r.tolerance},
          {"precision_bits", r.precision_bits},
          {"bounds_hold", r.bounds_hold()},
          {"passed", r.passed()},
          {"rows", rows}};
}

json to_json(const CyclicityCertificate& c) {
  json out = {{"method", to_string(c.method)},
              {"model", c.model_label},
              {"vector", c.vector_description},
              {"ambient_dim", c.ambient_dim},
              {"passed", c.passed},
              {"notes", c.notes}};
  if (c.method == CertificateMethod::extraction) {
    out["tolerance"] = c.tolerance;
    out["worst_relative_error_log10"] = nullable(c.worst_log10_relative_error);
    out["recovered_rank"] = c.recovered_rank;
    out["target_rank"] = c.target_rank;
    if (c.extraction) out["extraction"] = to_json(*c.extraction);
  } else {
    out["max_degree"] = c.max_degree;
    out["svd_tolerance"] = c.svd_tolerance;
    out["numerical_rank"] = c.krylov_rank;
    out["singular_values"] = c.singular_values;
    out["ill_conditioned"] = c.ill_conditioned;
  }
  return out;
}

json model_bundle(const TruncatedTupleModel& model) {
  json indices = json::array();
  for (const auto& alpha : model.indices()) indices.push_back(alpha.entries());
  json shifts = json::array();
  json mults = json::array();
  for (std::size_t i = 0; i < model.m(); ++i) {
    shifts.push_back(complex_matrix(model.shift(i)));
    mults.push_back(complex_matrix(model.multiplication(i)));
  }
  return {{"label", model.label()},
          {"dimension", model.m()},
          {"rank", model.rank()},
          {"truncation_degree", model.truncation_degree()},
          {"ambient_dim", model.dim()},
          {"growth", {{"M", model.growth().M}, {"delta", model.growth().delta}}},
          {"radii", model.radii()},
          {"indices", indices},
          {"coefficients", complex_matrix(model.coefficients())},
          {"shifts", shifts},
          {"multiplications", mults},
          {"boundary_rows", model.boundary_rows()}};
}

std::string lemma_csv(const GridVerdict& g) {
  std::ostringstream os;
  os << "kind,m,l,k,eta,checked,counterexamples\n";
  for (const auto& v : g.verdicts) {
    os << to_string(v.kind) << ',' << v.params.m << ',' << v.params.l << ',' << v.params.k << ",\""
       << v.params.eta.to_string() << "\"," << v.checked_count << ',' << v.counterexamples.size()
       << '\n';
  }
  return os.str();
}

std::string structure_csv(const SuiteReport& report) {
  std::ostringstream os;
  os << "check,passed,measured,threshold,detail\n";
  for (const auto& c : report.checks) {
    os << c.name << ',' << (c.passed ? "pass" : "fail") << ',' << csv_double(c.measured) << ','
       << csv_double(c.threshold) << ",\"" << c.detail << "\"\n";
  }
  return os.str();
}

std::string extraction_csv(std::span<const ExtractionReport* const> reports) {
  std::ostringstream os;
  os << "corrections,degree,alpha,k,error_log10,relative_error_log10,bound_log10,verdict\n";
  for (const auto* r : reports) {
    for (const auto& row : r->rows) {
      os << to_string(r->mode) << ',' << row.alpha.degree() << ",\"" << row.alpha.to_string() << "\","
         << row.k << ',' << log10_field(row.error) << ',' << log10_field(row.relative_error) << ','
         << log10_field(row.bound) << ',' << (row.passed() ? "pass" : "fail") << '\n';
    }
  }
  return os.str();
}

std::string series_csv(const WeightedSeries& series) {
  std::ostringstream os;
  os << "degree,alpha,sign,coefficient_log10\n";
  const auto& window = series.model().indices();
  for (std::size_t j = 0; j < window.size(); ++j) {
    const auto& c = series.coefficients()[j];
    os << window[j].degree() << ",\"" << window[j].to_string() << "\"," << c.sign() << ','
       << log10_field(c) << '\n';
  }
  return os.str();
}

}  // namespace cdlab
