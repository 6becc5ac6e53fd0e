#include "cdlab/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cdlab/errors.hpp"

namespace cdlab {

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const CheckResult& SuiteReport::check(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("no check named " + name);
}

const char* to_string(CertificateMethod method) {
  return method == CertificateMethod::extraction ? "extraction" : "krylov-rank";
}

namespace {

std::string format_point(std::span<const Complex> w) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) os << ",";
    if (w[i].imag() == 0.0) {
      os << w[i].real();
    } else {
      os << w[i].real() << (w[i].imag() < 0 ? "-" : "+") << std::abs(w[i].imag()) << "i";
    }
  }
  os << ")";
  return os.str();
}

CheckResult commutativity(const TruncatedTupleModel& model, double tol) {
  double worst = 0.0;
  for (std::size_t i = 0; i < model.m(); ++i) {
    for (std::size_t j = i + 1; j < model.m(); ++j) {
      const CMatrix c = model.shift(i) * model.shift(j) - model.shift(j) * model.shift(i);
      worst = std::max(worst, c.cwiseAbs().maxCoeff());
    }
  }
  return {"commutativity", worst <= tol, worst, tol, "max |T_i T_j - T_j T_i|"};
}

CheckResult adjoint(const TruncatedTupleModel& model, double tol) {
  const CMatrix& B = model.basis();
  const auto& boundary = model.boundary_rows();
  double worst = 0.0;
  for (std::size_t i = 0; i < model.m(); ++i) {
    // back to standard coordinates, where the boundary rows are defined
    CMatrix diff = B.adjoint() * (model.shift(i) - model.multiplication(i).adjoint()) * B;
    for (std::size_t r : boundary) diff.row(static_cast<Eigen::Index>(r)).setZero();
    worst = std::max(worst, diff.cwiseAbs().maxCoeff());
  }
  return {"adjoint", worst <= tol, worst, tol,
          "max |T_i - (M_z_i)^*| off " + std::to_string(boundary.size()) + " boundary rows"};
}

CheckResult eigenvector(const TruncatedTupleModel& model,
                        const std::vector<std::vector<Complex>>& points) {
  CheckResult out{"joint_eigenvector", true, 0.0, 0.0, ""};
  std::ostringstream detail;
  double worst_ratio = 0.0;
  for (const auto& w : points) {
    const CVector g = model.frame_vector(w);
    for (std::size_t i = 0; i < model.m(); ++i) {
      const double residual = (model.shift(i) * g - w[i] * g).norm();
      const double tail = model.frame_tail_bound(w, i);
      // rounding allowance on top of the analytic tail
      const double slack = 64 * std::numeric_limits<double>::epsilon() * g.norm();
      if (residual > tail + slack) out.passed = false;
      if (residual > out.measured) {
        out.measured = residual;
        out.threshold = tail + slack;
      }
      if (tail > 0.0) worst_ratio = std::max(worst_ratio, residual / tail);
    }
    detail << format_point(w) << " ";
  }
  detail << "worst residual/tail " << worst_ratio;
  out.detail = detail.str();
  return out;
}

CheckResult spanning(const TruncatedTupleModel& model, double tol) {
  const auto report = verify_spanning(model, tol);
  return {"spanning", report.spanning(), static_cast<double>(report.rank),
          static_cast<double>(report.dim),
          "rank " + std::to_string(report.rank) + " of " + std::to_string(report.dim)};
}

long lu_kernel_dim(const TruncatedTupleModel& model, std::span<const Complex> w, double tol) {
  Eigen::FullPivLU<CMatrix> lu(stacked_shift_matrix(model, w));
  lu.setThreshold(tol);
  return static_cast<long>(model.dim()) - static_cast<long>(lu.rank());
}

CheckResult joint_kernel(const TruncatedTupleModel& model,
                         const std::vector<std::vector<Complex>>& points, double tol) {
  CheckResult out{"joint_kernel", true, 0.0, 0.0, ""};
  std::vector<std::vector<Complex>> all{std::vector<Complex>(model.m(), Complex(0.0))};
  all.insert(all.end(), points.begin(), points.end());
  std::ostringstream detail;
  for (std::size_t p = 0; p < all.size(); ++p) {
    const long svd_dim = joint_kernel_dim(model, all[p], tol);
    const long lu_dim = lu_kernel_dim(model, all[p], tol);
    bool ok = svd_dim == lu_dim;
    if (p == 0) {
      ok = ok && svd_dim == static_cast<long>(model.rank());
      out.measured = static_cast<double>(svd_dim);
      out.threshold = static_cast<double>(model.rank());
    }
    out.passed = out.passed && ok;
    detail << format_point(all[p]) << ":" << svd_dim << (ok ? "" : "!") << " ";
  }
  out.detail = detail.str();
  return out;
}

}  // namespace

SuiteReport run_structure_suite(const TruncatedTupleModel& model, const StructureOptions& options) {
  SuiteReport report;
  report.model_label = model.label();
  report.checks.push_back(commutativity(model, options.commutativity_tolerance));
  report.checks.push_back(adjoint(model, options.adjoint_tolerance));
  report.checks.push_back(eigenvector(model, options.points));
  report.checks.push_back(spanning(model, options.spanning_tolerance));
  report.checks.push_back(joint_kernel(model, options.points, options.kernel_tolerance));
  return report;
}

long numerical_rank(const CMatrix& columns, double relative_tolerance,
                    std::vector<double>* singular_values) {
  if (columns.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(columns);
  const auto& sv = svd.singularValues();
  if (singular_values) singular_values->assign(sv.data(), sv.data() + sv.size());
  const double top = sv(0);
  long rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (top > 0.0 && sv(i) > relative_tolerance * top) ++rank;
  }
  return rank;
}

namespace {

std::string describe(const WeightedSeries& f) {
  std::ostringstream os;
  if (auto reach = f.reach()) {
    os << "xi-weighted cyclic series (" << to_string(*reach) << " reach";
    if (f.offset()->degree() > 0) os << ", shifted by " << f.offset()->to_string();
    const auto& lead = f.coefficients().front();
    if (lead.is_zero() && std::all_of(f.coefficients().begin(), f.coefficients().end(),
                                      [](const LogScalar& c) { return c.is_zero(); })) {
      os << ", zero";
    }
    os << ")";
  } else {
    os << "explicit coefficient series";
  }
  return os.str();
}

}  // namespace

CyclicityCertificate certify_extraction(const WeightedSeries& f, unsigned target_degree,
                                        const KSchedule& schedule, double tolerance,
                                        double rank_tolerance) {
  const auto& model = f.model();
  CyclicityCertificate cert;
  cert.model_label = model.label();
  cert.vector_description = describe(f);
  cert.method = CertificateMethod::extraction;
  cert.ambient_dim = static_cast<long>(model.dim());
  cert.tolerance = tolerance;

  auto report = extract_all(f, target_degree, schedule, CorrectionMode::recovered, tolerance,
                            BoundPolicy::report);
  cert.worst_log10_relative_error = report.worst_relative_error().log10_magnitude();

  const auto targets = enumerate_up_to(model.m(), target_degree);
  const auto n = static_cast<Eigen::Index>(targets.size());
  CMatrix recovered(static_cast<Eigen::Index>(model.dim()), n);
  CMatrix truth(static_cast<Eigen::Index>(model.dim()), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& alpha = targets[static_cast<std::size_t>(j)];
    recovered.col(j) = report.recovered.at(alpha);
    truth.col(j) = model.coefficient(alpha);
  }
  cert.recovered_rank = numerical_rank(recovered, rank_tolerance);
  cert.target_rank = numerical_rank(truth, rank_tolerance);

  cert.passed = report.passed() && cert.recovered_rank == cert.target_rank;
  if (!report.bounds_hold()) cert.notes.push_back("measured error exceeds the factorial bound");
  if (cert.recovered_rank != cert.target_rank) {
    cert.notes.push_back("recovered family has rank " + std::to_string(cert.recovered_rank) +
                         ", true family " + std::to_string(cert.target_rank));
  }
  if (target_degree == model.truncation_degree() && cert.target_rank < cert.ambient_dim) {
    cert.notes.push_back("coefficient family does not span the ambient space");
  } else if (target_degree < model.truncation_degree()) {
    cert.notes.push_back("covers degrees <= " + std::to_string(target_degree) + " of " +
                         std::to_string(model.truncation_degree()));
  }
  cert.extraction = std::move(report);
  return cert;
}

CyclicityCertificate certify_krylov(const WeightedSeries& f, unsigned max_degree,
                                    double svd_tolerance) {
  const auto& model = f.model();
  CyclicityCertificate cert;
  cert.model_label = model.label();
  cert.vector_description = describe(f);
  cert.method = CertificateMethod::krylov_rank;
  cert.ambient_dim = static_cast<long>(model.dim());
  cert.max_degree = max_degree;
  cert.svd_tolerance = svd_tolerance;

  const auto shifts = enumerate_up_to(model.m(), max_degree);
  CMatrix columns(static_cast<Eigen::Index>(model.dim()), static_cast<Eigen::Index>(shifts.size()));
  for (std::size_t j = 0; j < shifts.size(); ++j) {
    CVector col = f.shift_by(shifts[j]).evaluate_scaled().direction;
    const double n = col.norm();
    if (n > 0.0) col /= n;
    columns.col(static_cast<Eigen::Index>(j)) = col;
  }
  cert.krylov_rank = numerical_rank(columns, svd_tolerance, &cert.singular_values);
  cert.passed = cert.krylov_rank == cert.ambient_dim;

  if (static_cast<long>(shifts.size()) < cert.ambient_dim) {
    cert.notes.push_back(std::to_string(shifts.size()) + " Krylov columns for dimension " +
                         std::to_string(cert.ambient_dim));
  }
  const auto& sv = cert.singular_values;
  if (!sv.empty() && sv.front() > 0.0) {
    const double smallest = sv.back();
    if (smallest < svd_tolerance * sv.front()) {
      cert.ill_conditioned = true;
      std::ostringstream os;
      os << "singular values span " << sv.front() << " to " << smallest
         << "; rank decided below the tolerance";
      cert.notes.push_back(os.str());
    }
  }
  return cert;
}

}  // namespace cdlab
