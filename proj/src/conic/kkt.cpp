#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "irsnoma/conic.hpp"
#include "irsnoma/errors.hpp"
#include "standard_form.hpp"

namespace irsnoma::conic {

namespace {

double min_eig(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

KktReport check_kkt(const ConeProgram& p, const SolverResult& r, const SolverOptions& options) {
  if (r.status != SolveStatus::Optimal)
    throw DomainError(std::string("check_kkt needs an optimal result, got ") + to_string(r.status));

  const ConeProgram embedded = embed_quadratics(p);
  const ConeProgram real = realify(embedded);
  const detail::Lowering low = detail::lower(real);
  const detail::StandardForm& sf = low.sf;
  const Eigen::VectorXd& y = r.certificate.multipliers;
  if (y.size() != sf.num_rows())
    throw CertificationError("dual certificate has the wrong length", "certificate");

  // Program point in realified coordinates.
  PrimalPoint point;
  point.scalars = r.primal.scalars;
  if (point.scalars.size() < embedded.scalar_vars.size())
    throw CertificationError("primal point is missing auxiliary scalars", "certificate");
  for (std::size_t j = 0; j < embedded.matrix_vars.size(); ++j) {
    const Eigen::MatrixXcd& x = r.primal.matrices.at(j);
    if (embedded.matrix_vars[j].complex)
      point.matrices.push_back(real_embedding(x).cast<std::complex<double>>());
    else
      point.matrices.push_back(x);
  }

  double bnorm = 0.0, cnorm = 0.0;
  for (const auto& row : sf.rows) bnorm += row.rhs * row.rhs;
  bnorm = std::max(1.0, std::sqrt(bnorm));
  for (const auto& c : sf.cost_blocks) cnorm += c.squaredNorm();
  cnorm = std::max(1.0, std::sqrt(cnorm + sf.cost_lp.squaredNorm() + sf.cost_free.squaredNorm()));

  KktReport report;

  // primal: every original constraint, relative to the data scale
  double worst = -1.0;
  for (const auto& v : constraint_violations(p, r.primal)) {
    const double rel = v.violation / bnorm;
    if (rel > worst) {
      worst = rel;
      report.worst_constraint = v.label;
    }
  }
  report.primal_residual = std::max(0.0, worst);

  // dual: S = C - A^*(y) in the cone, F'y = f
  std::vector<Eigen::MatrixXd> s_blocks;
  Eigen::VectorXd s_lp, s_free;
  detail::dual_slack(sf, y, s_blocks, s_lp, s_free);
  double dual_worst = s_free.size() > 0 ? s_free.cwiseAbs().maxCoeff() : 0.0;
  std::string dual_label = "free-variable stationarity";
  for (std::size_t b = 0; b < s_blocks.size(); ++b) {
    const double v = -min_eig(s_blocks[b]);
    if (v > dual_worst) {
      dual_worst = v;
      dual_label = "dual slack of block " + std::to_string(b);
    }
  }
  if (s_lp.size() > 0 && -s_lp.minCoeff() > dual_worst) {
    dual_worst = -s_lp.minCoeff();
    dual_label = "dual slack of nonnegative variables";
  }
  report.dual_residual = std::max(0.0, dual_worst) / cnorm;

  // complementarity and gap of the lifted point
  const detail::SfPoint x = detail::lift(real, low, point);
  double comp = x.lp.dot(s_lp);
  for (std::size_t b = 0; b < s_blocks.size(); ++b) comp += x.blocks[b].cwiseProduct(s_blocks[b]).sum();
  double dual_bound = sf.cost_offset;
  for (int i = 0; i < sf.num_rows(); ++i) dual_bound += sf.rows[static_cast<std::size_t>(i)].rhs * y(i);
  const double objective = evaluate(p.objective, r.primal);
  const double scale = std::max(1.0, std::abs(objective));
  report.complementarity = std::abs(comp) / scale;
  report.gap = (objective - dual_bound) / scale;

  const double ftol = 10.0 * options.feas_tol;
  const double gtol = 10.0 * options.gap_tol;
  if (report.primal_residual > ftol)
    throw CertificationError("primal residual " + std::to_string(report.primal_residual) +
                                 " exceeds tolerance at " + report.worst_constraint,
                             report.worst_constraint);
  if (report.dual_residual > ftol)
    throw CertificationError("dual residual " + std::to_string(report.dual_residual) +
                                 " exceeds tolerance at " + dual_label,
                             dual_label);
  if (report.complementarity > gtol)
    throw CertificationError("complementarity " + std::to_string(report.complementarity) +
                                 " exceeds tolerance",
                             "complementarity");
  if (std::abs(report.gap) > gtol)
    throw CertificationError("duality gap " + std::to_string(report.gap) + " exceeds tolerance",
                             "objective");
  return report;
}

}  // namespace irsnoma::conic
