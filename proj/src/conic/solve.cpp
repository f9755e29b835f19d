#include <algorithm>
#include <cmath>

#include "irsnoma/conic.hpp"
#include "standard_form.hpp"

namespace irsnoma::conic {

SolverResult solve(const ConeProgram& p, const SolverOptions& options) {
  p.validate();
  const ConeProgram embedded = embed_quadratics(p);
  const ConeProgram real = realify(embedded);
  const detail::Lowering low = detail::lower(real);
  const detail::IpmResult ipm = detail::solve_standard_form(low.sf, options);

  SolverResult r;
  r.status = ipm.status;
  r.iterations = ipm.iterations;
  r.diagnostics = ipm.diagnostics;

  for (std::size_t j = 0; j < embedded.scalar_vars.size(); ++j) {
    const detail::ScalarMap& m = low.scalars[j];
    const double v = m.kind == detail::ScalarMap::Lp ? ipm.primal.lp(m.index)
                                                     : ipm.primal.free(m.index);
    r.primal.scalars.push_back(m.offset + m.sign * v);
  }
  for (std::size_t j = 0; j < embedded.matrix_vars.size(); ++j) {
    const Eigen::MatrixXd& x = ipm.primal.blocks[static_cast<std::size_t>(low.matrix_block[j])];
    if (embedded.matrix_vars[j].complex)
      r.primal.matrices.push_back(from_real_embedding(x));
    else
      r.primal.matrices.push_back((0.5 * (x + x.transpose())).cast<std::complex<double>>());
  }

  r.certificate.multipliers = ipm.dual;
  r.certificate.psd_slack = ipm.slack_blocks;
  r.certificate.lp_slack = ipm.slack_lp;

  if (r.status == SolveStatus::Optimal) {
    r.objective = evaluate(p.objective, r.primal);
    r.dual_bound = ipm.dual_objective;
    r.gap = r.objective - r.dual_bound;
  } else {
    r.objective = ipm.primal_objective;
    r.dual_bound = ipm.dual_objective;
    r.gap = r.objective - r.dual_bound;
  }
  double bnorm = 0.0;
  for (const auto& row : low.sf.rows) bnorm += row.rhs * row.rhs;
  bnorm = std::max(1.0, std::sqrt(bnorm));
  double worst = 0.0;
  for (const auto& v : constraint_violations(p, r.primal)) worst = std::max(worst, v.violation);
  r.max_violation = worst / bnorm;
  return r;
}

}  // namespace irsnoma::conic
