#include <cmath>
#include <string>

#include "irsnoma/conic.hpp"
#include "irsnoma/errors.hpp"

namespace irsnoma::conic {

QuadraticEmbedding embed_quadratic_as_psd(const QuadraticConstraint& q, int first_aux_index) {
  QuadraticEmbedding out;
  const AffineExpr denom = q.denominator ? *q.denominator : AffineExpr(1.0);
  std::vector<std::pair<double, const AffineExpr*>> active;
  for (std::size_t j = 0; j < q.terms.size(); ++j) {
    const double w = q.weights.empty() ? 1.0 : q.weights[j];
    if (w < 0.0 || !std::isfinite(w))
      throw ModelingError(q.label + ": negative weight makes the constraint non-convex");
    if (w > 0.0) active.emplace_back(w, &q.terms[j]);
  }

  if (active.empty()) {
    // 0 <= b, plus D >= 0 when a denominator is present
    out.linear.push_back({q.bound, Sense::GreaterEqual, q.label});
    if (q.denominator) out.linear.push_back({denom, Sense::GreaterEqual, q.label + "/denominator"});
    return out;
  }
  if (active.size() == 1) {
    const auto [w, a] = active.front();
    out.lmis.push_back({2, {q.bound, std::sqrt(w) * *a, denom}, q.label});
    return out;
  }

  AffineExpr sum;
  for (std::size_t j = 0; j < active.size(); ++j) {
    const auto [w, a] = active[j];
    const int idx = first_aux_index + static_cast<int>(j);
    out.aux_vars.push_back({q.label + "/s" + std::to_string(j), std::nullopt, std::nullopt});
    out.lmis.push_back({2, {AffineExpr::scalar(idx), *a, (1.0 / w) * denom},
                        q.label + "/term" + std::to_string(j)});
    sum += AffineExpr::scalar(idx);
  }
  out.linear.push_back({q.bound - sum, Sense::GreaterEqual, q.label});
  return out;
}

ConeProgram embed_quadratics(const ConeProgram& p) {
  ConeProgram out = p;
  out.quad_cons.clear();
  for (const auto& q : p.quad_cons) {
    auto emb = embed_quadratic_as_psd(q, static_cast<int>(out.scalar_vars.size()));
    for (auto& v : emb.aux_vars) out.scalar_vars.push_back(std::move(v));
    for (auto& l : emb.lmis) out.psd_cons.push_back(std::move(l));
    for (auto& c : emb.linear) out.lin_cons.push_back(std::move(c));
  }
  return out;
}

namespace {

AffineExpr realify_expr(const AffineExpr& e, const std::vector<MatrixVar>& vars) {
  AffineExpr out;
  out.constant = e.constant;
  out.scalar_terms = e.scalar_terms;
  for (const auto& [j, c] : e.trace_terms) {
    if (vars[static_cast<std::size_t>(j)].complex)
      out.trace_terms.emplace_back(j, (0.5 * real_embedding(c)).cast<std::complex<double>>());
    else
      out.trace_terms.emplace_back(j, c.real().cast<std::complex<double>>());
  }
  return out;
}

}  // namespace

ConeProgram realify(const ConeProgram& p) {
  ConeProgram out;
  out.scalar_vars = p.scalar_vars;
  for (const auto& m : p.matrix_vars)
    out.matrix_vars.push_back({m.name, m.complex ? 2 * m.size : m.size, false});
  out.objective = realify_expr(p.objective, p.matrix_vars);
  for (const auto& c : p.lin_cons)
    out.lin_cons.push_back({realify_expr(c.expr, p.matrix_vars), c.sense, c.label});
  for (const auto& q : p.quad_cons) {
    QuadraticConstraint r = q;
    for (auto& t : r.terms) t = realify_expr(t, p.matrix_vars);
    r.bound = realify_expr(q.bound, p.matrix_vars);
    if (q.denominator) r.denominator = realify_expr(*q.denominator, p.matrix_vars);
    out.quad_cons.push_back(std::move(r));
  }
  for (const auto& l : p.psd_cons) {
    LmiConstraint r = l;
    for (auto& e : r.entries) e = realify_expr(e, p.matrix_vars);
    out.psd_cons.push_back(std::move(r));
  }
  for (const auto& d : p.diag_cons) {
    out.diag_cons.push_back(d);
    const auto& var = p.matrix_vars[static_cast<std::size_t>(d.var)];
    if (var.complex) out.diag_cons.push_back({d.var, d.index + var.size, d.value, d.label});
  }
  return out;
}

Eigen::MatrixXcd from_real_embedding(const Eigen::MatrixXd& x) {
  if (x.rows() != x.cols() || x.rows() % 2 != 0)
    throw ModelingError("real embedding must be square with even side");
  const Eigen::Index n = x.rows() / 2;
  const Eigen::MatrixXd re = 0.5 * (x.topLeftCorner(n, n) + x.bottomRightCorner(n, n));
  const Eigen::MatrixXd im = 0.5 * (x.bottomLeftCorner(n, n) - x.topRightCorner(n, n));
  Eigen::MatrixXcd out(n, n);
  out.real() = 0.5 * (re + re.transpose());
  out.imag() = 0.5 * (im - im.transpose());
  return out;
}

}  // namespace irsnoma::conic
