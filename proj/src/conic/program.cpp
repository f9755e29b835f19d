#include <algorithm>
#include <limits>
#include <cmath>
#include <string>

#include "irsnoma/conic.hpp"
#include "irsnoma/errors.hpp"

namespace irsnoma::conic {

AffineExpr AffineExpr::scalar(int index, double coef) {
  AffineExpr e;
  e.scalar_terms.emplace_back(index, coef);
  return e;
}

AffineExpr AffineExpr::trace(int matrix_index, Eigen::MatrixXcd coef) {
  AffineExpr e;
  e.trace_terms.emplace_back(matrix_index, std::move(coef));
  return e;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& other) {
  constant += other.constant;
  for (const auto& [j, c] : other.scalar_terms) {
    bool merged = false;
    for (auto& [i, d] : scalar_terms)
      if (i == j) {
        d += c;
        merged = true;
        break;
      }
    if (!merged) scalar_terms.emplace_back(j, c);
  }
  for (const auto& [j, c] : other.trace_terms) {
    bool merged = false;
    for (auto& [i, d] : trace_terms)
      if (i == j && d.rows() == c.rows()) {
        d += c;
        merged = true;
        break;
      }
    if (!merged) trace_terms.emplace_back(j, c);
  }
  return *this;
}

AffineExpr& AffineExpr::operator*=(double s) {
  constant *= s;
  for (auto& term : scalar_terms) term.second *= s;
  for (auto& term : trace_terms) term.second *= s;
  return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& other) {
  AffineExpr neg = other;
  neg *= -1.0;
  return *this += neg;
}

AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
AffineExpr operator-(AffineExpr a) { return a *= -1.0; }
AffineExpr operator*(double s, AffineExpr a) { return a *= s; }
AffineExpr operator*(AffineExpr a, double s) { return a *= s; }

const AffineExpr& LmiConstraint::at(int row, int col) const {
  if (row > col) std::swap(row, col);
  // row-major upper triangle offset
  const int offset = row * size - row * (row - 1) / 2 + (col - row);
  return entries.at(static_cast<std::size_t>(offset));
}

int ConeProgram::add_matrix(std::string name, int size, bool complex) {
  matrix_vars.push_back({std::move(name), size, complex});
  return static_cast<int>(matrix_vars.size()) - 1;
}

int ConeProgram::add_scalar(std::string name, std::optional<double> lower,
                            std::optional<double> upper) {
  scalar_vars.push_back({std::move(name), lower, upper});
  return static_cast<int>(scalar_vars.size()) - 1;
}

void ConeProgram::add_linear(AffineExpr expr, Sense sense, std::string label) {
  lin_cons.push_back({std::move(expr), sense, std::move(label)});
}

void ConeProgram::add_quadratic(QuadraticConstraint q) { quad_cons.push_back(std::move(q)); }

void ConeProgram::add_lmi(LmiConstraint lmi) { psd_cons.push_back(std::move(lmi)); }

void ConeProgram::add_lmi2(AffineExpr a11, AffineExpr a12, AffineExpr a22, std::string label) {
  psd_cons.push_back({2, {std::move(a11), std::move(a12), std::move(a22)}, std::move(label)});
}

void ConeProgram::add_diagonal(int var, int index, double value, std::string label) {
  diag_cons.push_back({var, index, value, std::move(label)});
}

bool ConeProgram::has_complex_blocks() const {
  for (const auto& m : matrix_vars)
    if (m.complex) return true;
  return false;
}

namespace {

void check_expr(const ConeProgram& p, const AffineExpr& e, const std::string& where) {
  if (!std::isfinite(e.constant)) throw ModelingError(where + ": non-finite constant");
  for (const auto& [j, c] : e.scalar_terms) {
    if (j < 0 || j >= static_cast<int>(p.scalar_vars.size()))
      throw ModelingError(where + ": reference to undeclared scalar " + std::to_string(j));
    if (!std::isfinite(c)) throw ModelingError(where + ": non-finite coefficient");
  }
  for (const auto& [j, c] : e.trace_terms) {
    if (j < 0 || j >= static_cast<int>(p.matrix_vars.size()))
      throw ModelingError(where + ": reference to undeclared matrix " + std::to_string(j));
    const int n = p.matrix_vars[static_cast<std::size_t>(j)].size;
    if (c.rows() != n || c.cols() != n)
      throw ModelingError(where + ": coefficient of matrix " + std::to_string(j) +
                          " has wrong dimensions");
    if (!c.allFinite()) throw ModelingError(where + ": non-finite coefficient");
    const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
    if ((c - c.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
      throw ModelingError(where + ": trace coefficient is not Hermitian");
    if (!p.matrix_vars[static_cast<std::size_t>(j)].complex && c.imag().cwiseAbs().maxCoeff() > 0)
      throw ModelingError(where + ": complex coefficient on a real matrix variable");
  }
}

}  // namespace

void ConeProgram::validate() const {
  for (const auto& m : matrix_vars)
    if (m.size < 1) throw ModelingError("matrix variable " + m.name + " has size < 1");
  for (const auto& s : scalar_vars) {
    if ((s.lower && !std::isfinite(*s.lower)) || (s.upper && !std::isfinite(*s.upper)))
      throw ModelingError("scalar " + s.name + " has a non-finite bound");
    if (s.lower && s.upper && *s.lower > *s.upper)
      throw ModelingError("scalar " + s.name + " has lower bound above upper bound");
  }
  check_expr(*this, objective, "objective");
  for (const auto& c : lin_cons) check_expr(*this, c.expr, c.label);
  for (const auto& q : quad_cons) {
    if (q.terms.empty()) throw ModelingError(q.label + ": quadratic constraint without terms");
    if (!q.weights.empty() && q.weights.size() != q.terms.size())
      throw ModelingError(q.label + ": weight count does not match term count");
    for (const auto& t : q.terms) check_expr(*this, t, q.label);
    check_expr(*this, q.bound, q.label);
    if (q.denominator) check_expr(*this, *q.denominator, q.label);
  }
  for (const auto& l : psd_cons) {
    if (l.size < 1 || static_cast<int>(l.entries.size()) != l.size * (l.size + 1) / 2)
      throw ModelingError(l.label + ": LMI entry count does not match its size");
    for (const auto& e : l.entries) check_expr(*this, e, l.label);
  }
  for (const auto& d : diag_cons) {
    if (d.var < 0 || d.var >= static_cast<int>(matrix_vars.size()))
      throw ModelingError(d.label + ": reference to undeclared matrix");
    if (d.index < 0 || d.index >= matrix_vars[static_cast<std::size_t>(d.var)].size)
      throw ModelingError(d.label + ": diagonal index out of range");
    if (!std::isfinite(d.value)) throw ModelingError(d.label + ": non-finite value");
  }
}

double evaluate(const AffineExpr& expr, const PrimalPoint& point) {
  double v = expr.constant;
  for (const auto& [j, c] : expr.scalar_terms) v += c * point.scalars.at(static_cast<std::size_t>(j));
  for (const auto& [j, c] : expr.trace_terms)
    v += (c.cwiseProduct(point.matrices.at(static_cast<std::size_t>(j)).transpose())).sum().real();
  return v;
}

std::vector<ConstraintViolation> constraint_violations(const ConeProgram& p,
                                                       const PrimalPoint& point) {
  std::vector<ConstraintViolation> out;
  for (std::size_t j = 0; j < p.scalar_vars.size(); ++j) {
    const auto& s = p.scalar_vars[j];
    const double x = point.scalars.at(j);
    double v = -std::numeric_limits<double>::infinity();
    if (s.lower) v = std::max(v, *s.lower - x);
    if (s.upper) v = std::max(v, x - *s.upper);
    if (s.lower || s.upper) out.push_back({"bounds of " + s.name, v});
  }
  for (std::size_t j = 0; j < p.matrix_vars.size(); ++j) {
    const Eigen::MatrixXcd& X = point.matrices.at(j);
    const Eigen::MatrixXcd herm = 0.5 * (X + X.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
    out.push_back({"psd " + p.matrix_vars[j].name, -es.eigenvalues().minCoeff()});
  }
  for (const auto& c : p.lin_cons) {
    const double v = evaluate(c.expr, point);
    switch (c.sense) {
      case Sense::GreaterEqual: out.push_back({c.label, -v}); break;
      case Sense::LessEqual: out.push_back({c.label, v}); break;
      case Sense::Equal: out.push_back({c.label, std::abs(v)}); break;
    }
  }
  for (const auto& q : p.quad_cons) {
    const double denom = q.denominator ? evaluate(*q.denominator, point) : 1.0;
    double lhs = 0.0;
    for (std::size_t j = 0; j < q.terms.size(); ++j) {
      const double a = evaluate(q.terms[j], point);
      const double w = q.weights.empty() ? 1.0 : q.weights[j];
      lhs += w * a * a;
    }
    const double b = evaluate(q.bound, point);
    // compare in the multiplied-out form lhs <= b * denom, which stays finite at denom = 0
    double v = lhs - b * denom;
    if (q.denominator) v = std::max({v, -denom, -b});
    out.push_back({q.label, v});
  }
  for (const auto& l : p.psd_cons) {
    Eigen::MatrixXd m(l.size, l.size);
    for (int r = 0; r < l.size; ++r)
      for (int c = r; c < l.size; ++c) m(r, c) = m(c, r) = evaluate(l.at(r, c), point);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    out.push_back({l.label, -es.eigenvalues().minCoeff()});
  }
  for (const auto& d : p.diag_cons) {
    const double x = point.matrices.at(static_cast<std::size_t>(d.var))(d.index, d.index).real();
    out.push_back({d.label, std::abs(x - d.value)});
  }
  return out;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

}  // namespace irsnoma::conic
