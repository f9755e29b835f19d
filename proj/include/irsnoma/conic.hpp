#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace irsnoma::conic {

/// Hermitian (or real symmetric, when `complex` is false) matrix variable.
/// Every matrix variable is constrained to the PSD cone.
struct MatrixVar {
  std::string name;
  int size = 0;
  bool complex = true;
};

struct ScalarVar {
  std::string name;
  std::optional<double> lower;
  std::optional<double> upper;
};

/// Real affine functional: constant + sum_j a_j s_j + sum_j Re Tr(C_j X_j).
///
/// Trace coefficients are Hermitian; for Hermitian X the trace is real.
struct AffineExpr {
  double constant = 0.0;
  std::vector<std::pair<int, double>> scalar_terms;
  std::vector<std::pair<int, Eigen::MatrixXcd>> trace_terms;

  AffineExpr() = default;
  AffineExpr(double c) : constant(c) {}  // NOLINT(google-explicit-constructor)

  static AffineExpr scalar(int index, double coef = 1.0);
  static AffineExpr trace(int matrix_index, Eigen::MatrixXcd coef);

  AffineExpr& operator+=(const AffineExpr& other);
  AffineExpr& operator-=(const AffineExpr& other);
  AffineExpr& operator*=(double s);

  bool is_constant() const { return scalar_terms.empty() && trace_terms.empty(); }
};

AffineExpr operator+(AffineExpr a, const AffineExpr& b);
AffineExpr operator-(AffineExpr a, const AffineExpr& b);
AffineExpr operator-(AffineExpr a);
AffineExpr operator*(double s, AffineExpr a);
AffineExpr operator*(AffineExpr a, double s);

enum class Sense { LessEqual, GreaterEqual, Equal };

/// expr (sense) 0
struct LinearConstraint {
  AffineExpr expr;
  Sense sense = Sense::GreaterEqual;
  std::string label;
};

/// sum_j weights_j * terms_j^2 / denominator <= bound.
/// Without a denominator the divisor is 1. Convex iff all weights are >= 0.
struct QuadraticConstraint {
  std::vector<AffineExpr> terms;
  std::vector<double> weights;  // empty means all ones
  AffineExpr bound;
  std::optional<AffineExpr> denominator;
  std::string label;
};

/// Small symmetric linear matrix inequality [e_ab] >= 0, entries listed
/// row-major over the upper triangle (size*(size+1)/2 of them).
struct LmiConstraint {
  int size = 2;
  std::vector<AffineExpr> entries;
  std::string label;

  const AffineExpr& at(int row, int col) const;
};

/// X_var(index, index) == value.
struct DiagonalConstraint {
  int var = 0;
  int index = 0;
  double value = 1.0;
  std::string label;
};

/// Convex program over PSD matrix blocks and real scalars, minimizing a
/// linear objective.
struct ConeProgram {
  std::vector<MatrixVar> matrix_vars;
  std::vector<ScalarVar> scalar_vars;
  AffineExpr objective;
  std::vector<LinearConstraint> lin_cons;
  std::vector<QuadraticConstraint> quad_cons;
  std::vector<LmiConstraint> psd_cons;
  std::vector<DiagonalConstraint> diag_cons;

  int add_matrix(std::string name, int size, bool complex = true);
  int add_scalar(std::string name, std::optional<double> lower = std::nullopt,
                 std::optional<double> upper = std::nullopt);
  void add_linear(AffineExpr expr, Sense sense, std::string label);
  void add_quadratic(QuadraticConstraint q);
  void add_lmi(LmiConstraint lmi);
  void add_lmi2(AffineExpr a11, AffineExpr a12, AffineExpr a22, std::string label);
  void add_diagonal(int var, int index, double value, std::string label);

  /// Throws ModelingError for dangling references, bad dimensions, non-finite
  /// or non-Hermitian coefficients.
  void validate() const;
  bool has_complex_blocks() const;
};

/// Point in the variable space of a program.
struct PrimalPoint {
  std::vector<double> scalars;
  std::vector<Eigen::MatrixXcd> matrices;
};

double evaluate(const AffineExpr& expr, const PrimalPoint& point);

/// Signed violation of each constraint family at `point` (<= 0 means satisfied).
struct ConstraintViolation {
  std::string label;
  double violation = 0.0;
};
std::vector<ConstraintViolation> constraint_violations(const ConeProgram& p,
                                                       const PrimalPoint& point);

// ---------------------------------------------------------------------------
// Reformulations

/// Result of lowering one quadratic constraint to 2x2 PSD blocks.
struct QuadraticEmbedding {
  std::vector<ScalarVar> aux_vars;  // appended after the existing scalars
  std::vector<LmiConstraint> lmis;
  std::vector<LinearConstraint> linear;
};

/// Schur-complement lowering of sum_j w_j a_j^2 / D <= b.
/// A single term becomes [[b, sqrt(w) a], [sqrt(w) a, D]] >= 0 directly; with
/// several terms every square gets an epigraph scalar s_j with
/// [[s_j, a_j], [a_j, D / w_j]] >= 0 plus sum_j s_j <= b.
/// `first_aux_index` is the index the first auxiliary scalar will receive.
QuadraticEmbedding embed_quadratic_as_psd(const QuadraticConstraint& q, int first_aux_index);

/// Replaces every quadratic constraint by its PSD embedding.
ConeProgram embed_quadratics(const ConeProgram& p);

/// Maps complex Hermitian blocks to real symmetric blocks of twice the side,
/// X -> [[Re X, -Im X], [Im X, Re X]]. Trace coefficients become half their
/// embedding so that Tr(A X) = Tr((A~/2) X~).
ConeProgram realify(const ConeProgram& p);

/// Real symmetric embedding [[Re A, -Im A], [Im A, Re A]].
template <typename Derived>
Eigen::Matrix<typename Derived::RealScalar, Eigen::Dynamic, Eigen::Dynamic> real_embedding(
    const Eigen::MatrixBase<Derived>& a) {
  const Eigen::Index n = a.rows();
  const Eigen::Index m = a.cols();
  Eigen::Matrix<typename Derived::RealScalar, Eigen::Dynamic, Eigen::Dynamic> out(2 * n, 2 * m);
  out.topLeftCorner(n, m) = a.real();
  out.topRightCorner(n, m) = -a.imag();
  out.bottomLeftCorner(n, m) = a.imag();
  out.bottomRightCorner(n, m) = a.real();
  return out;
}

/// Inverse of real_embedding after averaging over the embedding's symmetry.
Eigen::MatrixXcd from_real_embedding(const Eigen::MatrixXd& x);

// ---------------------------------------------------------------------------
// Solving

struct SolverOptions {
  double gap_tol = 1e-7;   // relative to max(1, |objective|)
  double feas_tol = 1e-7;  // relative to max(1, |data|)
  int max_iters = 100;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

const char* to_string(SolveStatus s);

/// Dual variables of the lowered standard form, kept so that optimality can be
/// re-certified independently of the solver.
struct DualCertificate {
  Eigen::VectorXd multipliers;             // one per standard-form equality
  std::vector<Eigen::MatrixXd> psd_slack;  // dual slack per PSD block
  Eigen::VectorXd lp_slack;                // dual slack of nonnegative variables
};

struct SolverResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  /// Values of the program's variables; `scalars` may carry trailing
  /// auxiliary scalars introduced by quadratic embedding.
  PrimalPoint primal;
  double objective = 0.0;
  double dual_bound = 0.0;
  double gap = 0.0;
  double max_violation = 0.0;  // relative to max(1, ||standard-form rhs||)
  int iterations = 0;
  DualCertificate certificate;
  std::string diagnostics;

  bool optimal() const { return status == SolveStatus::Optimal; }
  double scalar(int i) const { return primal.scalars.at(static_cast<std::size_t>(i)); }
  const Eigen::MatrixXcd& matrix(int i) const {
    return primal.matrices.at(static_cast<std::size_t>(i));
  }
};

/// Primal-dual interior-point solve (homogeneous self-dual embedding,
/// Nesterov-Todd scaling, Mehrotra predictor-corrector).
/// Never throws on infeasible or unbounded input; those are statuses.
SolverResult solve(const ConeProgram& p, const SolverOptions& options = {});

struct KktReport {
  double primal_residual = 0.0;     // worst constraint violation (relative)
  double dual_residual = 0.0;       // worst dual-feasibility violation (relative)
  double complementarity = 0.0;     // <X, S> of the lowered program (relative)
  double gap = 0.0;                 // objective minus certified dual bound (relative)
  std::string worst_constraint;
};

/// Recomputes residuals from scratch. Throws CertificationError naming the
/// offending constraint if any residual exceeds ten times its tolerance, and
/// DomainError when `r` is not an optimal result.
KktReport check_kkt(const ConeProgram& p, const SolverResult& r, const SolverOptions& options = {});

// ---------------------------------------------------------------------------
// Text format (see docs/cone_program_format.md)

void write_text(std::ostream& os, const ConeProgram& p);
std::string to_text(const ConeProgram& p);
ConeProgram read_text(std::istream& is);

}  // namespace irsnoma::conic
