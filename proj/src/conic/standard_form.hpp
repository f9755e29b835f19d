#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "irsnoma/conic.hpp"

namespace irsnoma::conic::detail {

/// Symmetric matrix term of one equality row on one PSD block. Sparse terms
/// list each unordered pair once; an off-diagonal entry v stands for
/// A(r, c) = A(c, r) = v.
struct BlockTerm {
  int block = 0;
  bool dense = false;
  Eigen::MatrixXd matrix;
  std::vector<int> rows, cols;
  std::vector<double> vals;

  double inner(const Eigen::MatrixXd& x) const;
  void add_to(Eigen::MatrixXd& x, double scale) const;
};

/// Standard form
///   min  sum_b <C_b, X_b> + c_lp' x + f' u + offset
///   s.t. sum_b <A_ib, X_b> + a_i' x + F_i' u = b_i,  X_b psd, x >= 0, u free.
struct StandardForm {
  std::vector<int> block_sizes;
  int n_lp = 0;
  int n_free = 0;

  std::vector<Eigen::MatrixXd> cost_blocks;
  Eigen::VectorXd cost_lp;
  Eigen::VectorXd cost_free;
  double cost_offset = 0.0;

  struct Row {
    std::vector<BlockTerm> blocks;
    std::vector<std::pair<int, double>> lp;
    std::vector<std::pair<int, double>> free;
    double rhs = 0.0;
    std::string label;
  };
  std::vector<Row> rows;

  int num_rows() const { return static_cast<int>(rows.size()); }
  int degree() const;
};

/// How a program scalar is recovered from standard-form variables:
/// value = offset + sign * var(kind, index).
struct ScalarMap {
  enum Kind { Lp, Free };
  Kind kind = Free;
  int index = 0;
  double offset = 0.0;
  double sign = 1.0;
};

/// Where each piece of a lowered (real, quadratic-free) program lives.
struct Lowering {
  StandardForm sf;
  std::vector<ScalarMap> scalars;
  std::vector<int> matrix_block;      // block index of each matrix variable
  std::vector<int> lin_slack;         // lp slack per linear constraint, -1 for equalities
  std::vector<double> lin_slack_sign;
  std::vector<int> upper_slack;       // lp slack for scalars with two bounds, -1 otherwise
  std::vector<int> lmi_block;         // block index of each LMI
};

/// Requires a real program without quadratic constraints.
Lowering lower(const ConeProgram& p);

/// Standard-form primal point induced by a program point.
struct SfPoint {
  std::vector<Eigen::MatrixXd> blocks;
  Eigen::VectorXd lp;
  Eigen::VectorXd free;
};
SfPoint lift(const ConeProgram& p, const Lowering& low, const PrimalPoint& point);

struct IpmResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  SfPoint primal;
  Eigen::VectorXd dual;                 // one multiplier per row
  std::vector<Eigen::MatrixXd> slack_blocks;
  Eigen::VectorXd slack_lp;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  int iterations = 0;
  std::string diagnostics;
};

IpmResult solve_standard_form(const StandardForm& sf, const SolverOptions& options);

/// Dual slack C - A^*(y) for given multipliers.
void dual_slack(const StandardForm& sf, const Eigen::VectorXd& y,
                std::vector<Eigen::MatrixXd>& blocks, Eigen::VectorXd& lp, Eigen::VectorXd& free);

}  // namespace irsnoma::conic::detail
