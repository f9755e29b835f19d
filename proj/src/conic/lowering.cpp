#include <cmath>

#include "irsnoma/errors.hpp"
#include "standard_form.hpp"

namespace irsnoma::conic::detail {

double BlockTerm::inner(const Eigen::MatrixXd& x) const {
  if (dense) return matrix.cwiseProduct(x).sum();
  double s = 0.0;
  for (std::size_t t = 0; t < vals.size(); ++t)
    s += (rows[t] == cols[t] ? 1.0 : 2.0) * vals[t] * x(rows[t], cols[t]);
  return s;
}

void BlockTerm::add_to(Eigen::MatrixXd& x, double scale) const {
  if (dense) {
    x += scale * matrix;
    return;
  }
  for (std::size_t t = 0; t < vals.size(); ++t) {
    x(rows[t], cols[t]) += scale * vals[t];
    if (rows[t] != cols[t]) x(cols[t], rows[t]) += scale * vals[t];
  }
}

int StandardForm::degree() const {
  int d = n_lp;
  for (int n : block_sizes) d += n;
  return d;
}

namespace {

BlockTerm make_term(int block, const Eigen::MatrixXd& c) {
  BlockTerm t;
  t.block = block;
  const Eigen::Index n = c.rows();
  Eigen::Index nnz = 0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i <= j; ++i)
      if (c(i, j) != 0.0) ++nnz;
  if (nnz > n) {
    t.dense = true;
    t.matrix = 0.5 * (c + c.transpose());
    return t;
  }
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i <= j; ++i)
      if (c(i, j) != 0.0) {
        t.rows.push_back(static_cast<int>(i));
        t.cols.push_back(static_cast<int>(j));
        t.vals.push_back(i == j ? c(i, j) : 0.5 * (c(i, j) + c(j, i)));
      }
  return t;
}

BlockTerm unit_term(int block, int r, int c, double v) {
  BlockTerm t;
  t.block = block;
  t.rows.push_back(std::min(r, c));
  t.cols.push_back(std::max(r, c));
  t.vals.push_back(v);
  return t;
}

void merge_sparse(std::vector<std::pair<int, double>>& terms, int idx, double v) {
  for (auto& [i, a] : terms)
    if (i == idx) {
      a += v;
      return;
    }
  terms.emplace_back(idx, v);
}

class Builder {
 public:
  explicit Builder(Lowering& low) : low_(low) {}

  // Adds the affine expression to `row`, moving its constant into the rhs.
  void add_expr(StandardForm::Row& row, const AffineExpr& e, double scale) {
    row.rhs -= scale * e.constant;
    for (const auto& [j, a] : e.scalar_terms) {
      const ScalarMap& m = low_.scalars[static_cast<std::size_t>(j)];
      row.rhs -= scale * a * m.offset;
      if (m.kind == ScalarMap::Lp)
        merge_sparse(row.lp, m.index, scale * a * m.sign);
      else
        merge_sparse(row.free, m.index, scale * a * m.sign);
    }
    for (const auto& [j, c] : e.trace_terms) {
      const int block = low_.matrix_block[static_cast<std::size_t>(j)];
      row.blocks.push_back(make_term(block, scale * c.real()));
    }
  }

 private:
  Lowering& low_;
};

}  // namespace

Lowering lower(const ConeProgram& p) {
  if (p.has_complex_blocks()) throw ModelingError("lower() needs a realified program");
  if (!p.quad_cons.empty()) throw ModelingError("lower() needs quadratics embedded first");

  Lowering low;
  StandardForm& sf = low.sf;
  Builder builder(low);

  for (const auto& m : p.matrix_vars) {
    low.matrix_block.push_back(static_cast<int>(sf.block_sizes.size()));
    sf.block_sizes.push_back(m.size);
  }

  low.upper_slack.assign(p.scalar_vars.size(), -1);
  for (std::size_t j = 0; j < p.scalar_vars.size(); ++j) {
    const auto& s = p.scalar_vars[j];
    ScalarMap m;
    if (s.lower) {
      m = {ScalarMap::Lp, sf.n_lp++, *s.lower, 1.0};
      if (s.upper) low.upper_slack[j] = sf.n_lp++;
    } else if (s.upper) {
      m = {ScalarMap::Lp, sf.n_lp++, *s.upper, -1.0};
    } else {
      m = {ScalarMap::Free, sf.n_free++, 0.0, 1.0};
    }
    low.scalars.push_back(m);
  }

  for (std::size_t j = 0; j < p.scalar_vars.size(); ++j) {
    if (low.upper_slack[j] < 0) continue;
    const auto& s = p.scalar_vars[j];
    StandardForm::Row row;
    row.label = "bounds of " + s.name;
    row.lp = {{low.scalars[j].index, 1.0}, {low.upper_slack[j], 1.0}};
    row.rhs = *s.upper - *s.lower;
    sf.rows.push_back(std::move(row));
  }

  for (const auto& c : p.lin_cons) {
    StandardForm::Row row;
    row.label = c.label;
    builder.add_expr(row, c.expr, 1.0);
    if (c.sense == Sense::Equal) {
      low.lin_slack.push_back(-1);
      low.lin_slack_sign.push_back(0.0);
    } else {
      // expr >= 0  <=>  expr - s = 0;  expr <= 0  <=>  expr + s = 0
      const double sign = c.sense == Sense::GreaterEqual ? -1.0 : 1.0;
      low.lin_slack.push_back(sf.n_lp);
      low.lin_slack_sign.push_back(sign);
      row.lp.emplace_back(sf.n_lp++, sign);
    }
    sf.rows.push_back(std::move(row));
  }

  for (const auto& d : p.diag_cons) {
    StandardForm::Row row;
    row.label = d.label;
    row.blocks.push_back(unit_term(low.matrix_block[static_cast<std::size_t>(d.var)], d.index,
                                   d.index, 1.0));
    row.rhs = d.value;
    sf.rows.push_back(std::move(row));
  }

  for (const auto& l : p.psd_cons) {
    const int block = static_cast<int>(sf.block_sizes.size());
    low.lmi_block.push_back(block);
    sf.block_sizes.push_back(l.size);
    for (int r = 0; r < l.size; ++r)
      for (int c = r; c < l.size; ++c) {
        // Y(r, c) - E(r, c) = 0
        StandardForm::Row row;
        row.label = l.label;
        builder.add_expr(row, l.at(r, c), -1.0);
        row.blocks.push_back(unit_term(block, r, c, r == c ? 1.0 : 0.5));
        sf.rows.push_back(std::move(row));
      }
  }

  sf.cost_blocks.clear();
  for (int n : sf.block_sizes) sf.cost_blocks.push_back(Eigen::MatrixXd::Zero(n, n));
  sf.cost_lp = Eigen::VectorXd::Zero(sf.n_lp);
  sf.cost_free = Eigen::VectorXd::Zero(sf.n_free);
  sf.cost_offset = p.objective.constant;
  for (const auto& [j, a] : p.objective.scalar_terms) {
    const ScalarMap& m = low.scalars[static_cast<std::size_t>(j)];
    sf.cost_offset += a * m.offset;
    if (m.kind == ScalarMap::Lp)
      sf.cost_lp(m.index) += a * m.sign;
    else
      sf.cost_free(m.index) += a * m.sign;
  }
  for (const auto& [j, c] : p.objective.trace_terms) {
    const Eigen::MatrixXd cr = c.real();
    sf.cost_blocks[static_cast<std::size_t>(low.matrix_block[static_cast<std::size_t>(j)])] +=
        0.5 * (cr + cr.transpose());
  }
  return low;
}

SfPoint lift(const ConeProgram& p, const Lowering& low, const PrimalPoint& point) {
  const StandardForm& sf = low.sf;
  SfPoint x;
  x.lp = Eigen::VectorXd::Zero(sf.n_lp);
  x.free = Eigen::VectorXd::Zero(sf.n_free);
  for (int n : sf.block_sizes) x.blocks.push_back(Eigen::MatrixXd::Zero(n, n));

  for (std::size_t j = 0; j < p.matrix_vars.size(); ++j) {
    const Eigen::MatrixXcd& m = point.matrices.at(j);
    const Eigen::MatrixXd r = m.real();
    x.blocks[static_cast<std::size_t>(low.matrix_block[j])] = 0.5 * (r + r.transpose());
  }
  for (std::size_t j = 0; j < p.scalar_vars.size(); ++j) {
    const ScalarMap& m = low.scalars[j];
    const double v = (point.scalars.at(j) - m.offset) * m.sign;
    if (m.kind == ScalarMap::Lp)
      x.lp(m.index) = v;
    else
      x.free(m.index) = v;
    if (low.upper_slack[j] >= 0)
      x.lp(low.upper_slack[j]) = *p.scalar_vars[j].upper - point.scalars.at(j);
  }
  for (std::size_t i = 0; i < p.lin_cons.size(); ++i)
    if (low.lin_slack[i] >= 0)
      x.lp(low.lin_slack[i]) = -low.lin_slack_sign[i] * evaluate(p.lin_cons[i].expr, point);
  for (std::size_t i = 0; i < p.psd_cons.size(); ++i) {
    const auto& l = p.psd_cons[i];
    Eigen::MatrixXd& y = x.blocks[static_cast<std::size_t>(low.lmi_block[i])];
    for (int r = 0; r < l.size; ++r)
      for (int c = r; c < l.size; ++c) y(r, c) = y(c, r) = evaluate(l.at(r, c), point);
  }
  return x;
}

void dual_slack(const StandardForm& sf, const Eigen::VectorXd& y,
                std::vector<Eigen::MatrixXd>& blocks, Eigen::VectorXd& lp, Eigen::VectorXd& free) {
  blocks = sf.cost_blocks;
  lp = sf.cost_lp;
  free = sf.cost_free;
  for (int i = 0; i < sf.num_rows(); ++i) {
    const auto& row = sf.rows[static_cast<std::size_t>(i)];
    for (const auto& t : row.blocks) t.add_to(blocks[static_cast<std::size_t>(t.block)], -y(i));
    for (const auto& [j, a] : row.lp) lp(j) -= a * y(i);
    for (const auto& [j, a] : row.free) free(j) -= a * y(i);
  }
}

}  // namespace irsnoma::conic::detail
