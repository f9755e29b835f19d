// Homogeneous self-dual interior-point method for the standard form in
// standard_form.hpp, run on its dual:
//
//   max  b'y   s.t.  S = C - sum_i y_i A_i  in K,   F'y = f.
//
// In the notation of a generic cone LP  min c'x  s.t.  Gx + s = h, Ax = b,
// s in K  this is x = y, c = -b_sf, G = A^*, h = C, A = F', b = f; its dual
// variables are z = X and the free part u of the standard form.
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "irsnoma/errors.hpp"
#include "standard_form.hpp"

namespace irsnoma::conic::detail {

namespace {

struct ConeVec {
  std::vector<Eigen::MatrixXd> blocks;
  Eigen::VectorXd lp;

  static ConeVec zeros(const StandardForm& sf) {
    ConeVec v;
    for (int n : sf.block_sizes) v.blocks.push_back(Eigen::MatrixXd::Zero(n, n));
    v.lp = Eigen::VectorXd::Zero(sf.n_lp);
    return v;
  }
  static ConeVec identity(const StandardForm& sf) {
    ConeVec v;
    for (int n : sf.block_sizes) v.blocks.push_back(Eigen::MatrixXd::Identity(n, n));
    v.lp = Eigen::VectorXd::Ones(sf.n_lp);
    return v;
  }

  ConeVec& axpy(double a, const ConeVec& x) {
    for (std::size_t b = 0; b < blocks.size(); ++b) blocks[b] += a * x.blocks[b];
    lp += a * x.lp;
    return *this;
  }
  ConeVec& scale(double a) {
    for (auto& m : blocks) m *= a;
    lp *= a;
    return *this;
  }
  double dot(const ConeVec& x) const {
    double s = lp.dot(x.lp);
    for (std::size_t b = 0; b < blocks.size(); ++b) s += blocks[b].cwiseProduct(x.blocks[b]).sum();
    return s;
  }
  double norm() const { return std::sqrt(dot(*this)); }
};

// Step to the boundary: the largest t with x + t e in the cone is found via
// minimal eigenvalues; returns -min eigenvalue over all components.
double boundary_shift(const ConeVec& x) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& m : x.blocks) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    worst = std::max(worst, -es.eigenvalues().minCoeff());
  }
  if (x.lp.size() > 0) worst = std::max(worst, -x.lp.minCoeff());
  return worst;
}

// Nesterov-Todd scaling at (s, z).
struct Scaling {
  std::vector<Eigen::MatrixXd> R, Rinv, P;
  std::vector<Eigen::VectorXd> lambda;
  Eigen::VectorXd d, lambda_lp;

  ConeVec W(const ConeVec& z) const {  // W z
    ConeVec out = z;
    for (std::size_t b = 0; b < R.size(); ++b) out.blocks[b] = R[b].transpose() * z.blocks[b] * R[b];
    out.lp = z.lp.cwiseProduct(d);
    return out;
  }
  ConeVec WinvT(const ConeVec& s) const {  // W^{-T} s
    ConeVec out = s;
    for (std::size_t b = 0; b < R.size(); ++b)
      out.blocks[b] = Rinv[b] * s.blocks[b] * Rinv[b].transpose();
    out.lp = s.lp.cwiseQuotient(d);
    return out;
  }
  ConeVec WT(const ConeVec& u) const {  // W^T u
    ConeVec out = u;
    for (std::size_t b = 0; b < R.size(); ++b) out.blocks[b] = R[b] * u.blocks[b] * R[b].transpose();
    out.lp = u.lp.cwiseProduct(d);
    return out;
  }
  ConeVec Pinv(const ConeVec& u) const {  // (W^T W)^{-1} u
    ConeVec out = u;
    for (std::size_t b = 0; b < P.size(); ++b) out.blocks[b] = P[b] * u.blocks[b] * P[b];
    out.lp = u.lp.cwiseQuotient(d.cwiseProduct(d));
    return out;
  }

  static Scaling identity(const StandardForm& sf) {
    Scaling w;
    for (int n : sf.block_sizes) {
      w.R.push_back(Eigen::MatrixXd::Identity(n, n));
      w.Rinv.push_back(Eigen::MatrixXd::Identity(n, n));
      w.P.push_back(Eigen::MatrixXd::Identity(n, n));
      w.lambda.push_back(Eigen::VectorXd::Ones(n));
    }
    w.d = Eigen::VectorXd::Ones(sf.n_lp);
    w.lambda_lp = Eigen::VectorXd::Ones(sf.n_lp);
    return w;
  }

  // False if s or z has left the interior numerically.
  bool compute(const ConeVec& s, const ConeVec& z) {
    const std::size_t nb = s.blocks.size();
    R.resize(nb);
    Rinv.resize(nb);
    P.resize(nb);
    lambda.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) {
      Eigen::LLT<Eigen::MatrixXd> ls(s.blocks[b]), lz(z.blocks[b]);
      if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
      const Eigen::MatrixXd Ls = ls.matrixL();
      const Eigen::MatrixXd Lz = lz.matrixL();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(Lz.transpose() * Ls,
                                            Eigen::ComputeFullU | Eigen::ComputeFullV);
      const Eigen::VectorXd sig = svd.singularValues();
      if (sig.minCoeff() <= 0.0 || !sig.allFinite()) return false;
      const Eigen::VectorXd isq = sig.cwiseSqrt().cwiseInverse();
      R[b] = Ls * svd.matrixV() * isq.asDiagonal();
      Rinv[b] = isq.asDiagonal() * svd.matrixU().transpose() * Lz.transpose();
      P[b] = Rinv[b].transpose() * Rinv[b];
      lambda[b] = sig;
    }
    if (s.lp.size() > 0 && (s.lp.minCoeff() <= 0.0 || z.lp.minCoeff() <= 0.0)) return false;
    d = s.lp.cwiseQuotient(z.lp).cwiseSqrt();
    lambda_lp = s.lp.cwiseProduct(z.lp).cwiseSqrt();
    return true;
  }

  // Moves to lambda + a * ds (scaled s) and lambda + a * dz (scaled z). Works in
  // the scaled space, where both iterates stay well conditioned.
  // Leaves the scaling untouched and returns false if the step leaves the cone.
  bool update(double a, const ConeVec& ds, const ConeVec& dz) {
    Scaling next = *this;
    if (!next.apply(a, ds, dz)) return false;
    *this = std::move(next);
    return true;
  }

  bool apply(double a, const ConeVec& ds, const ConeVec& dz) {
    for (std::size_t b = 0; b < R.size(); ++b) {
      Eigen::MatrixXd st = a * ds.blocks[b];
      Eigen::MatrixXd zt = a * dz.blocks[b];
      st.diagonal() += lambda[b];
      zt.diagonal() += lambda[b];
      Eigen::LLT<Eigen::MatrixXd> ls(0.5 * (st + st.transpose())), lz(0.5 * (zt + zt.transpose()));
      if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
      const Eigen::MatrixXd Ls = ls.matrixL();
      const Eigen::MatrixXd Lz = lz.matrixL();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(Lz.transpose() * Ls,
                                            Eigen::ComputeFullU | Eigen::ComputeFullV);
      const Eigen::VectorXd sig = svd.singularValues();
      if (sig.minCoeff() <= 0.0 || !sig.allFinite()) return false;
      const Eigen::VectorXd isq = sig.cwiseSqrt().cwiseInverse();
      R[b] = (R[b] * Ls * svd.matrixV() * isq.asDiagonal()).eval();
      Rinv[b] = (isq.asDiagonal() * svd.matrixU().transpose() * Lz.transpose() * Rinv[b]).eval();
      P[b] = Rinv[b].transpose() * Rinv[b];
      lambda[b] = sig;
    }
    const Eigen::VectorXd st = lambda_lp + a * ds.lp;
    const Eigen::VectorXd zt = lambda_lp + a * dz.lp;
    if (st.size() > 0 && (st.minCoeff() <= 0.0 || zt.minCoeff() <= 0.0)) return false;
    d = d.cwiseProduct(st.cwiseQuotient(zt).cwiseSqrt());
    lambda_lp = st.cwiseProduct(zt).cwiseSqrt();
    return true;
  }

  double gap() const {
    double g = lambda_lp.squaredNorm();
    for (const auto& l : lambda) g += l.squaredNorm();
    return g;
  }
};

// lambda \ u in the scaled space, where lambda is diagonal
ConeVec lambda_div(const Scaling& w, const ConeVec& u) {
  ConeVec out = u;
  for (std::size_t b = 0; b < w.lambda.size(); ++b) {
    const auto& l = w.lambda[b];
    for (Eigen::Index j = 0; j < l.size(); ++j)
      for (Eigen::Index i = 0; i < l.size(); ++i) out.blocks[b](i, j) /= 0.5 * (l(i) + l(j));
  }
  out.lp = u.lp.cwiseQuotient(w.lambda_lp);
  return out;
}

ConeVec circ(const ConeVec& a, const ConeVec& b) {  // a o b
  ConeVec out = a;
  for (std::size_t k = 0; k < a.blocks.size(); ++k) {
    const Eigen::MatrixXd ab = a.blocks[k] * b.blocks[k];
    out.blocks[k] = 0.5 * (ab + ab.transpose());
  }
  out.lp = a.lp.cwiseProduct(b.lp);
  return out;
}

ConeVec lambda_squared(const Scaling& w) {
  ConeVec out;
  for (const auto& l : w.lambda) out.blocks.push_back(l.cwiseAbs2().asDiagonal());
  out.lp = w.lambda_lp.cwiseAbs2();
  return out;
}

// Largest step t <= inf with lambda + t u in the cone (u in scaled space).
double max_step(const Scaling& w, const ConeVec& u) {
  double worst = 0.0;  // most negative relative eigenvalue, sign-flipped
  for (std::size_t b = 0; b < w.lambda.size(); ++b) {
    const Eigen::VectorXd isq = w.lambda[b].cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd m = isq.asDiagonal() * u.blocks[b] * isq.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    worst = std::max(worst, -es.eigenvalues().minCoeff());
  }
  for (Eigen::Index i = 0; i < u.lp.size(); ++i)
    worst = std::max(worst, -u.lp(i) / w.lambda_lp(i));
  return worst > 0.0 ? 1.0 / worst : std::numeric_limits<double>::infinity();
}

// Linear operators of the cone LP, built once from the standard form.
class Operators {
 public:
  explicit Operators(const StandardForm& sf) : sf_(sf) {
    const int m = sf.num_rows();
    lp_ = Eigen::MatrixXd::Zero(m, sf.n_lp);
    eq_ = Eigen::MatrixXd::Zero(sf.n_free, m);
    block_rows_.resize(sf.block_sizes.size());
    for (int i = 0; i < m; ++i) {
      const auto& row = sf.rows[static_cast<std::size_t>(i)];
      for (const auto& [j, a] : row.lp) lp_(i, j) += a;
      for (const auto& [j, a] : row.free) eq_(j, i) += a;
      for (std::size_t t = 0; t < row.blocks.size(); ++t)
        block_rows_[static_cast<std::size_t>(row.blocks[t].block)].emplace_back(i, t);
    }
  }

  int m() const { return sf_.num_rows(); }
  int p() const { return sf_.n_free; }
  const Eigen::MatrixXd& eq() const { return eq_; }

  // A' = Q1 R with [Q1 Q2] orthogonal; false if A lacks full row rank.
  bool factor_equalities() {
    if (p() == 0) return true;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(eq_.transpose());
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(m(), m());
    q1_ = Q.leftCols(p());
    q2_ = Q.rightCols(m() - p());
    r_ = qr.matrixQR().topRows(p()).triangularView<Eigen::Upper>();
    const double big = r_.diagonal().cwiseAbs().maxCoeff();
    return r_.diagonal().cwiseAbs().minCoeff() > 1e-12 * std::max(1.0, big);
  }
  const Eigen::MatrixXd& q1() const { return q1_; }
  const Eigen::MatrixXd& q2() const { return q2_; }
  const Eigen::MatrixXd& r() const { return r_; }

  ConeVec G(const Eigen::VectorXd& x) const {
    ConeVec out = ConeVec::zeros(sf_);
    for (int i = 0; i < m(); ++i)
      for (const auto& t : sf_.rows[static_cast<std::size_t>(i)].blocks)
        t.add_to(out.blocks[static_cast<std::size_t>(t.block)], x(i));
    out.lp = lp_.transpose() * x;
    return out;
  }

  Eigen::VectorXd GT(const ConeVec& z) const {
    Eigen::VectorXd out = lp_ * z.lp;
    for (int i = 0; i < m(); ++i)
      for (const auto& t : sf_.rows[static_cast<std::size_t>(i)].blocks)
        out(i) += t.inner(z.blocks[static_cast<std::size_t>(t.block)]);
    return out;
  }

  // H = G' (W'W)^{-1} G. Dense terms enter as the Gram matrix of the scaled
  // columns W^{-T} G_i, so that part stays numerically positive semidefinite;
  // sparse terms use tr(E_ab Q E_cd Q) = Q_bc Q_da with Q = Rinv' Rinv.
  Eigen::MatrixXd normal_matrix(const Scaling& w) const {
    const Eigen::MatrixXd lps = w.d.cwiseInverse().asDiagonal() * lp_.transpose();
    Eigen::MatrixXd H = lps.transpose() * lps;
    for (std::size_t b = 0; b < block_rows_.size(); ++b) {
      const auto& list = block_rows_[b];
      if (list.empty()) continue;
      const Eigen::MatrixXd& Ri = w.Rinv[b];
      const Eigen::Index n = Ri.rows();
      const Eigen::MatrixXd Q = Ri.transpose() * Ri;
      std::vector<std::size_t> dense, sparse;
      for (std::size_t a = 0; a < list.size(); ++a)
        (term(list[a]).dense ? dense : sparse).push_back(a);

      Eigen::MatrixXd cols(n * n, static_cast<Eigen::Index>(dense.size()));
      std::vector<Eigen::MatrixXd> T(dense.size());
      for (std::size_t a = 0; a < dense.size(); ++a) {
        Eigen::Map<Eigen::MatrixXd> S(cols.col(static_cast<Eigen::Index>(a)).data(), n, n);
        S.noalias() = Ri * term(list[dense[a]]).matrix * Ri.transpose();
        if (!sparse.empty()) T[a] = Ri.transpose() * S * Ri;
      }
      const Eigen::MatrixXd Hd = cols.transpose() * cols;
      for (std::size_t a = 0; a < dense.size(); ++a) {
        const int ia = list[dense[a]].first;
        for (std::size_t c = 0; c < dense.size(); ++c)
          H(ia, list[dense[c]].first) += Hd(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c));
        for (std::size_t j : sparse) {
          const double v = term(list[j]).inner(T[a]);
          H(ia, list[j].first) += v;
          H(list[j].first, ia) += v;
        }
      }
      for (std::size_t a : sparse) {
        const BlockTerm& A = term(list[a]);
        for (std::size_t c : sparse) {
          const BlockTerm& C = term(list[c]);
          double v = 0.0;
          for (std::size_t e = 0; e < A.vals.size(); ++e)
            for (std::size_t f = 0; f < C.vals.size(); ++f)
              v += A.vals[e] * C.vals[f] *
                   unit_pair(Q, A.rows[e], A.cols[e], C.rows[f], C.cols[f]);
          H(list[a].first, list[c].first) += v;
        }
      }
    }
    return H;
  }

 private:
  const BlockTerm& term(const std::pair<int, std::size_t>& at) const {
    return sf_.rows[static_cast<std::size_t>(at.first)].blocks[at.second];
  }

  // tr(A Q C Q) for A = E_rc + E_cr (or E_rr) and C likewise.
  static double unit_pair(const Eigen::MatrixXd& Q, int r, int c, int r2, int c2) {
    if (r == c && r2 == c2) return Q(r, r2) * Q(r2, r);
    if (r == c) return 2.0 * Q(r, r2) * Q(c2, r);
    if (r2 == c2) return 2.0 * Q(c, r2) * Q(r2, r);
    return 2.0 * (Q(c, r2) * Q(c2, r) + Q(c, c2) * Q(r2, r));
  }

  const StandardForm& sf_;
  Eigen::MatrixXd lp_;   // m x n_lp
  Eigen::MatrixXd eq_;   // n_free x m
  Eigen::MatrixXd q1_, q2_, r_;
  std::vector<std::vector<std::pair<int, std::size_t>>> block_rows_;
};

// Solves  [0 A' G'; A 0 0; G 0 -W'W] (x, y, z) = (bx, by, bz).
class KktSolver {
 public:
  KktSolver(const Operators& ops, const Scaling& w) : ops_(ops), w_(w) {
    H_ = ops.normal_matrix(w);
    // equality constraints are eliminated through the null space of A
    const Eigen::MatrixXd H2 = ops.p() > 0 ? Eigen::MatrixXd(ops.q2().transpose() * H_ * ops.q2()) : H_;
    const Eigen::Index n = H2.rows();
    double reg = 0.0;
    const double base = n > 0 ? std::max(1e-300, H2.diagonal().cwiseAbs().maxCoeff()) : 1.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
      Eigen::MatrixXd Hr = H2;
      Hr.diagonal().array() += reg;
      llt_.compute(Hr);
      if (llt_.info() == Eigen::Success && (n == 0 || llt_.matrixLLT().diagonal().minCoeff() > 0)) break;
      reg = reg == 0.0 ? 1e-13 * base : reg * 100.0;
    }
    ok_ = llt_.info() == Eigen::Success;
  }

  bool ok() const { return ok_; }

  // Reduced solve followed by iterative refinement on the full system.
  void solve(const Eigen::VectorXd& bx, const Eigen::VectorXd& by, const ConeVec& bz,
             Eigen::VectorXd& x, Eigen::VectorXd& y, ConeVec& z) const {
    reduced_solve(bx, by, bz, x, y, z);
    for (int round = 0; round < 2; ++round) {
      Eigen::VectorXd rx = bx - ops_.GT(z);
      Eigen::VectorXd ry = by;
      if (ops_.p() > 0) {
        rx -= ops_.eq().transpose() * y;
        ry -= ops_.eq() * x;
      }
      ConeVec rz = bz;
      rz.axpy(-1.0, ops_.G(x));
      rz.axpy(1.0, w_.WT(w_.W(z)));
      Eigen::VectorXd dx, dy;
      ConeVec dz;
      reduced_solve(rx, ry, rz, dx, dy, dz);
      x += dx;
      if (ops_.p() > 0) y += dy;
      z.axpy(1.0, dz);
    }
  }

 private:
  void reduced_solve(const Eigen::VectorXd& bx, const Eigen::VectorXd& by, const ConeVec& bz,
                     Eigen::VectorXd& x, Eigen::VectorXd& y, ConeVec& z) const {
    const Eigen::VectorXd r1 = bx + ops_.GT(w_.Pinv(bz));
    if (ops_.p() == 0) {
      x = llt_.solve(r1);
      y = Eigen::VectorXd();
    } else {
      const Eigen::MatrixXd& R = ops_.r();
      x = ops_.q1() * R.transpose().triangularView<Eigen::Lower>().solve(by);
      x += ops_.q2() * llt_.solve(ops_.q2().transpose() * (r1 - H_ * x));
      y = R.triangularView<Eigen::Upper>().solve(ops_.q1().transpose() * (r1 - H_ * x));
    }
    z = ops_.G(x);
    z.axpy(-1.0, bz);
    z = w_.Pinv(z);
  }

  const Operators& ops_;
  const Scaling& w_;
  Eigen::MatrixXd H_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  bool ok_ = false;
};

}  // namespace

IpmResult solve_standard_form(const StandardForm& sf, const SolverOptions& options) {
  Operators ops(sf);
  const int m = ops.m();
  const int p = ops.p();
  const double nu = sf.degree();
  IpmResult out;
  if (!ops.factor_equalities()) {
    out.diagnostics = "free variables are linearly dependent";
    return out;
  }

  // cone-LP data
  Eigen::VectorXd c(m);
  for (int i = 0; i < m; ++i) c(i) = -sf.rows[static_cast<std::size_t>(i)].rhs;
  const Eigen::VectorXd& b = sf.cost_free;
  ConeVec h;
  h.blocks = sf.cost_blocks;
  h.lp = sf.cost_lp;

  const double resx0 = std::max(1.0, c.norm());
  const double resy0 = std::max(1.0, b.norm());
  const double resz0 = std::max(1.0, h.norm());

  std::ostringstream diag;

  Eigen::VectorXd x, y;
  ConeVec z, s;
  {
    const Scaling w0 = Scaling::identity(sf);
    KktSolver kkt(ops, w0);
    if (!kkt.ok()) {
      out.diagnostics = "initial KKT factorization failed";
      return out;
    }
    Eigen::VectorXd yd;
    ConeVec zd;
    kkt.solve(Eigen::VectorXd::Zero(m), b, h, x, yd, zd);
    s = zd;
    s.scale(-1.0);
    Eigen::VectorXd xx;
    kkt.solve(-c, Eigen::VectorXd::Zero(p), ConeVec::zeros(sf), xx, y, z);
    const ConeVec e = ConeVec::identity(sf);
    const double ts = boundary_shift(s);
    const double nrms = s.norm();
    if (ts >= -1e-8 * std::max(nrms, 1.0)) s.axpy(1.0 + ts, e);
    const double tz = boundary_shift(z);
    const double nrmz = z.norm();
    if (tz >= -1e-8 * std::max(nrmz, 1.0)) z.axpy(1.0 + tz, e);
  }
  double tau = 1.0, kappa = 1.0;

  // Last iterate meeting ten times the tolerances, the level check_kkt
  // certifies at. Returned if the iteration later breaks down.
  struct Snapshot {
    Eigen::VectorXd x, y;
    ConeVec z, s;
    double tau = 0.0, kappa = 0.0, pres = 0.0, dres = 0.0, gap = 0.0;
    int iter = 0;
  };
  std::optional<Snapshot> fallback;

  Scaling w;
  for (int iter = 0; iter <= options.max_iters; ++iter) {
    const Eigen::VectorXd hrx = ops.GT(z) + (p > 0 ? Eigen::VectorXd(ops.eq().transpose() * y)
                                                   : Eigen::VectorXd::Zero(m));
    const Eigen::VectorXd hry = p > 0 ? Eigen::VectorXd(ops.eq() * x) : Eigen::VectorXd();
    ConeVec hrz = ops.G(x);
    hrz.axpy(1.0, s);

    const double cx = c.dot(x);
    const double by = p > 0 ? b.dot(y) : 0.0;
    const double hz = h.dot(z);
    const double gap = s.dot(z);
    const double mu = (gap + tau * kappa) / (nu + 1.0);

    const Eigen::VectorXd rx = hrx + tau * c;
    const Eigen::VectorXd ry = p > 0 ? Eigen::VectorXd(hry - tau * b) : Eigen::VectorXd();
    ConeVec rz = hrz;
    rz.axpy(-tau, h);
    const double rt = kappa + cx + by + hz;

    const double pres = std::max(p > 0 ? ry.norm() / resy0 : 0.0, rz.norm() / resz0) / tau;
    const double dres = rx.norm() / resx0 / tau;
    const double sf_primal = (hz + by) / tau;  // <C,X> + f'u
    const double sf_dual = -cx / tau;          // b'y
    const double rel_gap = gap / (tau * tau) / std::max(1.0, std::abs(sf_primal));

    out.iterations = iter;
    const bool gap_ok = rel_gap <= options.gap_tol &&
                        std::abs(sf_primal - sf_dual) <= options.gap_tol * std::max(1.0, std::abs(sf_primal));
    if (pres <= options.feas_tol && dres <= options.feas_tol && gap_ok) {
      out.status = SolveStatus::Optimal;
      break;
    }
    // The slack equation can stall at rounding level when the iterates are
    // much larger than the cost. Then certify with the exact slack
    // tau h - G x instead: it satisfies the equation by construction and only
    // its cone membership needs checking.
    if (dres <= options.feas_tol && gap_ok && (p == 0 || ry.norm() / resy0 / tau <= options.feas_tol)) {
      ConeVec exact = h;
      exact.scale(tau);
      exact.axpy(-1.0, ops.G(x));
      if (std::max(0.0, boundary_shift(exact)) / resz0 / tau <= options.feas_tol) {
        out.status = SolveStatus::Optimal;
        s = exact;
        break;
      }
    }
    const double loose = 10.0 * options.gap_tol;
    if (pres <= 10.0 * options.feas_tol && dres <= 10.0 * options.feas_tol && rel_gap <= loose &&
        std::abs(sf_primal - sf_dual) <= loose * std::max(1.0, std::abs(sf_primal)))
      fallback = Snapshot{x, y, z, s, tau, kappa, pres, dres, rel_gap, iter};
    if (cx < 0.0) {
      const double dinf =
          std::max(p > 0 ? hry.norm() / resy0 : 0.0, hrz.norm() / resz0) / (-cx);
      if (dinf <= options.feas_tol) {
        out.status = SolveStatus::Infeasible;
        diag << "primal infeasibility certificate, residual " << dinf;
        break;
      }
    }
    if (hz + by < 0.0) {
      const double pinf = hrx.norm() / resx0 / (-(hz + by));
      if (pinf <= options.feas_tol) {
        out.status = SolveStatus::Unbounded;
        diag << "dual infeasibility certificate, residual " << pinf;
        break;
      }
    }
    if (iter == options.max_iters) {
      diag << "iteration cap " << options.max_iters << " reached: pres " << pres << ", dres "
           << dres << ", gap " << rel_gap;
      break;
    }

    if (iter == 0 && !w.compute(s, z)) {
      diag << "starting point is not interior";
      break;
    }
    KktSolver kkt(ops, w);
    if (!kkt.ok()) {
      diag << "KKT factorization failed at iteration " << iter;
      break;
    }
    Eigen::VectorXd x1, y1;
    ConeVec z1;
    {
      ConeVec hh = h;
      kkt.solve(-c, b, hh, x1, y1, z1);
    }
    const double denom_base = -kappa / tau + c.dot(x1) + (p > 0 ? b.dot(y1) : 0.0) + h.dot(z1);

    const ConeVec lsq = lambda_squared(w);
    ConeVec sa_scaled, za_scaled;
    double dtau_a = 0.0, dkappa_a = 0.0, sigma = 0.0;
    bool failed = false, lost = false;

    for (int pass = 0; pass < 2; ++pass) {
      const double eta = pass == 0 ? 0.0 : sigma;
      ConeVec ds_rhs = lsq;
      ds_rhs.scale(-1.0);
      double dk_rhs = -tau * kappa;
      if (pass == 1) {
        ds_rhs.axpy(-1.0, circ(sa_scaled, za_scaled));
        ds_rhs.axpy(sigma * mu, ConeVec::identity(sf));
        dk_rhs += -dtau_a * dkappa_a + sigma * mu;
      }
      const ConeVec ld = lambda_div(w, ds_rhs);
      const Eigen::VectorXd bx = -(1.0 - eta) * rx;
      const Eigen::VectorXd byv = p > 0 ? Eigen::VectorXd(-(1.0 - eta) * ry) : Eigen::VectorXd();
      ConeVec bz = rz;
      bz.scale(-(1.0 - eta));
      bz.axpy(-1.0, w.WT(ld));

      Eigen::VectorXd x0, y0;
      ConeVec z0;
      kkt.solve(bx, byv, bz, x0, y0, z0);
      const double dtau = (-(1.0 - eta) * rt - dk_rhs / tau - c.dot(x0) -
                           (p > 0 ? b.dot(y0) : 0.0) - h.dot(z0)) /
                          denom_base;
      const Eigen::VectorXd dx = x0 + dtau * x1;
      const Eigen::VectorXd dy = p > 0 ? Eigen::VectorXd(y0 + dtau * y1) : Eigen::VectorXd();
      ConeVec dz = z0;
      dz.axpy(dtau, z1);
      const double dkappa = (dk_rhs - kappa * dtau) / tau;

      const ConeVec z_scaled = w.W(dz);
      ConeVec s_scaled = ld;
      s_scaled.axpy(-1.0, z_scaled);

      double amax = std::min(max_step(w, s_scaled), max_step(w, z_scaled));
      if (dtau < 0.0) amax = std::min(amax, -tau / dtau);
      if (dkappa < 0.0) amax = std::min(amax, -kappa / dkappa);
      if (!std::isfinite(dtau) || !dx.allFinite()) {
        failed = true;
        break;
      }

      if (pass == 0) {
        const double step = std::min(1.0, amax);
        sigma = std::pow(1.0 - step, 3);
        sa_scaled = s_scaled;
        za_scaled = z_scaled;
        dtau_a = dtau;
        dkappa_a = dkappa;
        continue;
      }

      const ConeVec ds = w.WT(s_scaled);
      const double step = std::min(1.0, 0.99 * amax);
      if (!w.update(step, s_scaled, z_scaled)) {
        lost = true;
        break;
      }
      x += step * dx;
      if (p > 0) y += step * dy;
      tau += step * dtau;
      kappa += step * dkappa;
      s.axpy(step, ds);
      z.axpy(step, dz);
    }
    if (failed) {
      diag << "non-finite search direction at iteration " << iter;
      break;
    }
    if (lost) {
      diag << "iterate left the cone interior at iteration " << iter;
      break;
    }
  }
  if (out.status == SolveStatus::NumericalFailure && fallback) {
    diag << "; returning reduced-accuracy iterate " << fallback->iter << " (pres "
         << fallback->pres << ", dres " << fallback->dres << ", gap " << fallback->gap << ")";
    x = std::move(fallback->x);
    y = std::move(fallback->y);
    z = std::move(fallback->z);
    s = std::move(fallback->s);
    tau = fallback->tau;
    kappa = fallback->kappa;
    out.iterations = fallback->iter;
    out.status = SolveStatus::Optimal;
  }

  out.primal.blocks = z.blocks;
  for (auto& mtx : out.primal.blocks) mtx /= tau;
  out.primal.lp = z.lp / tau;
  out.primal.free = p > 0 ? Eigen::VectorXd(y / tau) : Eigen::VectorXd();
  out.dual = x / tau;
  out.slack_blocks = s.blocks;
  for (auto& mtx : out.slack_blocks) mtx /= tau;
  out.slack_lp = s.lp / tau;
  out.primal_objective = (h.dot(z) + (p > 0 ? b.dot(y) : 0.0)) / tau + sf.cost_offset;
  out.dual_objective = -c.dot(x) / tau + sf.cost_offset;
  if (out.status == SolveStatus::Infeasible) {
    // Farkas ray, normalized
    out.dual = x / std::max(1e-300, -c.dot(x));
  }
  out.diagnostics = diag.str();
  return out;
}

}  // namespace irsnoma::conic::detail
