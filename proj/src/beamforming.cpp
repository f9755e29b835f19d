#include "irsnoma/beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "irsnoma/errors.hpp"

namespace irsnoma {

using conic::AffineExpr;
using conic::ConeProgram;
using conic::QuadraticConstraint;
using conic::Sense;

namespace {

constexpr double kFixedPointFloor = 1e-6;

AffineExpr tr(int k, const cmat& a) { return AffineExpr::trace(k, a); }
AffineExpr var(int j) { return AffineExpr::scalar(j); }

// sum_{i != k} Tr(A W_i)
AffineExpr interference(int K, int k, const cmat& a) {
  AffineExpr sum;
  for (int i = 0; i < K; ++i)
    if (i != k) sum += tr(i, a);
  return sum;
}

void check_inputs(const ChannelSet& ch, std::span<const cvec> e, const SystemConfig& config) {
  ch.validate(config);
  if (static_cast<int>(e.size()) != config.clusters)
    throw ModelingError("need one phase vector per cluster");
}

void check_fixed_points(const FixedPoints& fp, int K) {
  if (fp.clusters() != K || static_cast<int>(fp.d.size()) != K ||
      static_cast<int>(fp.t0.size()) != K)
    throw ModelingError("fixed points do not have one entry per cluster");
  for (int k = 0; k < K; ++k)
    if (!(fp.c[k] > 0.0) || !(fp.d[k] > 0.0) || !std::isfinite(fp.t0[k]))
      throw DomainError("fixed points c and d must be positive and t0 finite");
}

// Shared body of P2 and P3; q < 0 means no relaxation slack.
ConeProgram build_sca_program(const ChannelSet& ch, std::span<const cvec> e, const FixedPoints& fp,
                              const SystemConfig& config, bool relaxed) {
  check_inputs(ch, e, config);
  const int K = config.clusters;
  const int M = config.bs_antennas;
  check_fixed_points(fp, K);
  const NormalizedGains g = normalized_gains(ch, e);

  ConeProgram p;
  for (int k = 0; k < K; ++k) p.add_matrix("W" + std::to_string(k), M);
  for (int k = 0; k < K; ++k) p.add_scalar("alpha" + std::to_string(k), 0.0, 1.0);
  for (int k = 0; k < K; ++k) p.add_scalar("t" + std::to_string(k));
  int q = -1;
  if (relaxed) q = p.add_scalar("q", 0.0);
  const AffineExpr slack = relaxed ? var(q) : AffineExpr(0.0);

  const cmat eye = cmat::Identity(M, M);
  AffineExpr power;
  for (int k = 0; k < K; ++k) power += tr(k, eye);

  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const std::string sk = std::to_string(k);
    const double re = sinr_threshold(config.rate_edge[ku]);
    const double rc = sinr_threshold(config.rate_center[ku]);
    const AffineExpr alpha = var(alpha_var(k));

    // (alpha c)^2 + (T / c)^2 <= 2T/(1+r) - 2(I + 1) r/(1+r) [+ q]
    auto am_gm = [&](const cmat& gain, double fixed, const std::string& label) {
      const AffineExpr own = tr(k, gain);
      QuadraticConstraint qc;
      qc.terms = {fixed * alpha, (1.0 / fixed) * own};
      qc.bound = (2.0 / (1.0 + re)) * own -
                 (2.0 * re / (1.0 + re)) * (interference(K, k, gain) + 1.0) + slack;
      qc.label = label + sk;
      p.add_quadratic(std::move(qc));
    };
    am_gm(g.Z_e[ku], fp.c[ku], "edge_sinr_");
    am_gm(g.H_c[ku], fp.d[ku], "sic_sinr_");

    p.add_lmi2(alpha, var(t_var(K, k)), tr(k, g.H_c[ku]), "schur_" + sk);

    const double t0 = fp.t0[ku];
    const AffineExpr taylor = t0 * t0 + 2.0 * t0 * (var(t_var(K, k)) - t0);
    p.add_linear(taylor - rc * (interference(K, k, g.H_c[ku]) + 1.0) + slack, Sense::GreaterEqual,
                 "center_sinr_" + sk);
  }
  p.objective = relaxed ? var(q) + 1e-6 * power : power;
  return p;
}

}  // namespace

NormalizedGains normalized_gains(const ChannelSet& ch, std::span<const cvec> e) {
  NormalizedGains g;
  const double s2 = ch.noise_power;
  for (int k = 0; k < ch.clusters(); ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const cvec& h = ch.h_center[ku];
    const cvec z = effective_edge_channel(ch, e[ku], k);
    g.H_c.push_back(h * h.adjoint() / s2);
    g.Z_e.push_back(z * z.adjoint() / s2);
  }
  return g;
}

ConeProgram build_p2(const ChannelSet& ch, std::span<const cvec> e, const FixedPoints& fp,
                     const SystemConfig& config) {
  return build_sca_program(ch, e, fp, config, false);
}

ConeProgram build_p3(const ChannelSet& ch, std::span<const cvec> e, const FixedPoints& fp,
                     const SystemConfig& config) {
  return build_sca_program(ch, e, fp, config, true);
}

ConeProgram build_fixed_alpha_sdr(const ChannelSet& ch, std::span<const cvec> e,
                                  std::span<const double> alpha, const SystemConfig& config) {
  check_inputs(ch, e, config);
  const int K = config.clusters;
  const int M = config.bs_antennas;
  if (static_cast<int>(alpha.size()) != K)
    throw ModelingError("need one power coefficient per cluster");
  for (double a : alpha)
    if (!(a > 0.0 && a < 1.0)) throw DomainError("power coefficients must lie in (0, 1)");
  const NormalizedGains g = normalized_gains(ch, e);

  ConeProgram p;
  for (int k = 0; k < K; ++k) p.add_matrix("W" + std::to_string(k), M);
  const cmat eye = cmat::Identity(M, M);
  for (int k = 0; k < K; ++k) p.objective += tr(k, eye);

  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const std::string sk = std::to_string(k);
    const double re = sinr_threshold(config.rate_edge[ku]);
    const double rc = sinr_threshold(config.rate_center[ku]);
    const double a = alpha[ku];
    p.add_linear(a * tr(k, g.H_c[ku]) - rc * (interference(K, k, g.H_c[ku]) + 1.0),
                 Sense::GreaterEqual, "center_sinr_" + sk);
    auto edge = [&](const cmat& gain, const std::string& label) {
      p.add_linear((1.0 / (1.0 + re) - a) * tr(k, gain) -
                       (re / (1.0 + re)) * (interference(K, k, gain) + 1.0),
                   Sense::GreaterEqual, label + sk);
    };
    edge(g.Z_e[ku], "edge_sinr_");
    edge(g.H_c[ku], "sic_sinr_");
  }
  return p;
}

BeamformingSolution read_beamforming(const conic::SolverResult& r, const SystemConfig& config,
                                     std::span<const double> fixed_alpha) {
  const int K = config.clusters;
  BeamformingSolution bs;
  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    cmat W = r.matrix(k);
    W = 0.5 * (W + W.adjoint()).eval();
    bs.objective += W.trace().real();
    bs.W.push_back(std::move(W));
    if (fixed_alpha.empty()) {
      bs.alpha.push_back(std::clamp(r.scalar(alpha_var(k)), 0.0, 1.0));
      bs.t.push_back(r.scalar(t_var(K, k)));
    } else {
      bs.alpha.push_back(fixed_alpha[ku]);
    }
    bs.r_c.push_back(sinr_threshold(config.rate_center[ku]));
    bs.r_e.push_back(sinr_threshold(config.rate_edge[ku]));
  }
  return bs;
}

FixedPoints update_fixed_points(const BeamformingSolution& prev, const ChannelSet& ch,
                                std::span<const cvec> e, bool* degenerate) {
  const NormalizedGains g = normalized_gains(ch, e);
  const int K = ch.clusters();
  if (static_cast<int>(prev.W.size()) != K || static_cast<int>(prev.alpha.size()) != K ||
      static_cast<int>(prev.t.size()) != K)
    throw ModelingError("beamforming solution does not match the channel set");
  FixedPoints fp;
  bool clamped = false;
  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    double a = prev.alpha[ku];
    if (a < kAlphaFloor) {
      a = kAlphaFloor;
      clamped = true;
    }
    const double te = std::max(0.0, (g.Z_e[ku] * prev.W[ku]).trace().real());
    const double tc = std::max(0.0, (g.H_c[ku] * prev.W[ku]).trace().real());
    fp.c.push_back(std::max(kFixedPointFloor, am_gm_fixed_point(a, te)));
    fp.d.push_back(std::max(kFixedPointFloor, am_gm_fixed_point(a, tc)));
    fp.t0.push_back(prev.t[ku]);
  }
  if (degenerate) *degenerate = clamped;
  return fp;
}

FixedPoints fixed_points_from_beamformers(const ChannelSet& ch, std::span<const cvec> e,
                                          std::span<const cvec> w,
                                          std::span<const double> alpha) {
  const int K = ch.clusters();
  const double s2 = ch.noise_power;
  FixedPoints fp;
  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const double a = std::max(kAlphaFloor, alpha[ku]);
    const double te = std::norm(effective_edge_channel(ch, e[ku], k).dot(w[ku])) / s2;
    const double tc = std::norm(ch.h_center[ku].dot(w[ku])) / s2;
    fp.c.push_back(std::max(kFixedPointFloor, am_gm_fixed_point(a, te)));
    fp.d.push_back(std::max(kFixedPointFloor, am_gm_fixed_point(a, tc)));
    fp.t0.push_back(std::sqrt(a * tc));
  }
  return fp;
}

std::pair<FixedPoints, InitSearchTrace> find_initial_points(
    const ChannelSet& ch, std::span<const cvec> e, const SystemConfig& config, Rng& rng,
    const std::optional<FixedPoints>& start) {
  const int K = config.clusters;
  FixedPoints fp;
  if (start) {
    fp = *start;
  } else {
    for (int k = 0; k < K; ++k) {
      fp.c.push_back(rng.uniform(0.5, 5.0));
      fp.d.push_back(rng.uniform(0.5, 5.0));
      fp.t0.push_back(rng.uniform(0.5, 5.0));
    }
  }

  InitSearchTrace trace;
  for (int i = 1; i <= kInitSearchCap; ++i) {
    const ConeProgram p = build_p3(ch, e, fp, config);
    const conic::SolverResult r = conic::solve(p);
    ++trace.solver_calls;
    if (!r.optimal())
      throw SolverError(std::string("initial point search: P3 solve ended ") +
                            conic::to_string(r.status) + " (" + r.diagnostics + ")",
                        i);
    const double q = std::max(0.0, r.scalar(q_var(K)));
    trace.q_history.push_back(q);
    fp = update_fixed_points(read_beamforming(r, config), ch, e);
    if (q <= config.eps_init) {
      trace.converged = true;
      return {fp, trace};
    }
  }
  throw InitializationError("initial point search did not reach q <= " +
                            std::to_string(config.eps_init) + " in " +
                            std::to_string(kInitSearchCap) + " iterations (last q " +
                            std::to_string(trace.q_history.back()) + ")",
                            trace.q_history);
}

BeamformingSolution optimize_beamforming(const ChannelSet& ch, std::span<const cvec> e,
                                         const FixedPoints& fp0, const SystemConfig& config) {
  FixedPoints fp = fp0;
  BeamformingSolution best;
  std::vector<double> trace;
  for (int m = 0; m < kBeamformingCap; ++m) {
    const ConeProgram p = build_p2(ch, e, fp, config);
    const conic::SolverResult r = conic::solve(p);
    if (!r.optimal())
      throw SolverError(std::string("beamforming: P2 solve ended ") + conic::to_string(r.status) +
                            " (" + r.diagnostics + ")",
                        m);
    BeamformingSolution bs = read_beamforming(r, config);
    trace.push_back(bs.objective);
    fp = update_fixed_points(bs, ch, e);
    best = std::move(bs);
    if (trace.size() >= 2) {
      const double prev = trace[trace.size() - 2];
      if (prev - trace.back() < config.eps_beam * std::max(trace.back(), 1e-300)) break;
    }
  }
  best.objective_trace = std::move(trace);
  best.solver_calls = static_cast<int>(best.objective_trace.size());
  return best;
}

}  // namespace irsnoma
