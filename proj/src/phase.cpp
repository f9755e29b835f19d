#include "irsnoma/phase.hpp"

#include <numbers>
#include <string>

#include "irsnoma/errors.hpp"

namespace irsnoma {

void PhaseSolution::set_phases(std::vector<cvec> phases) {
  e = std::move(phases);
  theta.clear();
  for (const cvec& v : e) theta.push_back(angles_from_phases(v));
}

LiftedEdgeOperators lift_edge_operators(const ChannelSet& ch, std::span<const cvec> w, int k) {
  const auto ku = static_cast<std::size_t>(k);
  const cvec hc = ch.h_edge[ku].conjugate();
  LiftedEdgeOperators ops;
  for (const cvec& wi : w) {
    if (wi.size() != ch.g_irs[ku].cols()) throw ModelingError("beamformer has wrong length");
    cvec r = hc.cwiseProduct(ch.g_irs[ku] * wi);
    ops.R.push_back(r * r.adjoint());
    ops.r.push_back(std::move(r));
  }
  return ops;
}

conic::ConeProgram build_p5(const ChannelSet& ch, std::span<const cvec> w,
                            std::span<const double> alpha, const SystemConfig& config) {
  ch.validate(config);
  const int K = config.clusters;
  const int N = config.irs_elements;
  if (static_cast<int>(w.size()) != K || static_cast<int>(alpha.size()) != K)
    throw ModelingError("need one beamformer and one power coefficient per cluster");
  const double s2 = ch.noise_power;

  conic::ConeProgram p;
  for (int k = 0; k < K; ++k) p.add_matrix("V" + std::to_string(k), N);
  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const std::string sk = std::to_string(k);
    const double re = sinr_threshold(config.rate_edge[ku]);
    const LiftedEdgeOperators ops = lift_edge_operators(ch, w, k);
    // Interference towards edge user k is reflected by IRS k, so every term
    // of this constraint acts on V_k.
    conic::AffineExpr expr = (1.0 - (1.0 + re) * alpha[ku]) / s2 * conic::AffineExpr::trace(k, ops.R[ku]);
    for (int i = 0; i < K; ++i)
      if (i != k) expr -= (re / s2) * conic::AffineExpr::trace(k, ops.R[static_cast<std::size_t>(i)]);
    expr -= re;
    p.add_linear(std::move(expr), conic::Sense::GreaterEqual, "edge_sinr_" + sk);
    for (int n = 0; n < N; ++n)
      p.add_diagonal(k, n, 1.0, "unit_modulus_" + sk + "_" + std::to_string(n));
  }
  return p;
}

conic::ConeProgram build_p5(const ChannelSet& ch, const BeamformingSolution& bs,
                            const SystemConfig& config) {
  if (bs.w.empty()) throw ModelingError("phase program needs recovered beamformers");
  return build_p5(ch, bs.w, bs.alpha, config);
}

PhaseFeasibility solve_phase_feasibility(const ChannelSet& ch, std::span<const cvec> w,
                                         std::span<const double> alpha,
                                         const SystemConfig& config) {
  const conic::ConeProgram p = build_p5(ch, w, alpha, config);
  const conic::SolverResult r = conic::solve(p);
  PhaseFeasibility out;
  out.status = r.status;
  out.diagnostics = r.diagnostics;
  if (r.optimal())
    for (int k = 0; k < config.clusters; ++k) {
      cmat V = r.matrix(k);
      out.lifted.V.push_back(0.5 * (V + V.adjoint()));
    }
  return out;
}

PhaseFeasibility solve_phase_feasibility(const ChannelSet& ch, const BeamformingSolution& bs,
                                         const SystemConfig& config) {
  if (bs.w.empty()) throw ModelingError("phase program needs recovered beamformers");
  return solve_phase_feasibility(ch, bs.w, bs.alpha, config);
}

double edge_constraint_margin(const ChannelSet& ch, std::span<const cvec> w, double alpha,
                              const cvec& e, int k, const SystemConfig& config) {
  const double re = sinr_threshold(config.rate_edge[static_cast<std::size_t>(k)]);
  const cvec z = effective_edge_channel(ch, e, k);
  double margin = -re;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double g = std::norm(z.dot(w[i])) / ch.noise_power;
    margin += static_cast<int>(i) == k ? (1.0 - (1.0 + re) * alpha) * g : -re * g;
  }
  return margin;
}

std::vector<cvec> random_phases(int clusters, int elements, Rng& rng) {
  std::vector<cvec> e;
  for (int k = 0; k < clusters; ++k) {
    Eigen::VectorXd theta(elements);
    for (int n = 0; n < elements; ++n) theta(n) = rng.uniform(0.0, 2.0 * std::numbers::pi);
    e.push_back(phases_from_angles(theta));
  }
  return e;
}

}  // namespace irsnoma
