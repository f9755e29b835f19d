#pragma once

#include <span>
#include <string>
#include <vector>

#include "irsnoma/beamforming.hpp"
#include "irsnoma/conic.hpp"
#include "irsnoma/model.hpp"

namespace irsnoma {

struct PhaseSolution {
  std::vector<cmat> V;  // lifted phases, unit diagonal
  std::vector<cvec> e;  // unit-modulus, empty until randomized
  std::vector<Eigen::VectorXd> theta;

  /// Fills e and theta from unit-modulus phase vectors.
  void set_phases(std::vector<cvec> phases);
};

/// R[i] = r_i r_i^H with r_i = conj(h_e) .* (G w_i), so that
/// e^H r_i = z^H w_i for the edge channel z of cluster k under phases e.
struct LiftedEdgeOperators {
  std::vector<cvec> r;
  std::vector<cmat> R;
};

LiftedEdgeOperators lift_edge_operators(const ChannelSet& ch, std::span<const cvec> w, int k);

/// Phase feasibility program over one N x N lifted phase matrix per cluster,
/// with a zero objective. Edge-SINR constraints are divided by the noise power.
conic::ConeProgram build_p5(const ChannelSet& ch, std::span<const cvec> w,
                            std::span<const double> alpha, const SystemConfig& config);
conic::ConeProgram build_p5(const ChannelSet& ch, const BeamformingSolution& bs,
                            const SystemConfig& config);

struct PhaseFeasibility {
  conic::SolveStatus status = conic::SolveStatus::NumericalFailure;
  PhaseSolution lifted;  // V only
  std::string diagnostics;

  bool feasible() const { return status == conic::SolveStatus::Optimal; }
};

/// Solves P5. Never throws on infeasibility; that is reported in the status.
PhaseFeasibility solve_phase_feasibility(const ChannelSet& ch, std::span<const cvec> w,
                                         std::span<const double> alpha,
                                         const SystemConfig& config);
PhaseFeasibility solve_phase_feasibility(const ChannelSet& ch, const BeamformingSolution& bs,
                                         const SystemConfig& config);

/// Edge-SINR constraint margin of cluster k under phases e, in the normalized
/// units of P5: (1 - (1 + r) alpha) |z^H w_k|^2 - r sum_{i!=k} |z^H w_i|^2 - r sigma^2,
/// divided by sigma^2. Feasible iff >= 0.
double edge_constraint_margin(const ChannelSet& ch, std::span<const cvec> w, double alpha,
                              const cvec& e, int k, const SystemConfig& config);

/// Uniform random phases, one vector per cluster.
std::vector<cvec> random_phases(int clusters, int elements, Rng& rng);

}  // namespace irsnoma
