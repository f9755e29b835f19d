#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "irsnoma/conic.hpp"
#include "irsnoma/model.hpp"
#include "irsnoma/random.hpp"

namespace irsnoma {

/// SCA fixed points, one per cluster, in noise-normalized units: c and d are
/// the physical values divided by sigma, t0 likewise.
struct FixedPoints {
  std::vector<double> c, d, t0;

  int clusters() const { return static_cast<int>(c.size()); }
};

struct BeamformingSolution {
  std::vector<cmat> W;
  std::vector<cvec> w;  // empty until recovered by randomization
  std::vector<double> alpha;
  std::vector<double> t;  // noise-normalized
  double objective = 0.0;  // sum_k Tr(W_k), watts
  std::vector<double> r_c, r_e;

  std::vector<double> objective_trace;  // one entry per convex solve
  int solver_calls = 0;
};

struct InitSearchTrace {
  std::vector<double> q_history;
  bool converged = false;
  int solver_calls = 0;
};

/// Convex upper bound on the bilinear term alpha * T used by the SCA:
/// alpha T <= ((alpha c)^2 + (T / c)^2) / 2 for any c > 0.
inline double am_gm_upper(double alpha, double T, double c) {
  return 0.5 * ((alpha * c) * (alpha * c) + (T / c) * (T / c));
}
/// The c at which am_gm_upper is tight.
inline double am_gm_fixed_point(double alpha, double T) { return std::sqrt(T / alpha); }

/// Variable layout shared by build_p2 and build_p3: matrix k is W_k, scalar k
/// is alpha_k, scalar K + k is t_k, and in P3 scalar 2K is q.
inline int alpha_var(int k) { return k; }
inline int t_var(int clusters, int k) { return clusters + k; }
inline int q_var(int clusters) { return 2 * clusters; }

/// Per-cluster rank-one gains divided by the noise power:
/// H_c[k] = h_c h_c^H / sigma^2 and Z_e[k] = z z^H / sigma^2.
struct NormalizedGains {
  std::vector<cmat> H_c, Z_e;
};
NormalizedGains normalized_gains(const ChannelSet& ch, std::span<const cvec> e);

conic::ConeProgram build_p2(const ChannelSet& ch, std::span<const cvec> e, const FixedPoints& fp,
                            const SystemConfig& config);

/// P2 with an additive slack q >= 0 on the two AM-GM constraints and the
/// Taylor constraint, minimizing q. A 1e-6 weight on the total power keeps
/// the optimal face bounded.
conic::ConeProgram build_p3(const ChannelSet& ch, std::span<const cvec> e, const FixedPoints& fp,
                            const SystemConfig& config);

/// Exact SDR for fixed per-cluster power coefficients: every QoS constraint
/// is linear in W once alpha is fixed.
conic::ConeProgram build_fixed_alpha_sdr(const ChannelSet& ch, std::span<const cvec> e,
                                         std::span<const double> alpha,
                                         const SystemConfig& config);

/// Tightens the AM-GM and Taylor bounds at `prev`. alpha is clamped at
/// kAlphaFloor; `degenerate`, when given, reports whether that happened.
inline constexpr double kAlphaFloor = 1e-6;
FixedPoints update_fixed_points(const BeamformingSolution& prev, const ChannelSet& ch,
                                std::span<const cvec> e, bool* degenerate = nullptr);

/// Fixed points implied by a concrete beamformer set (used to warm-start the
/// search from an incumbent).
FixedPoints fixed_points_from_beamformers(const ChannelSet& ch, std::span<const cvec> e,
                                          std::span<const cvec> w, std::span<const double> alpha);

/// Solves the slack program repeatedly, tightening the fixed points each time,
/// until q <= eps_init. Starts from `start` when given, otherwise from random
/// fixed points drawn from `rng`. Throws InitializationError (carrying the q
/// history) at the iteration cap.
std::pair<FixedPoints, InitSearchTrace> find_initial_points(
    const ChannelSet& ch, std::span<const cvec> e, const SystemConfig& config, Rng& rng,
    const std::optional<FixedPoints>& start = std::nullopt);

/// SCA power minimization from feasible fixed points until the relative
/// decrease drops below eps_beam. Throws SolverError carrying the SCA
/// iteration on failure.
BeamformingSolution optimize_beamforming(const ChannelSet& ch, std::span<const cvec> e,
                                         const FixedPoints& fp0, const SystemConfig& config);

/// Reads (W, alpha, t) out of an optimal P2/P3/fixed-alpha result.
BeamformingSolution read_beamforming(const conic::SolverResult& r, const SystemConfig& config,
                                     std::span<const double> fixed_alpha = {});

inline constexpr int kInitSearchCap = 50;
inline constexpr int kBeamformingCap = 50;

}  // namespace irsnoma
