#pragma once

#include <span>
#include <utility>
#include <vector>

#include "irsnoma/model.hpp"
#include "irsnoma/random.hpp"

namespace irsnoma {

struct RandomizationReport {
  int trials = 0;
  int accepted = 0;
  double best_metric = 0.0;      // power (beamformers) or min edge-rate margin (phases)
  double sdr_lower_bound = 0.0;  // sum Tr(W_k) for beamformers, unused for phases
  bool rank_one = false;
};

/// Eigenvalue ratio below which a lifted matrix is treated as rank one.
inline constexpr double kRankOneRatio = 1e-6;
/// Largest admissible common rescaling factor for a beamformer candidate.
inline constexpr double kMaxScale = 10.0;

/// Smallest common factor s (any s > 0, up to kMaxScale) such that s * w meets
/// every QoS constraint under fixed alpha and e; 0 if no factor works.
double qos_scale(const ChannelSet& ch, const SystemConfig& config, std::span<const cvec> w,
                 std::span<const double> alpha, std::span<const cvec> e);

/// Gaussian randomization for the lifted beamformers. Candidates are the
/// principal eigenvectors plus `trials` draws w_k = L_k u; each candidate set
/// is rescaled by qos_scale and the cheapest feasible set wins. Throws
/// RandomizationError if nothing is feasible.
std::pair<std::vector<cvec>, RandomizationReport> randomize_beamformers(
    std::span<const cmat> W, std::span<const double> alpha, const ChannelSet& ch,
    std::span<const cvec> e, const SystemConfig& config, Rng& rng, int trials);

/// Smallest common factor for beams that each serve one user:
/// |g_k^H w_k|^2 >= r_k (sum_{i!=k} |g_k^H w_i|^2 + sigma^2). 0 if none works.
double sinr_scale(std::span<const cvec> w, std::span<const cvec> gains,
                  std::span<const double> thresholds, double noise_power);

/// randomize_beamformers for single-user beams (no power split).
std::pair<std::vector<cvec>, RandomizationReport> randomize_single_user_beamformers(
    std::span<const cmat> W, std::span<const cvec> gains, std::span<const double> thresholds,
    double noise_power, Rng& rng, int trials);

/// Entrywise projection onto unit modulus; zero entries map to 1.
cvec project_unit_modulus(const cvec& v);

/// Gaussian randomization for the lifted phases. Clusters are screened
/// independently (edge SINR k depends only on e_k); per cluster the candidate
/// with the largest edge-rate margin wins. Throws RandomizationError if some
/// cluster has no feasible candidate.
std::pair<std::vector<cvec>, RandomizationReport> randomize_phases(
    std::span<const cmat> V, const ChannelSet& ch, std::span<const cvec> w,
    std::span<const double> alpha, const SystemConfig& config, Rng& rng, int trials);

/// Square-root factor L with L L^H = A for Hermitian PSD A (negative
/// eigenvalues are clipped).
cmat psd_factor(const cmat& a);

}  // namespace irsnoma
