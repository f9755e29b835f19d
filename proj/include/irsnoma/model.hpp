#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace irsnoma {

using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;

/// Scenario parameters for a K-cluster IRS-assisted NOMA downlink.
///
/// Each cluster holds one center user (direct link from the BS), one edge
/// user (reachable only through its IRS) and one IRS with N elements. Rates
/// are in bit/s/Hz, distances in meters.
struct SystemConfig {
  int clusters = 2;         // K
  int bs_antennas = 8;      // M, must be >= K
  int irs_elements = 32;    // N
  std::vector<double> rate_center{1.0, 1.0};  // R_c per cluster
  std::vector<double> rate_edge{1.0, 1.0};    // R_e per cluster

  double dist_irs_edge = 10.0;    // d0
  double dist_bs_irs = 50.0;      // d1
  double dist_bs_center = 10.0;   // d2
  double exp_irs_edge = 2.0;      // a0
  double exp_bs_irs = 2.2;        // a1
  double exp_bs_center = 2.0;     // a2

  double bandwidth_hz = 1e8;
  double noise_dbm_per_hz = -80.0;

  double eps_init = 1e-5;   // initial point search
  double eps_beam = 1e-3;   // beamforming SCA loop
  double eps_alt = 1e-3;    // outer alternating loop
  int rand_trials = 200;
  std::vector<double> alpha_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::uint64_t seed = 1;

  /// Throws ConfigError on the first violated invariant.
  void validate() const;
  double noise_power() const;
  /// Broadcasts single-entry rate lists to all clusters.
  SystemConfig normalized() const;
};

/// Converts a noise spectral density in dBm/Hz over a bandwidth to watts.
double noise_power(double bandwidth_hz, double noise_dbm_per_hz);

/// Per-cluster channel realizations.
struct ChannelSet {
  std::vector<cvec> h_center;  // BS -> center user k, M
  std::vector<cmat> g_irs;     // BS -> IRS k, N x M
  std::vector<cvec> h_edge;    // IRS k -> edge user k, N
  double noise_power = 1.0;

  int clusters() const { return static_cast<int>(h_center.size()); }
  int bs_antennas() const { return h_center.empty() ? 0 : static_cast<int>(h_center[0].size()); }
  int irs_elements() const { return h_edge.empty() ? 0 : static_cast<int>(h_edge[0].size()); }

  /// Checks dimensions against `config` and that all entries are finite.
  void validate(const SystemConfig& config) const;
};

ChannelSet generate_channels(const SystemConfig& config, std::uint64_t seed);

/// Phase convention: e holds the conjugated IRS diagonal, Theta = diag(conj(e)),
/// so the reflected edge channel is z^H = e^H diag(conj(h_edge)) G.
/// Returns z (not z^H).
cvec effective_edge_channel(const ChannelSet& ch, const cvec& e, int k);

/// Phase vector for angles theta_n: e_n = exp(-j theta_n).
cvec phases_from_angles(const Eigen::VectorXd& theta);
/// Angles in [0, 2pi) of a unit-modulus phase vector.
Eigen::VectorXd angles_from_phases(const cvec& e);

/// SINR of the edge user's own signal at edge user k.
double sinr_edge(const ChannelSet& ch, std::span<const cvec> w, double alpha, const cvec& e, int k);
/// SINR of the edge user's signal observed at center user k (SIC stage).
double sinr_center_decoding_edge(const ChannelSet& ch, std::span<const cvec> w, double alpha, int k);
/// SINR of the center user's own signal after SIC.
double sinr_center(const ChannelSet& ch, std::span<const cvec> w, double alpha, int k);

struct RateReport {
  std::vector<double> sinr_c, sinr_e, sinr_c_to_e;
  std::vector<double> rate_c, rate_e;
  bool feasible = false;
  double margin = 0.0;  // min over all QoS constraints of achieved - required rate
};

RateReport evaluate_solution(const ChannelSet& ch, const SystemConfig& config,
                             std::span<const cvec> w, std::span<const double> alpha,
                             std::span<const cvec> e);

double total_power(std::span<const cvec> w);

/// 2^R - 1.
double sinr_threshold(double rate);

}  // namespace irsnoma
