#include "irsnoma/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "irsnoma/errors.hpp"
#include "irsnoma/random.hpp"

namespace irsnoma {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

double sq_abs(std::complex<double> x) { return std::norm(x); }

}  // namespace

double noise_power(double bandwidth_hz, double noise_dbm_per_hz) {
  // dBm -> W is a -30 dB shift
  return bandwidth_hz * std::pow(10.0, (noise_dbm_per_hz - 30.0) / 10.0);
}

double sinr_threshold(double rate) { return std::exp2(rate) - 1.0; }

void SystemConfig::validate() const {
  require(clusters >= 1, "K must be >= 1");
  require(bs_antennas >= clusters, "M must be >= K");
  require(irs_elements >= 1, "N must be >= 1");
  require(static_cast<int>(rate_center.size()) == clusters,
          "Rc must have one entry per cluster");
  require(static_cast<int>(rate_edge.size()) == clusters, "Re must have one entry per cluster");
  for (double r : rate_center) require(r > 0.0 && std::isfinite(r), "Rc entries must be > 0");
  for (double r : rate_edge) require(r > 0.0 && std::isfinite(r), "Re entries must be > 0");
  require(dist_irs_edge > 0 && dist_bs_irs > 0 && dist_bs_center > 0, "distances must be > 0");
  require(exp_irs_edge > 0 && exp_bs_irs > 0 && exp_bs_center > 0,
          "path-loss exponents must be > 0");
  require(bandwidth_hz > 0 && std::isfinite(bandwidth_hz), "B must be > 0");
  require(std::isfinite(noise_dbm_per_hz), "N0_dBm must be finite");
  require(eps_init > 0 && eps_beam > 0 && eps_alt > 0, "tolerances must be > 0");
  require(rand_trials >= 1, "rand_trials must be >= 1");
  require(!alpha_grid.empty(), "alpha_grid must be non-empty");
  for (double a : alpha_grid) require(a > 0.0 && a < 1.0, "alpha_grid entries must lie in (0, 1)");
  const double sigma2 = noise_power();
  require(sigma2 > 0 && std::isfinite(sigma2), "noise power must be > 0");
}

double SystemConfig::noise_power() const {
  return irsnoma::noise_power(bandwidth_hz, noise_dbm_per_hz);
}

SystemConfig SystemConfig::normalized() const {
  SystemConfig out = *this;
  if (out.rate_center.size() == 1 && clusters > 1)
    out.rate_center.assign(static_cast<std::size_t>(clusters), rate_center.front());
  if (out.rate_edge.size() == 1 && clusters > 1)
    out.rate_edge.assign(static_cast<std::size_t>(clusters), rate_edge.front());
  return out;
}

void ChannelSet::validate(const SystemConfig& config) const {
  const auto K = static_cast<std::size_t>(config.clusters);
  if (h_center.size() != K || g_irs.size() != K || h_edge.size() != K)
    throw ModelingError("channel set cluster count does not match configuration");
  for (std::size_t k = 0; k < K; ++k) {
    if (h_center[k].size() != config.bs_antennas || h_edge[k].size() != config.irs_elements ||
        g_irs[k].rows() != config.irs_elements || g_irs[k].cols() != config.bs_antennas)
      throw ModelingError("channel dimensions do not match configuration");
    if (!h_center[k].allFinite() || !h_edge[k].allFinite() || !g_irs[k].allFinite())
      throw ModelingError("channel entries must be finite");
  }
  if (!(noise_power > 0.0)) throw ModelingError("noise power must be > 0");
}

ChannelSet generate_channels(const SystemConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  const double scale_edge = 1.0 / std::sqrt(std::pow(config.dist_irs_edge, config.exp_irs_edge));
  const double scale_irs = 1.0 / std::sqrt(std::pow(config.dist_bs_irs, config.exp_bs_irs));
  const double scale_center =
      1.0 / std::sqrt(std::pow(config.dist_bs_center, config.exp_bs_center));

  ChannelSet ch;
  ch.noise_power = config.noise_power();
  for (int k = 0; k < config.clusters; ++k) {
    ch.h_center.push_back(rng.complex_normal_vector(config.bs_antennas) * scale_center);
    ch.g_irs.push_back(rng.complex_normal_matrix(config.irs_elements, config.bs_antennas) *
                       scale_irs);
    ch.h_edge.push_back(rng.complex_normal_vector(config.irs_elements) * scale_edge);
  }
  return ch;
}

cvec effective_edge_channel(const ChannelSet& ch, const cvec& e, int k) {
  const auto& h = ch.h_edge[static_cast<std::size_t>(k)];
  const auto& G = ch.g_irs[static_cast<std::size_t>(k)];
  if (e.size() != h.size()) throw ModelingError("phase vector has wrong length");
  for (Eigen::Index n = 0; n < e.size(); ++n)
    if (std::abs(std::abs(e(n)) - 1.0) > 1e-9)
      throw DomainError("phase vector entries must have unit modulus");
  // z^H = e^H D G with D = diag(conj(h)); hence z = G^H D^H e = G^H (h .* e)
  return G.adjoint() * h.cwiseProduct(e);
}

cvec phases_from_angles(const Eigen::VectorXd& theta) {
  cvec e(theta.size());
  for (Eigen::Index n = 0; n < theta.size(); ++n) e(n) = std::polar(1.0, -theta(n));
  return e;
}

Eigen::VectorXd angles_from_phases(const cvec& e) {
  Eigen::VectorXd theta(e.size());
  for (Eigen::Index n = 0; n < e.size(); ++n) {
    double t = -std::arg(e(n));
    if (t < 0) t += 2.0 * std::numbers::pi;
    if (t >= 2.0 * std::numbers::pi) t -= 2.0 * std::numbers::pi;
    theta(n) = t;
  }
  return theta;
}

namespace {

// |a^H w_i|^2 summed over i != k
double interference(const cvec& a, std::span<const cvec> w, int k) {
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (static_cast<int>(i) != k) sum += sq_abs(a.dot(w[i]));
  return sum;
}

}  // namespace

double sinr_edge(const ChannelSet& ch, std::span<const cvec> w, double alpha, const cvec& e,
                 int k) {
  const cvec z = effective_edge_channel(ch, e, k);
  const double own = sq_abs(z.dot(w[static_cast<std::size_t>(k)]));
  return own * (1.0 - alpha) / (own * alpha + interference(z, w, k) + ch.noise_power);
}

double sinr_center_decoding_edge(const ChannelSet& ch, std::span<const cvec> w, double alpha,
                                 int k) {
  const cvec& h = ch.h_center[static_cast<std::size_t>(k)];
  const double own = sq_abs(h.dot(w[static_cast<std::size_t>(k)]));
  return own * (1.0 - alpha) / (own * alpha + interference(h, w, k) + ch.noise_power);
}

double sinr_center(const ChannelSet& ch, std::span<const cvec> w, double alpha, int k) {
  const cvec& h = ch.h_center[static_cast<std::size_t>(k)];
  const double own = sq_abs(h.dot(w[static_cast<std::size_t>(k)]));
  return own * alpha / (interference(h, w, k) + ch.noise_power);
}

RateReport evaluate_solution(const ChannelSet& ch, const SystemConfig& config,
                             std::span<const cvec> w, std::span<const double> alpha,
                             std::span<const cvec> e) {
  const int K = ch.clusters();
  if (static_cast<int>(w.size()) != K || static_cast<int>(alpha.size()) != K ||
      static_cast<int>(e.size()) != K)
    throw ModelingError("solution does not have one entry per cluster");
  RateReport report;
  report.margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const double a = alpha[ku];
    report.sinr_c.push_back(sinr_center(ch, w, a, k));
    report.sinr_e.push_back(sinr_edge(ch, w, a, e[ku], k));
    report.sinr_c_to_e.push_back(sinr_center_decoding_edge(ch, w, a, k));
    report.rate_c.push_back(std::log2(1.0 + report.sinr_c.back()));
    report.rate_e.push_back(
        std::log2(1.0 + std::min(report.sinr_e.back(), report.sinr_c_to_e.back())));
    report.margin = std::min({report.margin, report.rate_c.back() - config.rate_center[ku],
                              report.rate_e.back() - config.rate_edge[ku]});
  }
  report.feasible = report.margin >= 0.0;
  return report;
}

double total_power(std::span<const cvec> w) {
  double p = 0.0;
  for (const auto& wk : w) p += wk.squaredNorm();
  return p;
}

}  // namespace irsnoma
