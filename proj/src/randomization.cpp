#include "irsnoma/randomization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "irsnoma/errors.hpp"

namespace irsnoma {

namespace {

struct Eigen1 {
  cvec principal;  // scaled by sqrt(lambda_max)
  double ratio;    // lambda_2 / lambda_1
};

Eigen1 principal_component(const cmat& a) {
  Eigen::SelfAdjointEigenSolver<cmat> es(0.5 * (a + a.adjoint()));
  const auto& lam = es.eigenvalues();
  const Eigen::Index n = lam.size();
  const double l1 = std::max(0.0, lam(n - 1));
  const double l2 = n > 1 ? std::max(0.0, lam(n - 2)) : 0.0;
  return {std::sqrt(l1) * es.eigenvectors().col(n - 1), l1 > 0.0 ? l2 / l1 : 1.0};
}

// Rate margin min over constraints of achieved - required, as in evaluate_solution.
double edge_rate_margin(const ChannelSet& ch, std::span<const cvec> w, double alpha, const cvec& e,
                        int k, double rate) {
  return std::log2(1.0 + sinr_edge(ch, w, alpha, e, k)) - rate;
}

}  // namespace

cmat psd_factor(const cmat& a) {
  Eigen::SelfAdjointEigenSolver<cmat> es(0.5 * (a + a.adjoint()));
  const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * lam.asDiagonal();
}

double qos_scale(const ChannelSet& ch, const SystemConfig& config, std::span<const cvec> w,
                 std::span<const double> alpha, std::span<const cvec> e) {
  const int K = config.clusters;
  const double s2 = ch.noise_power;
  double need = 0.0;  // s^2 >= need
  // a s^2 >= r (b s^2 + sigma^2)  <=>  s^2 >= r sigma^2 / (a - r b)
  auto require = [&](double a, double b, double r) {
    const double den = a - r * b;
    if (!(den > 0.0)) return false;
    need = std::max(need, r * s2 / den);
    return true;
  };
  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const double rc = sinr_threshold(config.rate_center[ku]);
    const double re = sinr_threshold(config.rate_edge[ku]);
    const double a = alpha[ku];
    const cvec z = effective_edge_channel(ch, e[ku], k);
    const cvec& h = ch.h_center[ku];
    double own_h = 0.0, int_h = 0.0, own_z = 0.0, int_z = 0.0;
    for (int i = 0; i < K; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      const double gh = std::norm(h.dot(w[iu]));
      const double gz = std::norm(z.dot(w[iu]));
      if (i == k) {
        own_h = gh;
        own_z = gz;
      } else {
        int_h += gh;
        int_z += gz;
      }
    }
    if (!require(a * own_h, int_h, rc)) return 0.0;
    if (!require((1.0 - a) * own_h, a * own_h + int_h, re)) return 0.0;
    if (!require((1.0 - a) * own_z, a * own_z + int_z, re)) return 0.0;
  }
  const double s = std::sqrt(need * (1.0 + 1e-9));
  return s <= kMaxScale ? s : 0.0;
}

namespace {

template <typename ScaleFn>
std::pair<std::vector<cvec>, RandomizationReport> best_scaled_candidate(std::span<const cmat> W,
                                                                        ScaleFn scale, Rng& rng,
                                                                        int trials) {
  if (trials < 0) throw DomainError("trial count must be non-negative");
  RandomizationReport rep;
  std::vector<cmat> L;
  std::vector<cvec> best;
  double best_power = std::numeric_limits<double>::infinity();
  std::vector<cvec> cand;
  bool rank_one = true;
  for (const cmat& Wk : W) {
    rep.sdr_lower_bound += Wk.trace().real();
    const Eigen1 pc = principal_component(Wk);
    rank_one = rank_one && pc.ratio <= kRankOneRatio;
    cand.push_back(pc.principal);
    L.push_back(psd_factor(Wk));
  }
  rep.rank_one = rank_one;

  auto consider = [&](std::vector<cvec>& c) {
    ++rep.trials;
    const double s = scale(c);
    if (s <= 0.0) return;
    ++rep.accepted;
    for (cvec& v : c) v *= s;
    const double p = total_power(c);
    if (p < best_power) {
      best_power = p;
      best = c;
    }
  };

  consider(cand);
  if (!rank_one)
    for (int t = 0; t < trials; ++t) {
      for (std::size_t k = 0; k < W.size(); ++k)
        cand[k] = L[k] * rng.complex_normal_vector(L[k].cols());
      consider(cand);
    }
  if (best.empty())
    throw RandomizationError("beamformer randomization: no feasible candidate in " +
                             std::to_string(rep.trials) + " draws");
  rep.best_metric = best_power;
  return {best, rep};
}

}  // namespace

std::pair<std::vector<cvec>, RandomizationReport> randomize_beamformers(
    std::span<const cmat> W, std::span<const double> alpha, const ChannelSet& ch,
    std::span<const cvec> e, const SystemConfig& config, Rng& rng, int trials) {
  const int K = config.clusters;
  if (static_cast<int>(W.size()) != K || static_cast<int>(alpha.size()) != K ||
      static_cast<int>(e.size()) != K)
    throw ModelingError("randomize_beamformers: need one entry per cluster");
  return best_scaled_candidate(
      W, [&](const std::vector<cvec>& c) { return qos_scale(ch, config, c, alpha, e); }, rng,
      trials);
}

double sinr_scale(std::span<const cvec> w, std::span<const cvec> gains,
                  std::span<const double> thresholds, double noise_power) {
  double need = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    double own = 0.0, other = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
      (i == k ? own : other) += std::norm(gains[k].dot(w[i]));
    const double den = own - thresholds[k] * other;
    if (!(den > 0.0)) return 0.0;
    need = std::max(need, thresholds[k] * noise_power / den);
  }
  const double s = std::sqrt(need * (1.0 + 1e-9));
  return s <= kMaxScale ? s : 0.0;
}

std::pair<std::vector<cvec>, RandomizationReport> randomize_single_user_beamformers(
    std::span<const cmat> W, std::span<const cvec> gains, std::span<const double> thresholds,
    double noise_power, Rng& rng, int trials) {
  if (gains.size() != W.size() || thresholds.size() != W.size())
    throw ModelingError("randomize_single_user_beamformers: need one entry per beam");
  return best_scaled_candidate(
      W,
      [&](const std::vector<cvec>& c) { return sinr_scale(c, gains, thresholds, noise_power); },
      rng, trials);
}

cvec project_unit_modulus(const cvec& v) {
  cvec out(v.size());
  for (Eigen::Index n = 0; n < v.size(); ++n) {
    const double m = std::abs(v(n));
    out(n) = m > 0.0 ? v(n) / m : std::complex<double>(1.0, 0.0);
  }
  return out;
}

std::pair<std::vector<cvec>, RandomizationReport> randomize_phases(
    std::span<const cmat> V, const ChannelSet& ch, std::span<const cvec> w,
    std::span<const double> alpha, const SystemConfig& config, Rng& rng, int trials) {
  const int K = config.clusters;
  if (static_cast<int>(V.size()) != K || static_cast<int>(w.size()) != K ||
      static_cast<int>(alpha.size()) != K)
    throw ModelingError("randomize_phases: need one entry per cluster");
  if (trials < 0) throw DomainError("trial count must be non-negative");

  RandomizationReport rep;
  rep.trials = 1 + trials;
  rep.best_metric = std::numeric_limits<double>::infinity();
  std::vector<cvec> out;
  bool rank_one = true;
  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const double rate = config.rate_edge[ku];
    const Eigen1 pc = principal_component(V[ku]);
    rank_one = rank_one && pc.ratio <= kRankOneRatio;
    const cmat L = psd_factor(V[ku]);

    cvec best = project_unit_modulus(pc.principal);
    double best_margin = edge_rate_margin(ch, w, alpha[ku], best, k, rate);
    int accepted = best_margin >= 0.0 ? 1 : 0;
    for (int t = 0; t < trials; ++t) {
      const cvec c = project_unit_modulus(L * rng.complex_normal_vector(L.cols()));
      const double m = edge_rate_margin(ch, w, alpha[ku], c, k, rate);
      if (m >= 0.0) ++accepted;
      if (m > best_margin) {
        best_margin = m;
        best = c;
      }
    }
    if (best_margin < 0.0)
      throw RandomizationError("phase randomization: no feasible candidate for cluster " +
                               std::to_string(k));
    rep.accepted = k == 0 ? accepted : std::min(rep.accepted, accepted);
    rep.best_metric = std::min(rep.best_metric, best_margin);
    out.push_back(std::move(best));
  }
  rep.rank_one = rank_one;
  return {out, rep};
}

}  // namespace irsnoma
