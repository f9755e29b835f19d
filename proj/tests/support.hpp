#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "irsnoma/model.hpp"
#include "irsnoma/random.hpp"

namespace irsnoma::test {

inline cmat random_hermitian(Rng& rng, int n) {
  const cmat a = rng.complex_normal_matrix(n, n);
  return 0.5 * (a + a.adjoint());
}

inline double lambda_max(const cmat& a) {
  Eigen::SelfAdjointEigenSolver<cmat> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

inline double lambda_min(const cmat& a) {
  Eigen::SelfAdjointEigenSolver<cmat> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// Minimizer of a unimodal function on [lo, hi] by golden-section search.
inline double golden_min(const std::function<double(double)>& f, double lo, double hi,
                         int iters = 200) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++i) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    }
  }
  return f(0.5 * (a + b));
}

/// Optimum of  min Tr(W)  s.t.  Tr(A_1 W) >= 1, Tr(A_2 W) >= 1,  W psd.
/// By duality it equals 1 / min over mu in [0, 1] of lambda_max(mu A_1 + (1 - mu) A_2),
/// and lambda_max of the combination is convex in mu.
inline double two_constraint_sdr_oracle(const cmat& a1, const cmat& a2) {
  const double m = golden_min([&](double mu) { return lambda_max(mu * a1 + (1.0 - mu) * a2); },
                              0.0, 1.0);
  return 1.0 / m;
}

/// Single-cluster edge-SINR feasibility by brute force over an N = 2 phase
/// grid: only the phase difference matters, so the first element is fixed.
/// Returns the best achieved constraint margin
///   (1 - (1 + r) alpha) |z^H w|^2 - r sigma^2  over the grid.
inline double phase_grid_margin(const ChannelSet& ch, const cvec& w, double alpha, double r,
                                int points) {
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < points; ++i)
    for (int j = 0; j < points; ++j) {
      cvec e(2);
      e(0) = std::polar(1.0, 2.0 * std::numbers::pi * i / points);
      e(1) = std::polar(1.0, 2.0 * std::numbers::pi * j / points);
      const cvec z = ch.g_irs[0].adjoint() * ch.h_edge[0].cwiseProduct(e);
      const double gain = std::norm(z.dot(w));
      best = std::max(best, (1.0 - (1.0 + r) * alpha) * gain - r * ch.noise_power);
    }
  return best;
}

/// Paired one-sided t statistic for mean(a - b) > 0.
inline double paired_t(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) var += std::pow(a[i] - b[i] - mean, 2);
  var /= static_cast<double>(n - 1);
  return mean / std::sqrt(var / static_cast<double>(n));
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace irsnoma::test
