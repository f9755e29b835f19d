#include <doctest.h>

#include "irsnoma/beamforming.hpp"
#include "irsnoma/errors.hpp"
#include "irsnoma/phase.hpp"
#include "irsnoma/randomization.hpp"
#include "support.hpp"

using namespace irsnoma;

TEST_SUITE("randomization") {

TEST_CASE("psd factor reconstructs and clips") {
  Rng rng(1);
  const cvec v = rng.complex_normal_vector(4), u = rng.complex_normal_vector(4);
  const cmat a = v * v.adjoint() + u * u.adjoint();
  const cmat L = psd_factor(a);
  CHECK((L * L.adjoint() - a).norm() < 1e-10 * a.norm());
  const cmat indefinite = v * v.adjoint() - 0.5 * u * u.adjoint();
  const cmat Li = psd_factor(indefinite);
  CHECK(test::lambda_min(Li * Li.adjoint()) >= -1e-12);
}

TEST_CASE("unit-modulus projection") {
  cvec v(3);
  v << std::complex<double>(3, 4), 0.0, std::complex<double>(0, -2);
  const cvec p = project_unit_modulus(v);
  CHECK(std::abs(p(0) - std::complex<double>(0.6, 0.8)) < 1e-15);
  CHECK(p(1) == std::complex<double>(1.0, 0.0));
  CHECK(std::abs(p(2) - std::complex<double>(0, -1)) < 1e-15);
}

TEST_CASE("QoS scale is the smallest feasible common factor") {
  SystemConfig c;
  c.irs_elements = 4;
  c.bs_antennas = 4;
  const ChannelSet ch = generate_channels(c, 2);
  Rng rng(3);
  const std::vector<cvec> e = random_phases(2, 4, rng);
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    // beams orthogonal to the other cluster's channels, so only noise limits the rates
    std::vector<cvec> w;
    for (int k = 0; k < 2; ++k) {
      const int j = 1 - k;
      cmat A(4, 2);
      A.col(0) = ch.h_center[static_cast<std::size_t>(j)];
      A.col(1) = effective_edge_channel(ch, e[static_cast<std::size_t>(j)], j);
      const cmat P = cmat::Identity(4, 4) - A * (A.adjoint() * A).inverse() * A.adjoint();
      w.push_back(P * rng.complex_normal_vector(4) * 10.0);
    }
    const std::vector<double> alpha{rng.uniform(0.05, 0.45), rng.uniform(0.05, 0.45)};
    const double s = qos_scale(ch, c, w, alpha, e);
    if (s == 0.0) continue;
    ++checked;
    std::vector<cvec> ws{w[0] * s, w[1] * s};
    CHECK(evaluate_solution(ch, c, ws, alpha, e).margin >= -1e-9);
    ws = {w[0] * (0.999 * s), w[1] * (0.999 * s)};
    CHECK(evaluate_solution(ch, c, ws, alpha, e).margin < 0.0);
    const std::vector<cvec> w2{w[0] * 2.0, w[1] * 2.0};
    CHECK(qos_scale(ch, c, w2, alpha, e) == doctest::Approx(s / 2.0).epsilon(1e-12));
  }
  CHECK(checked > 5);
}

TEST_CASE("single-user SINR scale has a closed form without interference") {
  const cvec g = cvec::Constant(2, std::complex<double>(0.1, 0.2));
  const cvec w = cvec::Constant(2, 1.0);
  const double s = sinr_scale(std::vector<cvec>{w}, std::vector<cvec>{g}, std::vector<double>{3.0}, 1e-3);
  CHECK(s * s == doctest::Approx(3.0 * 1e-3 / std::norm(g.dot(w))).epsilon(1e-8));
}

TEST_CASE("randomized beamformers never beat the relaxation and recover rank-one optima") {
  SystemConfig c;
  c.irs_elements = 6;
  c.bs_antennas = 4;
  Rng rng(4);
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const ChannelSet ch = generate_channels(c, seed);
    const std::vector<cvec> e = random_phases(2, 6, rng);
    const std::vector<double> alpha{0.2, 0.2};
    const conic::SolverResult r = conic::solve(build_fixed_alpha_sdr(ch, e, alpha, c));
    REQUIRE(r.optimal());
    std::vector<cmat> W{r.matrix(0), r.matrix(1)};
    const auto [w, rep] = randomize_beamformers(W, alpha, ch, e, c, rng, 50);
    CHECK(total_power(w) >= rep.sdr_lower_bound - 1e-6);
    CHECK(evaluate_solution(ch, c, w, alpha, e).margin >= -1e-9);
    if (rep.rank_one) CHECK(total_power(w) == doctest::Approx(rep.sdr_lower_bound).epsilon(1e-5));
  }
}

TEST_CASE("randomization reports failure when nothing can be scaled feasible") {
  SystemConfig c;
  c.irs_elements = 3;
  c.bs_antennas = 2;
  const ChannelSet ch = generate_channels(c, 1);
  Rng rng(1);
  const std::vector<cvec> e = random_phases(2, 3, rng);
  // alpha = 0.9 leaves the edge user too little power for any scale at rate 1
  const std::vector<cmat> W{cmat::Identity(2, 2), cmat::Identity(2, 2)};
  CHECK_THROWS_AS(randomize_beamformers(W, std::vector<double>{0.9, 0.9}, ch, e, c, rng, 10),
                  RandomizationError);
}

}
