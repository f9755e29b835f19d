#include <doctest.h>

#include "irsnoma/beamforming.hpp"
#include "irsnoma/errors.hpp"
#include "irsnoma/phase.hpp"
#include "support.hpp"

using namespace irsnoma;

namespace {

using C = std::complex<double>;

// Literal K = 2, M = 2, N = 1 instance shared with tests/oracles/p2_oracle.py.
struct LiteralInstance {
  SystemConfig config;
  ChannelSet ch;
  std::vector<cvec> e;
  FixedPoints fp;
};

LiteralInstance literal_instance() {
  LiteralInstance s;
  s.config.clusters = 2;
  s.config.bs_antennas = 2;
  s.config.irs_elements = 1;
  s.ch.noise_power = s.config.noise_power();
  cvec h0(2), h1(2);
  h0 << C(0.10, 0.02), C(0.0, 0.01);
  h1 << C(0.015, 0.0), C(-0.09, 0.03);
  cmat g0(1, 2), g1(1, 2);
  g0 << C(0.05, -0.01), C(0.0, 0.004);
  g1 << C(-0.003, 0.0), C(0.045, 0.02);
  s.ch.h_center = {h0, h1};
  s.ch.g_irs = {g0, g1};
  s.ch.h_edge = {cvec::Constant(1, C(2.0, 0.0)), cvec::Constant(1, C(1.5, 1.0))};
  s.e = {cvec::Ones(1), cvec::Ones(1)};
  s.fp.c = {45.04017254470884, 35.41113232703704};
  s.fp.d = {45.82575694955841, 38.4187454245971};
  s.fp.t0 = {9.165151389911683, 9.604686356149275};
  return s;
}

// Exact (unrelaxed) QoS constraints of a lifted solution, normalized units.
double worst_lifted_qos(const ChannelSet& ch, const std::vector<cvec>& e,
                        const BeamformingSolution& bs, const SystemConfig& config) {
  const NormalizedGains g = normalized_gains(ch, e);
  const int K = config.clusters;
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    auto tr = [&](const cmat& a, int i) { return (a * bs.W[static_cast<std::size_t>(i)]).trace().real(); };
    double ie = 0.0, ic = 0.0;
    for (int i = 0; i < K; ++i)
      if (i != k) {
        ie += tr(g.Z_e[ku], i);
        ic += tr(g.H_c[ku], i);
      }
    const double a = bs.alpha[ku];
    const double re = bs.r_e[ku], rc = bs.r_c[ku];
    worst = std::min(worst, a * tr(g.H_c[ku], k) - rc * (ic + 1.0));
    worst = std::min(worst, (1.0 - (1.0 + re) * a) * tr(g.Z_e[ku], k) - re * (ie + 1.0));
    worst = std::min(worst, (1.0 - (1.0 + re) * a) * tr(g.H_c[ku], k) - re * (ic + 1.0));
  }
  return worst;
}

}  // namespace

TEST_SUITE("beamforming") {

TEST_CASE("AM-GM bound holds and is tight at the fixed point") {
  Rng rng(21);
  for (int i = 0; i < 1000; ++i) {
    const double alpha = rng.uniform(1e-3, 1.0);
    const double T = std::exp(rng.uniform(-5.0, 8.0));
    const double c = std::exp(rng.uniform(-5.0, 5.0));
    CHECK(alpha * T <= am_gm_upper(alpha, T, c) * (1.0 + 1e-12));
    const double c0 = am_gm_fixed_point(alpha, T);
    CHECK(am_gm_upper(alpha, T, c0) == doctest::Approx(alpha * T).epsilon(1e-12));
  }
}

TEST_CASE("SCA program matches an external reference solver") {
  const LiteralInstance s = literal_instance();
  const conic::ConeProgram p = build_p2(s.ch, s.e, s.fp, s.config);
  const conic::SolverResult r = conic::solve(p);
  REQUIRE(r.optimal());
  // frozen from tests/oracles/p2_oracle.py (two external solvers agree to 1e-10)
  CHECK(r.objective == doctest::Approx(20.5358400306).epsilon(1e-6));
  CHECK_NOTHROW(conic::check_kkt(p, r));
  const BeamformingSolution bs = read_beamforming(r, s.config);
  CHECK(bs.alpha[0] == doctest::Approx(0.21327844).epsilon(1e-4));
  CHECK(bs.alpha[1] == doctest::Approx(0.2456279).epsilon(1e-4));
}

TEST_CASE("SCA optimum is feasible for the exact constraints and bounded by the exact SDR") {
  const LiteralInstance s = literal_instance();
  const conic::SolverResult r = conic::solve(build_p2(s.ch, s.e, s.fp, s.config));
  REQUIRE(r.optimal());
  const BeamformingSolution bs = read_beamforming(r, s.config);
  CHECK(worst_lifted_qos(s.ch, s.e, bs, s.config) >= -1e-5);
  const conic::SolverResult exact =
      conic::solve(build_fixed_alpha_sdr(s.ch, s.e, bs.alpha, s.config));
  REQUIRE(exact.optimal());
  CHECK(exact.objective <= bs.objective + 1e-6);
}

TEST_CASE("fixed-alpha SDR with one cluster matches the dual scalar search") {
  Rng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    SystemConfig c;
    c.clusters = 1;
    c.bs_antennas = 3;
    c.irs_elements = 4;
    c.rate_center = {1.0};
    c.rate_edge = {0.8};
    const ChannelSet ch = generate_channels(c, 100 + trial);
    const std::vector<cvec> e = random_phases(1, 4, rng);
    const double alpha = 0.2;
    const conic::SolverResult r =
        conic::solve(build_fixed_alpha_sdr(ch, e, std::vector<double>{alpha}, c));
    REQUIRE(r.optimal());

    const double rc = sinr_threshold(1.0), re = sinr_threshold(0.8);
    const NormalizedGains g = normalized_gains(ch, e);
    // Tr(H W) >= max(rc / alpha, re / (1 - (1 + re) alpha)),  Tr(Z W) >= re / (1 - (1 + re) alpha)
    const double edge_need = re / (1.0 - (1.0 + re) * alpha);
    const double center_need = std::max(rc / alpha, edge_need);
    const double oracle =
        test::two_constraint_sdr_oracle(g.H_c[0] / center_need, g.Z_e[0] / edge_need);
    CHECK(r.objective == doctest::Approx(oracle).epsilon(1e-6));
  }
}

TEST_CASE("fixed-alpha SDR rejects coefficients outside (0, 1)") {
  const LiteralInstance s = literal_instance();
  CHECK_THROWS_AS(build_fixed_alpha_sdr(s.ch, s.e, std::vector<double>{0.0, 0.5}, s.config),
                  DomainError);
  CHECK_THROWS_AS(build_fixed_alpha_sdr(s.ch, s.e, std::vector<double>{0.5}, s.config),
                  ModelingError);
}

TEST_CASE("fixed points from beamformers make the bounds tight") {
  const LiteralInstance s = literal_instance();
  const std::vector<cvec> w{s.ch.h_center[0] * 30.0, s.ch.h_center[1] * 30.0};
  const std::vector<double> alpha{0.2, 0.3};
  const FixedPoints fp = fixed_points_from_beamformers(s.ch, s.e, w, alpha);
  for (int k = 0; k < 2; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const double te = std::norm(effective_edge_channel(s.ch, s.e[ku], k).dot(w[ku])) /
                      s.ch.noise_power;
    const double tc = std::norm(s.ch.h_center[ku].dot(w[ku])) / s.ch.noise_power;
    CHECK(am_gm_upper(alpha[ku], te, fp.c[ku]) == doctest::Approx(alpha[ku] * te));
    CHECK(am_gm_upper(alpha[ku], tc, fp.d[ku]) == doctest::Approx(alpha[ku] * tc));
    CHECK(fp.t0[ku] * fp.t0[ku] == doctest::Approx(alpha[ku] * tc));
  }
}

TEST_CASE("fixed-point update clamps vanishing power coefficients") {
  const LiteralInstance s = literal_instance();
  BeamformingSolution bs;
  bs.W = {cmat::Identity(2, 2), cmat::Identity(2, 2)};
  bs.alpha = {0.0, 0.4};
  bs.t = {1.0, 1.0};
  bool degenerate = false;
  const FixedPoints fp = update_fixed_points(bs, s.ch, s.e, &degenerate);
  CHECK(degenerate);
  CHECK(std::isfinite(fp.c[0]));
  bs.alpha = {0.3, 0.4};
  update_fixed_points(bs, s.ch, s.e, &degenerate);
  CHECK_FALSE(degenerate);
}

TEST_CASE("initial point search reaches q = 0 and the SCA objective never increases") {
  SystemConfig c;
  c.irs_elements = 8;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const ChannelSet ch = generate_channels(c, seed);
    Rng rng(seed);
    const std::vector<cvec> e = random_phases(2, 8, rng);
    const auto [fp, trace] = find_initial_points(ch, e, c, rng);
    CHECK(trace.converged);
    CHECK(trace.q_history.back() <= c.eps_init);
    const BeamformingSolution bs = optimize_beamforming(ch, e, fp, c);
    for (std::size_t i = 1; i < bs.objective_trace.size(); ++i)
      CHECK(bs.objective_trace[i] <= bs.objective_trace[i - 1] * (1.0 + 1e-6));
    CHECK(worst_lifted_qos(ch, e, bs, c) >= -1e-5);
  }
}

}
