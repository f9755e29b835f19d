#include <algorithm>

#include <doctest.h>

#include "irsnoma/errors.hpp"
#include "irsnoma/orchestration.hpp"
#include "irsnoma/phase.hpp"
#include "support.hpp"

using namespace irsnoma;

namespace {

SystemConfig small_config() {
  SystemConfig c;
  c.bs_antennas = 4;
  c.irs_elements = 6;
  c.rand_trials = 50;
  c.alpha_grid = {0.1, 0.3};
  return c;
}

}  // namespace

TEST_SUITE("orchestration") {

TEST_CASE("algorithm names round-trip") {
  for (Algorithm a : {Algorithm::Alternating, Algorithm::PartialExhaustive,
                      Algorithm::RandomPhase, Algorithm::Oma})
    CHECK(parse_algorithm(to_string(a)) == a);
  CHECK_THROWS_AS(parse_algorithm("greedy"), ConfigError);
}

TEST_CASE("every algorithm returns a solution that re-evaluates as feasible") {
  SystemConfig c = small_config();
  for (std::uint64_t seed = 1; seed <= 2; ++seed) {
    c.seed = seed;
    const ChannelSet ch = generate_channels(c, seed);
    for (Algorithm a : {Algorithm::Alternating, Algorithm::PartialExhaustive,
                        Algorithm::RandomPhase, Algorithm::Oma}) {
      CAPTURE(to_string(a));
      const auto [s, trace] = run_algorithm(a, ch, c);
      const RateReport r = evaluate_full_solution(ch, c, s);
      CHECK(r.margin >= -1e-6);
      CHECK(s.power_watts == full_solution_power(s));
      CHECK(s.power_watts > 0.0);
      CHECK(s.solver_calls > 0);
      if (a != Algorithm::Oma) {
        for (double alpha : s.alpha) CHECK((alpha >= 0.0 && alpha <= 1.0));
        for (const cvec& e : s.e) CHECK((e.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
      }
    }
  }
}

TEST_CASE("alternating optimization survives an SCA program solved near its accuracy floor") {
  SystemConfig c;
  c.irs_elements = 8;
  c.seed = 39;
  const ChannelSet ch = generate_channels(c, 39);
  const auto [s, trace] = run_alternating(ch, c);
  CHECK(evaluate_full_solution(ch, c, s).margin >= -1e-6);
  CHECK_FALSE(s.degraded);
}

TEST_CASE("alternating optimization tracks the best incumbent") {
  SystemConfig c = small_config();
  c.seed = 3;
  const ChannelSet ch = generate_channels(c, 3);
  const auto [s, trace] = run_alternating(ch, c);
  REQUIRE_FALSE(trace.outer_objective.empty());
  for (std::size_t i = 1; i < trace.outer_objective.size(); ++i)
    CHECK(trace.outer_objective[i] <= trace.outer_objective[i - 1]);
  CHECK(s.power_watts ==
        *std::min_element(trace.outer_objective.begin(), trace.outer_objective.end()));
  CHECK(trace.q_traces.size() == trace.beam_traces.size());
  CHECK(s.outer_iters == static_cast<int>(trace.outer_objective.size()));
}

TEST_CASE("runs are deterministic in the seed") {
  SystemConfig c = small_config();
  c.seed = 5;
  const ChannelSet ch = generate_channels(c, 5);
  for (Algorithm a : {Algorithm::Alternating, Algorithm::RandomPhase}) {
    const double p1 = run_algorithm(a, ch, c).first.power_watts;
    const double p2 = run_algorithm(a, ch, c).first.power_watts;
    CHECK(p1 == p2);
  }
}

TEST_CASE("OMA with one cluster and one element matches the closed form") {
  SystemConfig c;
  c.clusters = 1;
  c.bs_antennas = 3;
  c.irs_elements = 1;
  c.rate_center = {1.0};
  c.rate_edge = {0.75};
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const ChannelSet ch = generate_channels(c, seed);
    const double s2 = ch.noise_power;
    // each slot carries twice the rate; a single element's phase cannot change |z|
    const double center = (std::pow(2.0, 2.0) - 1.0) * s2 / ch.h_center[0].squaredNorm();
    const double edge = (std::pow(2.0, 1.5) - 1.0) * s2 /
                        (std::norm(ch.h_edge[0](0)) * ch.g_irs[0].squaredNorm());
    const FullSolution s = oma_baseline(ch, c);
    CHECK(s.power_watts == doctest::Approx(0.5 * (center + edge)).epsilon(1e-6));
    CHECK(evaluate_full_solution(ch, c, s).margin >= -1e-9);
  }
}

TEST_CASE("shared-coefficient programs validate their coefficient") {
  SystemConfig c = small_config();
  const ChannelSet ch = generate_channels(c, 1);
  Rng rng(1);
  const std::vector<cvec> e = random_phases(2, 6, rng);
  CHECK_THROWS_AS(build_p6(ch, e, 1.0, c), DomainError);
  const std::vector<cvec> w{cvec::Ones(4), cvec::Ones(4)};
  CHECK_THROWS_AS(build_p7(ch, w, 0.0, c), DomainError);
  CHECK(conic::solve(build_p6(ch, e, 0.2, c)).optimal());
}

TEST_CASE("complexity model") {
  CHECK(sdr_cost(4, 0.5) == doctest::Approx(std::pow(4.0, 4.5)));
  CHECK_THROWS_AS(sdr_cost(0, 1e-3), DomainError);
  SystemConfig c;
  c.bs_antennas = 8;
  c.irs_elements = 16;
  AlgorithmTrace t;
  t.init_solves = 3;
  t.beam_solves = 4;
  t.phase_solves = 2;
  const ComplexityReport rep = complexity_estimate(c, t, 1e-6);
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.rows[0].size == 16);
  CHECK(rep.rows[2].size == 32);
  CHECK(rep.total == doctest::Approx(7 * sdr_cost(16, 1e-6) + 2 * sdr_cost(32, 1e-6)));
}

}
