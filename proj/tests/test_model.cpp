#include <cmath>
#include <numbers>

#include <doctest.h>

#include "irsnoma/errors.hpp"
#include "irsnoma/model.hpp"
#include "support.hpp"

using namespace irsnoma;

TEST_SUITE("model") {

TEST_CASE("noise power of -80 dBm/Hz over 100 MHz is 1 mW") {
  CHECK(noise_power(1e8, -80.0) == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(SystemConfig{}.noise_power() == doctest::Approx(1e-3).epsilon(1e-12));
}

TEST_CASE("sinr threshold is 2^R - 1") {
  CHECK(sinr_threshold(1.0) == doctest::Approx(1.0));
  CHECK(sinr_threshold(1.5) == doctest::Approx(std::pow(2.0, 1.5) - 1.0));
}

TEST_CASE("config validation rejects bad scenarios") {
  SystemConfig c;
  c.bs_antennas = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SystemConfig{};
  c.rate_center = {1.0};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_NOTHROW(c.normalized().validate());
  c = SystemConfig{};
  c.alpha_grid = {0.0};
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("channel generation is deterministic and sized by the config") {
  SystemConfig c;
  c.irs_elements = 4;
  c.bs_antennas = 3;
  const ChannelSet a = generate_channels(c, 7);
  const ChannelSet b = generate_channels(c, 7);
  const ChannelSet d = generate_channels(c, 8);
  CHECK(a.clusters() == 2);
  CHECK(a.bs_antennas() == 3);
  CHECK(a.irs_elements() == 4);
  CHECK(a.g_irs[1].rows() == 4);
  CHECK(a.g_irs[1].cols() == 3);
  CHECK(a.h_center[0] == b.h_center[0]);
  CHECK(a.g_irs[1] == b.g_irs[1]);
  CHECK(a.h_center[0] != d.h_center[0]);
  CHECK_NOTHROW(a.validate(c));
}

TEST_CASE("path loss scales channel power with distance") {
  SystemConfig c;
  c.irs_elements = 200;
  c.bs_antennas = 200;
  c.clusters = 2;
  const ChannelSet ch = generate_channels(c, 3);
  // E|h|^2 = d^-a per entry
  const double center = ch.h_center[0].squaredNorm() / 200.0;
  const double edge = ch.h_edge[0].squaredNorm() / 200.0;
  const double irs = ch.g_irs[0].squaredNorm() / (200.0 * 200.0);
  CHECK(center == doctest::Approx(std::pow(10.0, -2.0)).epsilon(0.2));
  CHECK(edge == doctest::Approx(std::pow(10.0, -2.0)).epsilon(0.2));
  CHECK(irs == doctest::Approx(std::pow(50.0, -2.2)).epsilon(0.05));
}

TEST_CASE("edge channel follows the conjugated-diagonal convention") {
  Rng rng(11);
  SystemConfig c;
  c.irs_elements = 5;
  c.bs_antennas = 3;
  const ChannelSet ch = generate_channels(c, 2);
  const Eigen::VectorXd theta = Eigen::VectorXd::Random(5).array() + 2.0;
  const cvec e = phases_from_angles(theta);
  const cvec w = rng.complex_normal_vector(3);
  // reflected signal h_e^H diag(exp(j theta)) G w computed directly
  std::complex<double> direct = 0.0;
  const cvec gw = ch.g_irs[1] * w;
  for (int n = 0; n < 5; ++n)
    direct += std::conj(ch.h_edge[1](n)) * std::polar(1.0, theta(n)) * gw(n);
  const cvec z = effective_edge_channel(ch, e, 1);
  CHECK(std::abs(z.dot(w) - direct) < 1e-12);
  CHECK((angles_from_phases(e) - theta).norm() < 1e-12);
}

TEST_CASE("non-unit-modulus phases are rejected") {
  SystemConfig c;
  c.irs_elements = 2;
  const ChannelSet ch = generate_channels(c, 1);
  cvec e = cvec::Ones(2);
  e(1) = 0.5;
  CHECK_THROWS_AS(effective_edge_channel(ch, e, 0), DomainError);
}

TEST_CASE("sinr formulas against hand-computed single-cluster values") {
  ChannelSet ch;
  ch.noise_power = 0.5;
  ch.h_center = {cvec::Constant(1, 2.0)};
  ch.g_irs = {cmat::Constant(1, 1, 1.0)};
  ch.h_edge = {cvec::Constant(1, 3.0)};
  const std::vector<cvec> w{cvec::Constant(1, 1.0)};
  const cvec e = cvec::Ones(1);
  // |h w|^2 = 4, |z w|^2 = 9, alpha = 0.25
  CHECK(sinr_center(ch, w, 0.25, 0) == doctest::Approx(0.25 * 4 / 0.5));
  CHECK(sinr_center_decoding_edge(ch, w, 0.25, 0) == doctest::Approx(0.75 * 4 / (1 + 0.5)));
  CHECK(sinr_edge(ch, w, 0.25, e, 0) == doctest::Approx(0.75 * 9 / (2.25 + 0.5)));
  SystemConfig c;
  c.clusters = 1;
  c.bs_antennas = 1;
  c.irs_elements = 1;
  c.rate_center = {1.0};
  c.rate_edge = {1.0};
  const double a = 0.25;
  const RateReport r = evaluate_solution(ch, c, w, std::vector<double>{a}, std::vector<cvec>{e});
  CHECK(r.rate_c[0] == doctest::Approx(std::log2(3.0)));
  CHECK(r.rate_e[0] == doctest::Approx(std::log2(1.0 + 2.0)));
  CHECK(r.feasible);
  CHECK(total_power(w) == doctest::Approx(1.0));
}

}
