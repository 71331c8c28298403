#include <doctest.h>

#include <omp.h>

#include <numbers>

#include "uvlink/channel.hpp"

using namespace uvlink;

namespace {

TransportOptions small_run(std::uint64_t photons = 20000, std::uint64_t seed = 3) {
  TransportOptions o;
  o.photons = photons;
  o.seed = seed;
  return o;
}

}  // namespace

TEST_CASE("geometry axes and validation") {
  Geometry g;
  CHECK(norm(g.tx_axis()) == doctest::Approx(1.0));
  CHECK(g.tx_axis().x > 0.0);
  CHECK(g.rx_axis().x < 0.0);  // receiver looks back toward the transmitter
  CHECK(g.rx_axis().z == doctest::Approx(std::sin(std::numbers::pi / 3)));

  g.baseline_distance = 0.0;
  CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("geometry.baseline_distance"),
                       std::invalid_argument);
  g = {};
  g.rx_fov = 0.0;
  CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("geometry.rx_fov"), std::invalid_argument);

  TransportOptions o;
  o.photons = 0;
  CHECK_THROWS_WITH_AS(o.validate(), doctest::Contains("transport.photons"),
                       std::invalid_argument);
}

TEST_CASE("local estimate against the hand formula") {
  const Geometry g;
  const AtmosphereParams atm;
  // Scatter point on the receiver axis, 400 m out, photon travelling straight up.
  const Vec3 at = g.receiver_position() + g.rx_axis() * 400.0;
  const Vec3 up{0.0, 0.0, 1.0};
  const double mu = dot(up, -g.rx_axis());
  const double expected =
      combined_phase(mu, atm) * g.aperture_area / (400.0 * 400.0) * std::exp(-atm.k_e() * 400.0);
  CHECK(local_estimate_arrival(at, up, g, atm) == doctest::Approx(expected).epsilon(1e-12));

  // Behind the receiver, outside its FOV.
  const Vec3 behind = g.receiver_position() - g.rx_axis() * 400.0;
  CHECK(local_estimate_arrival(behind, up, g, atm) == 0.0);
  CHECK_THROWS(local_estimate_arrival(g.receiver_position(), up, g, atm));
}

TEST_CASE("threshold support and broadening") {
  const std::vector<double> v{0.0, 0.001, 0.5, 1.0, 0.2, 0.005, 0.0};
  const auto r = threshold_support(v, 0.01);
  CHECK(r.first == 2);
  CHECK(r.last == 4);
  CHECK_THROWS(threshold_support(std::vector<double>(4, 0.0), 0.01));
  CHECK_THROWS(threshold_support(v, 0.0));

  ImpulseResponse rect;
  rect.bin_width = 1e-6;
  rect.time_origin = 2e-6;
  rect.bins = {0.0, 1.0, 1.0, 1.0, 0.0};
  const auto b = pulse_broadening(rect);
  CHECK(b.left_boundary == doctest::Approx(3e-6));
  CHECK(b.right_boundary == doctest::Approx(6e-6));
  CHECK(b.broadening == doctest::Approx(3e-6));
}

TEST_CASE("averaging pads and checks bin widths") {
  ImpulseResponse a, b;
  a.bins = {1.0, 2.0};
  b.bins = {3.0, 4.0, 6.0};
  const ImpulseResponse m = average_impulse_responses(std::vector{a, b});
  REQUIRE(m.bins.size() == 3);
  CHECK(m.bins[0] == 2.0);
  CHECK(m.bins[2] == 3.0);
  b.bin_width = 40e-9;
  CHECK_THROWS(average_impulse_responses(std::vector{a, b}));
  CHECK_THROWS(average_impulse_responses(std::vector<ImpulseResponse>{}));
}

TEST_CASE("unreachable receiver gives an all-zero response") {
  Geometry g;
  g.tx_elevation = std::numbers::pi / 2;
  g.rx_elevation = std::numbers::pi / 2;
  // Parallel vertical axes only meet beyond 1000 baselines with this FOV.
  g.rx_fov = 5e-4;
  g.tx_divergence = 0.0;
  CHECK_FALSE(single_scatter_reachable(g));
  CHECK(single_scatter_reachable(Geometry{}));
  const ImpulseResponse ir = simulate_impulse_response(g, AtmosphereParams{}, small_run(2000));
  CHECK_FALSE(ir.receiver_reachable);
  CHECK(ir.total() == 0.0);
}

TEST_CASE("no energy arrives before the line-of-sight time") {
  const Geometry g;
  const ImpulseResponse ir = simulate_impulse_response(g, AtmosphereParams{}, small_run());
  REQUIRE(ir.total() > 0.0);
  const double los = g.baseline_distance / kSpeedOfLight;
  for (std::size_t i = 0; i < ir.bins.size(); ++i) {
    if (ir.bin_start(i) + ir.bin_width < los) CHECK(ir.bins[i] == 0.0);
  }
}

TEST_CASE("parallel transport matches the serial reference") {
  const Geometry g;
  const AtmosphereParams atm;
  for (const auto estimator : {Estimator::kLocal, Estimator::kAnalog}) {
    TransportOptions o = small_run(30000, 17);
    o.estimator = estimator;
    if (estimator == Estimator::kAnalog) o.photons = 5000;
    const ImpulseResponse s = serial::simulate_impulse_response(g, atm, o);
    const ImpulseResponse p = simulate_impulse_response(g, atm, o);
    REQUIRE(s.bins.size() == p.bins.size());
    for (std::size_t i = 0; i < s.bins.size(); ++i) {
      CHECK(p.bins[i] == doctest::Approx(s.bins[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("transport is bit-identical across thread counts") {
  const Geometry g;
  const AtmosphereParams atm;
  const TransportOptions o = small_run(3 * 4096 + 77, 9);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const ImpulseResponse one = simulate_impulse_response(g, atm, o);
  omp_set_num_threads(3);
  const ImpulseResponse three = simulate_impulse_response(g, atm, o);
  omp_set_num_threads(saved);
  CHECK(one.bins == three.bins);
}

TEST_CASE("different seeds give different responses") {
  const ImpulseResponse a = simulate_impulse_response(Geometry{}, AtmosphereParams{}, small_run(5000, 1));
  const ImpulseResponse b = simulate_impulse_response(Geometry{}, AtmosphereParams{}, small_run(5000, 2));
  CHECK(a.bins != b.bins);
}

TEST_CASE("broadening sweep reuses random numbers across elevations") {
  const std::vector<double> elevations{std::numbers::pi / 3, std::numbers::pi / 3};
  const auto rows = broadening_elevation_sweep(Geometry{}, AtmosphereParams{}, elevations, 2,
                                               small_run(5000));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].broadening.broadening == rows[1].broadening.broadening);
  CHECK(rows[0].total_arrival == rows[1].total_arrival);
  CHECK_THROWS(broadening_elevation_sweep(Geometry{}, AtmosphereParams{}, std::vector<double>{}, 2,
                                          small_run(5000)));
}
