#include <doctest.h>

#include <omp.h>

#include <boost/math/special_functions/gamma.hpp>

#include "uvlink/detection.hpp"
#include "uvlink/random.hpp"

using namespace uvlink;

namespace {

// Error sum for threshold n, straight from the incomplete gamma function.
double error_oracle(double lambda_s, double lambda_b, std::uint64_t n) {
  if (n == 0) return 0.5;
  const double a = static_cast<double>(n);
  const double miss = boost::math::gamma_q(a, lambda_s + lambda_b);
  const double false_alarm = lambda_b > 0.0 ? boost::math::gamma_p(a, lambda_b) : 0.0;
  return 0.5 * (miss + false_alarm);
}

std::uint64_t brute_force_threshold(double lambda_s, double lambda_b, std::uint64_t limit) {
  std::uint64_t best = 0;
  double best_err = error_oracle(lambda_s, lambda_b, 0);
  for (std::uint64_t n = 1; n <= limit; ++n) {
    const double e = error_oracle(lambda_s, lambda_b, n);
    if (e < best_err) {
      best_err = e;
      best = n;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("ML threshold examples") {
  CHECK(ml_threshold({5.0, 0.0, 1e-3}) == 1);
  CHECK(ml_threshold({0.0, 5e4, 1e-3}) == 0);
  const OokOperatingPoint p{50.0, 5e4, 1e-3};
  CHECK(p.lambda_b() == doctest::Approx(50.0));
  CHECK(ml_threshold(p) == brute_force_threshold(50.0, 50.0, 300));
  const auto n = ml_threshold(p);
  CHECK(n > 50);
  CHECK(n < 100);
}

TEST_CASE("ML threshold is optimal on random operating points") {
  Xoshiro256pp rng(2024);
  for (int k = 0; k < 100; ++k) {
    const double lambda_s = 0.5 + 200.0 * rng.uniform();
    const double lambda_b = 300.0 * rng.uniform();
    const OokOperatingPoint p{lambda_s, lambda_b / 1e-3, 1e-3};
    const auto n = ml_threshold(p);
    const double err = error_oracle(lambda_s, p.lambda_b(), n);
    const auto limit = static_cast<std::uint64_t>(lambda_s + lambda_b + 20 * std::sqrt(lambda_s + lambda_b) + 20);
    for (std::uint64_t m = 0; m <= limit; ++m) {
      REQUIRE(error_oracle(lambda_s, p.lambda_b(), m) >= err * (1.0 - 1e-9));
    }
    CHECK(ook_error_probability(p, n) == doctest::Approx(err).epsilon(1e-10));
  }
}

TEST_CASE("analytic BER closed forms") {
  CHECK(ook_ber_analytic({0.0, 5e4, 1e-3}) == 0.5);
  for (const double s : {0.5, 3.0, 10.0}) {
    CHECK(ook_ber_analytic({s, 0.0, 1e-3}) == doctest::Approx(0.5 * std::exp(-s)).epsilon(1e-12));
  }
  // Exact value from the Poisson tails at n = 73; it sits just above 1e-3.
  CHECK(ook_ber_analytic({50.0, 5e4, 1e-3}) == doctest::Approx(1.6798e-3).epsilon(1e-4));
  CHECK(ook_ber_analytic({50.0, 5e4, 5e-4}) < 1e-3);
  CHECK_THROWS(OokOperatingPoint{-1.0, 5e4, 1e-3}.validate());
  CHECK_THROWS(OokOperatingPoint{1.0, 5e4, 0.0}.validate());
}

TEST_CASE("Monte Carlo BER") {
  const OokOperatingPoint off{0.0, 5e4, 1e-3};
  const auto half = ook_ber_monte_carlo(off, 200000, 1);
  CHECK(std::abs(half.ber - 0.5) < 3.0 * half.standard_error);
  CHECK_THROWS(ook_ber_monte_carlo(off, 0, 1));

  const OokOperatingPoint p{20.0, 2e4, 1e-3};
  const auto mc = ook_ber_monte_carlo(p, 1'000'000, 3);
  CHECK(std::abs(mc.ber - ook_ber_analytic(p)) < 3.0 * mc.standard_error);
  CHECK(mc.trials == 1'000'000);

  const auto ref = serial::ook_ber_monte_carlo(p, 300'000, 5);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(3);
  const auto par = ook_ber_monte_carlo(p, 300'000, 5);
  omp_set_num_threads(saved);
  CHECK(par.errors == ref.errors);
}

TEST_CASE("BER curve monotonicity") {
  const std::vector<double> lambdas{50.0, 75.0, 100.0};
  const std::vector<double> windows{1e-5, 1e-4, 5e-4, 1e-3, 5e-3, 1e-2};
  const auto grid = ber_curve(lambdas, 5e4, windows);
  REQUIRE(grid.size() == 18);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    for (std::size_t j = 1; j < windows.size(); ++j) {
      CHECK(grid[i * windows.size() + j].ber >= grid[i * windows.size() + j - 1].ber);
    }
  }
  for (std::size_t j = 0; j < windows.size(); ++j) {
    for (std::size_t i = 1; i < lambdas.size(); ++i) {
      CHECK(grid[i * windows.size() + j].ber <= grid[(i - 1) * windows.size() + j].ber);
    }
  }
  CHECK_THROWS(ber_curve(std::vector<double>{}, 5e4, windows));
}

TEST_CASE("continuous laser comparison") {
  const auto same = continuous_laser_benchmark(100.0, 1.0, 5e4, 50.0, 1e-2);
  CHECK(same.pulse_ber == same.continuous_ber);
  CHECK_FALSE(same.pulse_advantage);
  CHECK(same.continuous_lambda_b == doctest::Approx(500.0));

  const auto tenth = continuous_laser_benchmark(100.0, 1.0, 5e4, 50.0, 1e-3);
  CHECK(tenth.pulse_ber <= tenth.continuous_ber);
  CHECK(tenth.pulse_advantage);
  CHECK(tenth.lambda_s == doctest::Approx(50.0));
  CHECK_THROWS(continuous_laser_benchmark(0.0, 1.0, 5e4, 50.0, 1e-3));
}
