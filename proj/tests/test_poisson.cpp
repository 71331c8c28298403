#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>

#include "uvlink/poisson.hpp"

using namespace uvlink;

namespace {

// P(N <= n) = Q(n + 1, mean), P(N > n) = P(n + 1, mean).
double cdf_oracle(std::uint64_t n, double mean) {
  return boost::math::gamma_q(static_cast<double>(n) + 1.0, mean);
}
double sf_oracle(std::uint64_t n, double mean) {
  return boost::math::gamma_p(static_cast<double>(n) + 1.0, mean);
}

}  // namespace

TEST_CASE("log pmf against lgamma") {
  for (const double mean : {0.1, 1.0, 7.5, 50.0, 1e3, 1e5}) {
    for (const std::uint64_t n : {0ull, 1ull, 5ull, 49ull, 1000ull, 100200ull}) {
      const double ref = static_cast<double>(n) * std::log(mean) - mean -
                         std::lgamma(static_cast<double>(n) + 1.0);
      CHECK(poisson_log_pmf(n, mean) == doctest::Approx(ref).epsilon(1e-10));
    }
  }
  CHECK(poisson_log_pmf(0, 0.0) == 0.0);
  CHECK(std::isinf(poisson_log_pmf(3, 0.0)));
}

TEST_CASE("tails against the regularized incomplete gamma") {
  for (const double mean : {0.01, 0.5, 3.0, 50.0, 100.0, 2500.0, 5e4, 1e6}) {
    for (const double z : {-30.0, -6.0, -2.0, 0.0, 1.5, 5.0, 30.0}) {
      const double x = mean + z * std::sqrt(mean);
      if (x < 0.0) continue;
      const auto n = static_cast<std::uint64_t>(x);
      const double c = cdf_oracle(n, mean);
      const double s = sf_oracle(n, mean);
      if (c > 1e-300) CHECK(poisson_cdf(n, mean) == doctest::Approx(c).epsilon(1e-12));
      if (s > 1e-300) CHECK(poisson_sf(n, mean) == doctest::Approx(s).epsilon(1e-12));
    }
  }
}

TEST_CASE("tail edge cases") {
  CHECK(poisson_cdf(0, 0.0) == 1.0);
  CHECK(poisson_sf(0, 0.0) == 0.0);
  CHECK(poisson_cdf(0, 2.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(poisson_cdf(10, 3.0) + poisson_sf(10, 3.0) == doctest::Approx(1.0).epsilon(1e-15));
}
