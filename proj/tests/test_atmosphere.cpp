#include <doctest.h>

#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "stats.hpp"
#include "uvlink/atmosphere.hpp"
#include "uvlink/random.hpp"

using namespace uvlink;
using boost::math::quadrature::gauss_kronrod;

namespace {

constexpr double kPi = std::numbers::pi;

double solid_angle_integral(const std::function<double(double)>& p, double lo = -1.0,
                            double hi = 1.0) {
  return 2.0 * kPi * gauss_kronrod<double, 61>::integrate(p, lo, hi, 15, 1e-13);
}

// Henyey-Greenstein quantile, the f = 0 special case of the Mie phase.
double hg_quantile(double xi, double g) {
  const double s = (1.0 - g * g) / (1.0 - g + 2.0 * g * xi);
  return (1.0 + g * g - s * s) / (2.0 * g);
}

}  // namespace

TEST_CASE("default coefficients and derived quantities") {
  const AtmosphereParams p;
  CHECK(p.k_s() == doctest::Approx(0.4956e-3).epsilon(1e-12));
  CHECK(p.k_e() == doctest::Approx(1.2356e-3).epsilon(1e-12));
  CHECK(p.albedo() == doctest::Approx(0.4956 / 1.2356).epsilon(1e-12));
  CHECK(p.rayleigh_weight() + p.mie_weight() == doctest::Approx(1.0));
}

TEST_CASE("phase functions integrate to one") {
  const AtmosphereParams p;
  CHECK(solid_angle_integral([&](double mu) { return rayleigh_phase(mu, p.gamma); }) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(solid_angle_integral([&](double mu) { return mie_phase(mu, p.g, p.f); }) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(solid_angle_integral([&](double mu) { return combined_phase(mu, p); }) ==
        doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("phase function limits") {
  // gamma = 0: classical 3(1 + mu^2) / (16 pi).
  CHECK(rayleigh_phase(0.3, 0.0) == doctest::Approx(3.0 * 1.09 / (16.0 * kPi)));
  // g = 0, f = 0: isotropic.
  CHECK(mie_phase(-0.7, 0.0, 0.0) == doctest::Approx(1.0 / (4.0 * kPi)));
  // Rayleigh weight 1 reduces the mixture to the Rayleigh term.
  AtmosphereParams p;
  p.k_s_mie = 0.0;
  CHECK(combined_phase(0.4, p) == doctest::Approx(rayleigh_phase(0.4, p.gamma)));
}

TEST_CASE("phase function domain errors") {
  CHECK_THROWS_AS(rayleigh_phase(1.5, 0.017), std::domain_error);
  CHECK_THROWS_AS(mie_phase(0.0, 1.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(mie_phase(-1.01, 0.7, 0.5), std::domain_error);
}

TEST_CASE("closed-form CDF matches quadrature") {
  const AtmosphereParams p;
  for (double mu = -1.0; mu <= 1.0; mu += 0.0625) {
    const double q =
        mu <= -1.0 ? 0.0 : solid_angle_integral([&](double m) { return combined_phase(m, p); }, -1.0, mu);
    CHECK(combined_phase_cdf(mu, p) == doctest::Approx(q).epsilon(1e-11));
  }
}

TEST_CASE("atmosphere validation names the field") {
  AtmosphereParams p;
  p.g = 1.0;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("atmosphere.g"), std::invalid_argument);
  p = {};
  p.k_a = -1.0;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("atmosphere.k_a"), std::invalid_argument);
  p = {};
  p.k_s_rayleigh = 0.0;
  p.k_s_mie = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("scattering sampler inverts the CDF") {
  const AtmosphereParams p;
  const ScatteringSampler sampler(p);
  CHECK(sampler.sample(0.0) == -1.0);
  CHECK(sampler.sample(1.0) == 1.0);
  for (double xi = 0.001; xi < 1.0; xi += 0.0371) {
    CHECK(combined_phase_cdf(sampler.sample(xi), p) == doctest::Approx(xi).epsilon(1e-10));
  }
}

TEST_CASE("f = 0 Mie-only sampler reproduces the HG quantile") {
  AtmosphereParams p;
  p.f = 0.0;
  p.k_s_rayleigh = 0.0;
  const ScatteringSampler sampler(p);
  for (double xi = 0.0005; xi < 1.0; xi += 0.01) {
    CHECK(sampler.sample(xi) == doctest::Approx(hg_quantile(xi, p.g)).epsilon(1e-6));
  }
}

TEST_CASE("sampled cosines follow the combined density") {
  const AtmosphereParams p;
  const ScatteringSampler sampler(p);
  Xoshiro256pp rng(5);
  std::vector<double> mu(100000);
  for (auto& m : mu) m = sampler.sample(rng.uniform());
  const auto cdf = [&](double x) { return combined_phase_cdf(x, p); };
  CHECK(testing::ks_test(mu, cdf).p_value > 0.01);
  CHECK(testing::chi_square_test(mu, cdf, -1.0, 1.0, 100).p_value > 0.01);
}

TEST_CASE("free path and azimuth") {
  CHECK(sample_free_distance(1.0, 2.0) == 0.0);
  CHECK(sample_free_distance(std::exp(-1.0), 2.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(sample_free_distance(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(sample_free_distance(0.5, 0.0), std::domain_error);

  const AtmosphereParams p;
  Xoshiro256pp rng(11);
  std::vector<double> d(100000), phi(100000);
  double sum = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = sample_free_distance(rng.uniform_open(), p.k_e());
    phi[i] = sample_azimuth(rng.uniform());
    sum += phi[i];
  }
  CHECK(testing::ks_test(d, [&](double x) { return -std::expm1(-p.k_e() * x); }).p_value > 0.01);
  CHECK(sum / 1e5 == doctest::Approx(kPi).epsilon(0.01));
}
