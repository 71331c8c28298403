#include "uvlink/atmosphere.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace uvlink {
namespace {

constexpr double kPi = std::numbers::pi;

void require_mu(double mu) {
  if (!(mu >= -1.0 && mu <= 1.0)) {
    throw std::domain_error("scattering cosine mu=" + std::to_string(mu) +
                            " outside [-1, 1]");
  }
}

void require_field(bool ok, const char* field, const char* what) {
  if (!ok) {
    throw std::invalid_argument(std::string("atmosphere.") + field + ": " + what);
  }
}

// Unchecked kernels shared by the public functions and the sampler.
double rayleigh_unchecked(double mu, double gamma) {
  return 3.0 * (1.0 + 3.0 * gamma + (1.0 - gamma) * mu * mu) /
         (16.0 * kPi * (1.0 + 2.0 * gamma));
}

double mie_unchecked(double mu, double g, double f) {
  const double g2 = g * g;
  const double hg = 1.0 / std::pow(1.0 + g2 - 2.0 * g * mu, 1.5);
  const double shape = f * (3.0 * mu * mu - 1.0) / (2.0 * std::pow(1.0 + g2, 1.5));
  return (1.0 - g2) / (4.0 * kPi) * (hg + shape);
}

double combined_unchecked(double mu, const AtmosphereParams& p) {
  return p.rayleigh_weight() * rayleigh_unchecked(mu, p.gamma) +
         p.mie_weight() * mie_unchecked(mu, p.g, p.f);
}

double rayleigh_cdf(double mu, double gamma) {
  return 3.0 / (8.0 * (1.0 + 2.0 * gamma)) *
         ((1.0 + 3.0 * gamma) * (mu + 1.0) +
          (1.0 - gamma) * (mu * mu * mu + 1.0) / 3.0);
}

double mie_cdf(double mu, double g, double f) {
  // Henyey-Greenstein part written without the 1/g factor so g -> 0 is exact.
  const double s = std::sqrt(1.0 + g * g - 2.0 * g * mu);
  const double hg = (1.0 - g) * (1.0 + mu) / (s * (1.0 + g + s));
  const double shape =
      (1.0 - g * g) * f / (4.0 * std::pow(1.0 + g * g, 1.5)) * (mu * mu * mu - mu);
  return hg + shape;
}

double node_mu(int k) {
  return -1.0 + 2.0 * static_cast<double>(k) /
                    static_cast<double>(ScatteringSampler::kNodes - 1);
}

}  // namespace

void AtmosphereParams::validate() const {
  require_field(std::isfinite(k_a) && k_a >= 0.0, "k_a", "must be >= 0");
  require_field(std::isfinite(k_s_rayleigh) && k_s_rayleigh >= 0.0, "k_s_rayleigh",
                "must be >= 0");
  require_field(std::isfinite(k_s_mie) && k_s_mie >= 0.0, "k_s_mie", "must be >= 0");
  require_field(k_s_rayleigh + k_s_mie > 0.0, "k_s_rayleigh",
                "total scattering coefficient must be > 0");
  require_field(std::isfinite(g) && std::abs(g) < 1.0, "g", "must satisfy |g| < 1");
  require_field(std::isfinite(gamma) && gamma > -1.0 / 3.0, "gamma",
                "must be > -1/3 for a non-negative Rayleigh phase function");
  require_field(std::isfinite(f), "f", "must be finite");
  require_field(std::isfinite(wavelength) && wavelength > 0.0, "wavelength",
                "must be > 0");
  for (int k = 0; k <= 256; ++k) {
    const double mu = -1.0 + k / 128.0;
    require_field(mie_unchecked(mu, g, f) >= 0.0, "f",
                  "Mie phase function goes negative for this (g, f)");
  }
}

double rayleigh_phase(double mu, double gamma) {
  require_mu(mu);
  return rayleigh_unchecked(mu, gamma);
}

double mie_phase(double mu, double g, double f) {
  require_mu(mu);
  if (!(std::abs(g) < 1.0)) {
    throw std::domain_error("Mie asymmetry |g| must be < 1");
  }
  return mie_unchecked(mu, g, f);
}

double combined_phase(double mu, const AtmosphereParams& params) {
  require_mu(mu);
  if (!(std::abs(params.g) < 1.0)) {
    throw std::domain_error("Mie asymmetry |g| must be < 1");
  }
  return combined_unchecked(mu, params);
}

double combined_phase_cdf(double mu, const AtmosphereParams& params) {
  require_mu(mu);
  return params.rayleigh_weight() * rayleigh_cdf(mu, params.gamma) +
         params.mie_weight() * mie_cdf(mu, params.g, params.f);
}

double sample_free_distance(double uniform_draw, double k_e) {
  if (!(uniform_draw > 0.0 && uniform_draw <= 1.0)) {
    throw std::domain_error("free-path draw must lie in (0, 1]");
  }
  if (!(k_e > 0.0)) {
    throw std::domain_error("extinction coefficient must be > 0");
  }
  return -std::log(uniform_draw) / k_e;
}

double sample_azimuth(double uniform_draw) { return 2.0 * kPi * uniform_draw; }

ScatteringSampler::ScatteringSampler(const AtmosphereParams& params)
    : params_(params), cdf_table_(kNodes) {
  params_.validate();
  for (int k = 0; k < kNodes; ++k) {
    cdf_table_[k] = cdf(node_mu(k));
  }
  cdf_table_.front() = 0.0;
  cdf_table_.back() = 1.0;
}

double ScatteringSampler::density(double mu) const {
  return combined_unchecked(mu, params_);
}

double ScatteringSampler::cdf(double mu) const {
  return params_.rayleigh_weight() * rayleigh_cdf(mu, params_.gamma) +
         params_.mie_weight() * mie_cdf(mu, params_.g, params_.f);
}

double ScatteringSampler::sample(double uniform_draw) const {
  if (uniform_draw <= 0.0) return -1.0;
  if (uniform_draw >= 1.0) return 1.0;

  const auto it = std::upper_bound(cdf_table_.begin(), cdf_table_.end(), uniform_draw);
  const int k = std::clamp(static_cast<int>(it - cdf_table_.begin()) - 1, 0, kNodes - 2);
  double lo = node_mu(k);
  double hi = node_mu(k + 1);
  const double span = cdf_table_[k + 1] - cdf_table_[k];
  double mu = span > 0.0 ? lo + (hi - lo) * (uniform_draw - cdf_table_[k]) / span
                         : 0.5 * (lo + hi);

  // Safeguarded Newton on the closed-form CDF; falls back to bisection when a
  // step leaves the bracket.
  for (int iter = 0; iter < 60; ++iter) {
    const double residual = cdf(mu) - uniform_draw;
    if (std::abs(residual) < 1e-14) break;
    if (residual > 0.0) {
      hi = mu;
    } else {
      lo = mu;
    }
    const double slope = 2.0 * kPi * density(mu);
    double next = slope > 0.0 ? mu - residual / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo < 1e-16) break;
    mu = next;
  }
  return std::clamp(mu, -1.0, 1.0);
}

double sample_scattering_mu(double uniform_draw, const AtmosphereParams& params) {
  return ScatteringSampler(params).sample(uniform_draw);
}

}  // namespace uvlink
