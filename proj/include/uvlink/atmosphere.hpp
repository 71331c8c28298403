#pragma once

#include <vector>

namespace uvlink {

/// Scattering and absorption properties of the propagation medium.
///
/// Defaults are the 266 nm long-range link parameters. `f` and `gamma` have no
/// measured value for this link; 0.5 and 0.017 are common choices in the UV
/// NLOS literature and can be overridden from the config file.
struct AtmosphereParams {
  double k_a = 0.74e-3;             ///< absorption coefficient, 1/m
  double k_s_rayleigh = 0.2456e-3;  ///< Rayleigh scattering coefficient, 1/m
  double k_s_mie = 0.25e-3;         ///< Mie scattering coefficient, 1/m
  double g = 0.72;                  ///< Mie asymmetry, mean of cos(theta_s)
  double f = 0.5;                   ///< Mie shape parameter
  double gamma = 0.017;             ///< Rayleigh shape parameter
  double wavelength = 266e-9;       ///< m

  double k_s() const noexcept { return k_s_rayleigh + k_s_mie; }
  double k_e() const noexcept { return k_a + k_s(); }
  /// Single-scattering albedo k_s / k_e.
  double albedo() const noexcept { return k_s() / k_e(); }
  double rayleigh_weight() const noexcept { return k_s_rayleigh / k_s(); }
  double mie_weight() const noexcept { return k_s_mie / k_s(); }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Rayleigh phase function, per steradian. Throws std::domain_error for
/// mu outside [-1, 1].
double rayleigh_phase(double mu, double gamma);

/// Mie phase function (Henyey-Greenstein plus a (3mu^2 - 1) correction),
/// per steradian. Throws std::domain_error for |g| >= 1 or mu outside [-1, 1].
double mie_phase(double mu, double g, double f);

/// Coefficient-weighted mixture of the Rayleigh and Mie phase functions.
double combined_phase(double mu, const AtmosphereParams& params);

/// Cumulative of combined_phase: 2*pi * integral from -1 to mu. Closed form.
double combined_phase_cdf(double mu, const AtmosphereParams& params);

/// -ln(uniform_draw) / k_e. The draw must lie in (0, 1].
double sample_free_distance(double uniform_draw, double k_e);

/// 2*pi*uniform_draw.
double sample_azimuth(double uniform_draw);

/// Inverse-CDF sampler for the scattering cosine under the combined phase
/// function. Immutable after construction and safe to share across threads.
class ScatteringSampler {
 public:
  static constexpr int kNodes = 4096;

  explicit ScatteringSampler(const AtmosphereParams& params);

  /// Returns mu in [-1, 1] with cdf(mu) == uniform_draw to ~1e-12.
  /// uniform_draw = 0 maps to -1 and 1 maps to +1 exactly.
  double sample(double uniform_draw) const;

  double density(double mu) const;  // per steradian
  double cdf(double mu) const;

  const AtmosphereParams& params() const noexcept { return params_; }

 private:
  AtmosphereParams params_;
  std::vector<double> cdf_table_;  // cdf at mu_k = -1 + 2k/(kNodes-1)
};

/// Convenience wrapper: constructs a sampler and draws one value. Prefer
/// reusing a ScatteringSampler on hot paths.
double sample_scattering_mu(double uniform_draw, const AtmosphereParams& params);

}  // namespace uvlink
