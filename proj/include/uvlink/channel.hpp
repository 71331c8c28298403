#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "uvlink/atmosphere.hpp"
#include "uvlink/vec3.hpp"

namespace uvlink {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Coplanar NLOS link. The transmitter sits at the origin and the receiver on
/// +x at `baseline_distance`; both axes lie in the x-z plane with elevations
/// measured from the horizontal (the receiver axis tilts back toward the
/// transmitter).
struct Geometry {
  double baseline_distance = 5000.0;      ///< m
  double tx_elevation = 1.0471975511965976;  ///< pi/3
  double rx_elevation = 1.0471975511965976;  ///< pi/3
  double rx_fov = 0.5235987755982988;     ///< half-angle, pi/6
  double aperture_area = 1.77e-4;         ///< m^2
  double tx_divergence = 1e-3;            ///< beam half-angle, rad

  void validate() const;

  Vec3 receiver_position() const { return {baseline_distance, 0.0, 0.0}; }
  Vec3 tx_axis() const;
  Vec3 rx_axis() const;
};

enum class Estimator {
  kLocal,   ///< expected-value score at every scattering event
  kAnalog,  ///< score only flights that physically cross the aperture
};

struct TransportOptions {
  std::uint64_t photons = 1'000'000;
  double bin_width = 20e-9;  ///< s
  int max_scatters = 10;
  double max_time = 200e-6;  ///< arrivals later than this are dropped, s
  std::uint64_t seed = 1;
  Estimator estimator = Estimator::kLocal;
  /// Local estimates closer to the receiver than this are scored as if made
  /// at this distance. Bounds the 1/d^2 variance of the point estimator; 0
  /// disables the floor. Ignored by the analog estimator.
  double min_receiver_distance = 300.0;  ///< m

  void validate() const;
};

/// Received energy per launched photon, binned in time from pulse emission.
struct ImpulseResponse {
  double bin_width = 20e-9;
  std::vector<double> bins;
  std::uint64_t photons_launched = 0;
  double time_origin = 0.0;
  /// False when the beam and the receiver FOV share no volume; bins are then
  /// all zero.
  bool receiver_reachable = true;

  double total() const;
  double bin_start(std::size_t i) const {
    return time_origin + static_cast<double>(i) * bin_width;
  }
};

struct BroadeningResult {
  double left_boundary = 0.0;   ///< s
  double right_boundary = 0.0;  ///< s
  double broadening = 0.0;      ///< s
};

/// Index range [first, last] of samples at or above `threshold_fraction` of
/// the peak. Throws std::invalid_argument when every sample is <= 0.
struct SupportRange {
  std::size_t first = 0;
  std::size_t last = 0;
};
SupportRange threshold_support(std::span<const double> values, double threshold_fraction);

/// Expected contribution P(mu_r) * (A / d^2) * exp(-k_e d) of a scattering
/// event at `scatter_position` toward the receiver, or 0 when the receiver
/// would see the photon arrive from outside its FOV.
double local_estimate_arrival(const Vec3& scatter_position, const Vec3& incident_direction,
                              const Geometry& geometry, const AtmosphereParams& atmosphere);

/// True when some ray of the transmit cone passes through the receiver FOV
/// cone, i.e. a single-scattering path exists.
bool single_scatter_reachable(const Geometry& geometry);

/// Monte Carlo photon transport. Photon histories run in parallel with
/// OpenMP; each photon draws from its own (seed, index) substream and block
/// histograms are merged in a fixed order, so the result is bit-identical for
/// any thread count.
ImpulseResponse simulate_impulse_response(const Geometry& geometry,
                                          const AtmosphereParams& atmosphere,
                                          const TransportOptions& options);

ImpulseResponse average_impulse_responses(std::span<const ImpulseResponse> responses);

BroadeningResult pulse_broadening(const ImpulseResponse& ir, double threshold_fraction = 0.01);

struct BroadeningRow {
  double elevation = 0.0;  ///< receiver elevation, rad
  BroadeningResult broadening;
  double total_arrival = 0.0;
};

/// Receiver-elevation sweep. Realization r uses substream (seed, r) at every
/// elevation (common random numbers), so repeated elevations give identical
/// rows.
std::vector<BroadeningRow> broadening_elevation_sweep(const Geometry& geometry_base,
                                                      const AtmosphereParams& atmosphere,
                                                      std::span<const double> elevations,
                                                      int realizations_per_point,
                                                      const TransportOptions& options,
                                                      double threshold_fraction = 0.01);

namespace serial {

/// Single-threaded reference for simulate_impulse_response: photons in index
/// order accumulated into one histogram. Agrees with the parallel kernel to
/// rounding.
ImpulseResponse simulate_impulse_response(const Geometry& geometry,
                                          const AtmosphereParams& atmosphere,
                                          const TransportOptions& options);

}  // namespace serial
}  // namespace uvlink
