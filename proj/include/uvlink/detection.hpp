#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace uvlink {

/// OOK decision by counting photoelectrons in a processing window of length
/// T_1. Bits are equiprobable.
struct OokOperatingPoint {
  double lambda_s = 50.0;         ///< mean signal photoelectrons per "on" bit
  double background_rate = 5e4;   ///< 1/s
  double window_length = 1e-3;    ///< T_1, s

  double lambda_b() const { return background_rate * window_length; }
  void validate() const;
};

/// Integer threshold n deciding "on" when the count is >= n. Minimises
/// P(N < n | on) + P(N >= n | off); ties go to the smaller n. Returns 0 when
/// lambda_s == 0 (both hypotheses coincide; every threshold is equally bad).
std::uint64_t ml_threshold(const OokOperatingPoint& point);

/// Error probability 1/2 [P(N < n | on) + P(N >= n | off)] with the given n.
double ook_error_probability(const OokOperatingPoint& point, std::uint64_t threshold);

/// Analytic BER at the ML threshold.
double ook_ber_analytic(const OokOperatingPoint& point);

struct BerEstimate {
  double ber = 0.0;
  double standard_error = 0.0;
  std::uint64_t errors = 0;
  std::uint64_t trials = 0;
};

/// Monte Carlo BER: random bits, Poisson window counts, ML threshold decision.
/// Trials run in fixed-size blocks with per-block substreams, so the estimate
/// does not depend on the thread count.
BerEstimate ook_ber_monte_carlo(const OokOperatingPoint& point, std::uint64_t trials,
                                std::uint64_t seed);

struct BerPoint {
  double lambda_s = 0.0;
  double window_length = 0.0;
  double lambda_b = 0.0;
  std::uint64_t threshold = 0;
  double ber = 0.0;
};

/// Grid of analytic BERs, lambda_s outer, window length inner.
std::vector<BerPoint> ber_curve(std::span<const double> lambda_s_values, double background_rate,
                                std::span<const double> window_lengths);

struct LaserComparison {
  double lambda_s = 0.0;            ///< same for both systems
  double pulse_window = 0.0;        ///< T_1
  double continuous_window = 0.0;   ///< 1/R
  double pulse_lambda_b = 0.0;
  double continuous_lambda_b = 0.0;
  double pulse_ber = 0.0;
  double continuous_ber = 0.0;
  bool pulse_advantage = false;     ///< T_1 < 1/R
};

/// Pulse laser (energy E per symbol, processing window T_1) against a
/// continuous laser of power E*R processed over 1/R. `channel_scale` converts
/// transmitted energy to mean photoelectrons.
LaserComparison continuous_laser_benchmark(double symbol_rate, double pulse_energy,
                                           double background_rate, double channel_scale,
                                           double pulse_window);

namespace serial {

BerEstimate ook_ber_monte_carlo(const OokOperatingPoint& point, std::uint64_t trials,
                                std::uint64_t seed);

}  // namespace serial
}  // namespace uvlink
