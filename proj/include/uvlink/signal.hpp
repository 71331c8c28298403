#pragma once

#include <cstdint>
#include <vector>

#include "uvlink/channel.hpp"

namespace uvlink {

inline constexpr double kPlanck = 6.62607015e-34;  // J s

/// Source and detector parameters. `pulse_energy` and `quantum_efficiency`
/// are not measured for this link; experiments normally set the energy
/// through calibrate_pulse_energy().
struct SourceDetectorParams {
  double pulse_energy = 1.0;        ///< J per pulse
  double quantum_efficiency = 0.2;  ///< photoelectrons per received photon
  double wavelength = 266e-9;       ///< m
  double background_rate = 5e4;     ///< photoelectrons/s

  double photon_energy() const { return kPlanck * kSpeedOfLight / wavelength; }
  void validate() const;
};

/// Photoelectron arrival rate, piecewise constant over bins.
struct SignalRate {
  double bin_width = 20e-9;   ///< s
  double time_origin = 0.0;   ///< s
  std::vector<double> rate;   ///< photoelectrons/s
};

SignalRate signal_rate(const ImpulseResponse& ir, const SourceDetectorParams& params);

/// Expected photoelectrons: sum of rate * bin_width.
double mean_signal_count(const SignalRate& rate);

/// Pulse energy that makes the expected photoelectron count of `ir` equal
/// `target_lambda_s`.
double calibrate_pulse_energy(const ImpulseResponse& ir, const SourceDetectorParams& params,
                              double target_lambda_s);

struct TruthWindow {
  double start = 0.0;  ///< P_L, s
  double end = 0.0;    ///< P_R, s
};

/// Per-chip photoelectron counts Z_i over one frame.
struct PhotoelectronTrace {
  double chip_duration = 20e-9;
  std::vector<std::uint32_t> counts;
  TruthWindow truth;

  double frame_length() const { return chip_duration * static_cast<double>(counts.size()); }
};

struct TraceOptions {
  double frame_length = 60e-6;   ///< s
  double pulse_offset = 8e-6;    ///< where the pulse's left boundary lands, s
  double chip_duration = 20e-9;  ///< s
  /// Fraction of the peak rate that delimits the pulse for the truth window.
  double threshold_fraction = 0.01;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Expected counts per chip: background plus the signal rate shifted so its
/// left boundary sits at `pulse_offset`. Signal outside the frame is dropped.
/// Also reports the truth window.
std::vector<double> expected_chip_counts(const SignalRate& rate, double background_rate,
                                         const TraceOptions& options, TruthWindow* truth);

/// Draws Z_i ~ Poisson(expected_i) independently per chip. A zero rate
/// profile yields a background-only trace with truth (pulse_offset,
/// pulse_offset).
PhotoelectronTrace generate_trace(const SignalRate& rate, const SourceDetectorParams& params,
                                  const TraceOptions& options);

}  // namespace uvlink
