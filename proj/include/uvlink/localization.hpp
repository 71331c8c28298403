#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "uvlink/atmosphere.hpp"
#include "uvlink/channel.hpp"
#include "uvlink/signal.hpp"

namespace uvlink {

enum class LocalizationMethod { kCounting, kCorrelation };

std::string_view to_string(LocalizationMethod method);

/// Estimated pulse window (P_L hat, P_R hat).
struct WindowEstimate {
  double start = 0.0;  ///< s
  double end = 0.0;    ///< s
  LocalizationMethod method = LocalizationMethod::kCounting;
  /// Start found but no end inside the frame; `end` is the frame end.
  bool end_clamped = false;
};

/// Sliding-window photoelectron counting. The window covers the
/// `window_chips` chips before its leading edge and advances one chip at a
/// time. The pulse starts at the first leading edge whose window holds more
/// than `threshold` counts and ends at the first later leading edge whose
/// window holds fewer than `threshold`. Returns nullopt when no start exists.
std::optional<WindowEstimate> localize_counting(const PhotoelectronTrace& trace,
                                                std::size_t window_chips,
                                                std::uint64_t threshold = 2);

/// Smallest n with P(Poisson(background_rate * window_duration) > n) <= p_fa.
std::uint64_t neyman_pearson_threshold(double background_rate, double window_duration,
                                       double false_alarm_probability);

/// Unit-sum pulse shape S(m) sampled at the chip duration.
struct PulseTemplate {
  double chip_duration = 20e-9;
  std::vector<double> values;

  std::size_t length() const { return values.size(); }
};

/// Averages the responses, resamples to chips, keeps the averaged pulse from
/// its left boundary for as many chips as the longest single realization
/// spans, and normalizes to unit sum.
PulseTemplate build_template(std::span<const ImpulseResponse> responses, double chip_duration,
                             double threshold_fraction = 0.01);

/// Correlation(i) = sum_m Z[i + m] * S[m] for every chip offset i of the
/// trace; chips past the end of the trace count as zero. Offsets are computed
/// in parallel.
std::vector<double> sliding_correlation(const PhotoelectronTrace& trace,
                                        const PulseTemplate& pulse);

/// How the correlation end estimate is read off.
enum class CorrelationEndRule {
  kFirstZero,            ///< offset of the first zero after the start
  kFirstZeroPlusLength,  ///< that offset plus the template length
  kFirstAtOrBelowThreshold,  ///< first offset after the start back at or below threshold
};

/// `factor` x the mean background correlation level Lambda_b * tau_c * sum(S).
double correlation_threshold(double background_rate, const PulseTemplate& pulse,
                             double factor = 3.0);

/// Template matching. Within the first excursion of the correlation above
/// `threshold`, the start is the earliest offset attaining the excursion
/// maximum; the end follows `end_rule`. Returns nullopt when the correlation
/// never exceeds the threshold.
std::optional<WindowEstimate> localize_correlation(
    const PhotoelectronTrace& trace, const PulseTemplate& pulse, double threshold,
    CorrelationEndRule end_rule = CorrelationEndRule::kFirstAtOrBelowThreshold);

struct DeviationSummary {
  double e_m = 0.0;  ///< s
  std::size_t used = 0;
  std::size_t not_found = 0;
};

/// Mean over found estimates of (|start - P_L| + |end - P_R|) / 2.
DeviationSummary mean_absolute_deviation(std::span<const std::optional<WindowEstimate>> estimates,
                                         std::span<const TruthWindow> truths);

struct LocalizationSetup {
  Geometry geometry;
  AtmosphereParams atmosphere;
  SourceDetectorParams source;
  TransportOptions transport;  ///< photons per realization; seed unused
  TraceOptions trace;          ///< seed unused
  double target_lambda_s = 50.0;
  std::size_t counting_window_chips = 100;
  std::uint64_t counting_threshold = 2;
  double correlation_threshold_factor = 3.0;
  CorrelationEndRule end_rule = CorrelationEndRule::kFirstAtOrBelowThreshold;
};

struct SampleRealization {
  TruthWindow truth;
  std::optional<WindowEstimate> counting;
  std::optional<WindowEstimate> correlation;
};

struct LocalizationRow {
  double distance = 0.0;      ///< m
  double pulse_energy = 0.0;  ///< calibrated, J
  double lambda_s = 0.0;      ///< mean over benchmark realizations
  std::size_t template_length = 0;
  DeviationSummary counting;
  DeviationSummary correlation;
  SampleRealization sample;  ///< realization 0
};

/// Channel draws used for the template at one benchmark distance. Realization
/// r uses substream (seed, template, distance_index, r).
std::vector<ImpulseResponse> draw_template_channels(const LocalizationSetup& setup,
                                                    double distance, std::size_t distance_index,
                                                    std::size_t count, std::uint64_t seed);

/// Benchmark trace for one realization at one distance, using the same
/// substreams as localization_benchmark(). Optionally reports the mean signal
/// count of the drawn channel.
PhotoelectronTrace benchmark_trace(const LocalizationSetup& setup, double distance,
                                   std::size_t distance_index, std::size_t realization,
                                   double pulse_energy, std::uint64_t seed,
                                   double* lambda_s = nullptr);

/// Per distance: template from `template_realizations` channel draws, pulse
/// energy calibrated so the template draws average `target_lambda_s`
/// photoelectrons, then `realizations` fresh draws each turned into a trace
/// and localized by both methods.
std::vector<LocalizationRow> localization_benchmark(std::span<const double> distances,
                                                    const LocalizationSetup& setup,
                                                    std::size_t realizations,
                                                    std::size_t template_realizations,
                                                    std::uint64_t seed);

namespace serial {

std::vector<double> sliding_correlation(const PhotoelectronTrace& trace,
                                        const PulseTemplate& pulse);

}  // namespace serial
}  // namespace uvlink
