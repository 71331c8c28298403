#include "uvlink/localization.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "uvlink/parallel.hpp"
#include "uvlink/poisson.hpp"
#include "uvlink/random.hpp"

namespace uvlink {
namespace {

double chip_time(std::size_t chip, const PhotoelectronTrace& trace) {
  return static_cast<double>(chip) * trace.chip_duration;
}

void require_matching_chips(const PhotoelectronTrace& trace, const PulseTemplate& pulse) {
  if (pulse.values.empty()) throw std::invalid_argument("pulse template is empty");
  if (std::abs(trace.chip_duration - pulse.chip_duration) >
      1e-9 * std::max(trace.chip_duration, pulse.chip_duration)) {
    throw std::invalid_argument("template chip duration differs from trace chip duration");
  }
}

// Piecewise-constant resampling of an impulse response onto chips starting at
// the response's time origin. Mass is conserved.
std::vector<double> resample_to_chips(const ImpulseResponse& ir, double chip_duration) {
  const double span = static_cast<double>(ir.bins.size()) * ir.bin_width;
  const auto chips = static_cast<std::size_t>(std::ceil(span / chip_duration - 1e-9));
  std::vector<double> out(chips, 0.0);
  for (std::size_t j = 0; j < ir.bins.size(); ++j) {
    if (ir.bins[j] == 0.0) continue;
    const double t0 = static_cast<double>(j) * ir.bin_width;
    const double t1 = t0 + ir.bin_width;
    const auto k_begin = static_cast<std::size_t>(std::floor(t0 / chip_duration));
    const auto k_end =
        std::min(chips, static_cast<std::size_t>(std::ceil(t1 / chip_duration)));
    for (std::size_t k = k_begin; k < k_end; ++k) {
      const double lo = std::max(t0, static_cast<double>(k) * chip_duration);
      const double hi = std::min(t1, static_cast<double>(k + 1) * chip_duration);
      if (hi > lo) out[k] += ir.bins[j] * (hi - lo) / ir.bin_width;
    }
  }
  return out;
}

double correlation_at(std::span<const std::uint32_t> counts, std::span<const double> shape,
                      std::size_t offset) {
  const std::size_t reach = std::min(shape.size(), counts.size() - offset);
  double sum = 0.0;
  for (std::size_t m = 0; m < reach; ++m) {
    sum += static_cast<double>(counts[offset + m]) * shape[m];
  }
  return sum;
}

// Like mean_absolute_deviation, but an all-not-found run reports NaN instead
// of aborting the benchmark.
DeviationSummary summarize(std::span<const std::optional<WindowEstimate>> estimates,
                           std::span<const TruthWindow> truths) {
  const auto found = std::count_if(estimates.begin(), estimates.end(),
                                   [](const auto& e) { return e.has_value(); });
  if (found == 0) {
    return {std::nan(""), 0, estimates.size()};
  }
  return mean_absolute_deviation(estimates, truths);
}

}  // namespace

std::string_view to_string(LocalizationMethod method) {
  return method == LocalizationMethod::kCounting ? "counting" : "correlation";
}

std::optional<WindowEstimate> localize_counting(const PhotoelectronTrace& trace,
                                                std::size_t window_chips,
                                                std::uint64_t threshold) {
  if (window_chips == 0) throw std::invalid_argument("counting window must be >= 1 chip");
  const std::size_t n = trace.counts.size();
  if (n < window_chips) throw std::invalid_argument("trace is shorter than the counting window");

  // window_sum holds the counts of chips [edge - window_chips, edge).
  std::uint64_t window_sum = 0;
  for (std::size_t k = 0; k < window_chips; ++k) window_sum += trace.counts[k];

  std::optional<std::size_t> start_edge;
  for (std::size_t edge = window_chips;; ++edge) {
    if (!start_edge) {
      if (window_sum > threshold) start_edge = edge;
    } else if (window_sum < threshold) {
      return WindowEstimate{chip_time(*start_edge, trace), chip_time(edge, trace),
                            LocalizationMethod::kCounting, false};
    }
    if (edge == n) break;
    window_sum += trace.counts[edge];
    window_sum -= trace.counts[edge - window_chips];
  }
  if (!start_edge) return std::nullopt;
  return WindowEstimate{chip_time(*start_edge, trace), trace.frame_length(),
                        LocalizationMethod::kCounting, true};
}

std::uint64_t neyman_pearson_threshold(double background_rate, double window_duration,
                                       double false_alarm_probability) {
  if (!(false_alarm_probability > 0.0 && false_alarm_probability < 1.0)) {
    throw std::invalid_argument("false alarm probability must lie in (0, 1)");
  }
  if (!(background_rate >= 0.0) || !(window_duration >= 0.0)) {
    throw std::invalid_argument("background rate and window duration must be >= 0");
  }
  const double mean = background_rate * window_duration;
  // P(N > n) is non-increasing in n: bisect for the first n meeting the budget.
  std::uint64_t lo = 0;
  std::uint64_t hi = static_cast<std::uint64_t>(mean + 40.0 * std::sqrt(mean) + 64.0);
  while (poisson_sf(hi, mean) > false_alarm_probability) hi *= 2;
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (poisson_sf(mid, mean) <= false_alarm_probability) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

PulseTemplate build_template(std::span<const ImpulseResponse> responses, double chip_duration,
                             double threshold_fraction) {
  if (!(chip_duration > 0.0)) throw std::invalid_argument("chip_duration must be > 0");
  const ImpulseResponse mean = average_impulse_responses(responses);

  std::size_t longest = 0;
  for (const ImpulseResponse& ir : responses) {
    const std::vector<double> chips = resample_to_chips(ir, chip_duration);
    if (std::none_of(chips.begin(), chips.end(), [](double v) { return v > 0.0; })) continue;
    const SupportRange range = threshold_support(chips, threshold_fraction);
    longest = std::max(longest, range.last - range.first + 1);
  }

  const std::vector<double> mean_chips = resample_to_chips(mean, chip_duration);
  const SupportRange range = threshold_support(mean_chips, threshold_fraction);
  PulseTemplate pulse;
  pulse.chip_duration = chip_duration;
  pulse.values.assign(longest, 0.0);
  for (std::size_t m = 0; m < longest && range.first + m < mean_chips.size(); ++m) {
    pulse.values[m] = mean_chips[range.first + m];
  }
  double sum = 0.0;
  for (const double v : pulse.values) sum += v;
  for (double& v : pulse.values) v /= sum;
  return pulse;
}

std::vector<double> sliding_correlation(const PhotoelectronTrace& trace,
                                        const PulseTemplate& pulse) {
  require_matching_chips(trace, pulse);
  const std::span<const std::uint32_t> counts(trace.counts);
  std::vector<double> out(counts.size(), 0.0);
  const auto n = static_cast<std::int64_t>(counts.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        correlation_at(counts, pulse.values, static_cast<std::size_t>(i));
  }
  return out;
}

namespace serial {

std::vector<double> sliding_correlation(const PhotoelectronTrace& trace,
                                        const PulseTemplate& pulse) {
  require_matching_chips(trace, pulse);
  const std::size_t n = trace.counts.size();
  const std::size_t m_len = pulse.values.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < m_len && i + m < n; ++m) {
      out[i] += static_cast<double>(trace.counts[i + m]) * pulse.values[m];
    }
  }
  return out;
}

}  // namespace serial

double correlation_threshold(double background_rate, const PulseTemplate& pulse,
                             double factor) {
  double sum = 0.0;
  for (const double v : pulse.values) sum += v;
  return factor * background_rate * pulse.chip_duration * sum;
}

std::optional<WindowEstimate> localize_correlation(const PhotoelectronTrace& trace,
                                                   const PulseTemplate& pulse, double threshold,
                                                   CorrelationEndRule end_rule) {
  const std::vector<double> corr = sliding_correlation(trace, pulse);
  const auto above = [&](double c) { return c > threshold; };
  const auto first = std::find_if(corr.begin(), corr.end(), above);
  if (first == corr.end()) return std::nullopt;
  const auto excursion_end = std::find_if_not(first, corr.end(), above);
  // max_element keeps the earliest of equal maxima.
  const auto peak = std::max_element(first, excursion_end);
  const auto start_chip = static_cast<std::size_t>(peak - corr.begin());

  WindowEstimate estimate;
  estimate.method = LocalizationMethod::kCorrelation;
  estimate.start = chip_time(start_chip, trace);
  const auto zero = end_rule == CorrelationEndRule::kFirstAtOrBelowThreshold
                        ? std::find_if_not(peak + 1, corr.end(), above)
                        : std::find(peak + 1, corr.end(), 0.0);
  if (zero == corr.end()) {
    estimate.end = trace.frame_length();
    estimate.end_clamped = true;
    return estimate;
  }
  std::size_t end_chip = static_cast<std::size_t>(zero - corr.begin());
  if (end_rule == CorrelationEndRule::kFirstZeroPlusLength) end_chip += pulse.length();
  if (end_chip >= trace.counts.size()) {
    estimate.end = trace.frame_length();
    estimate.end_clamped = true;
  } else {
    estimate.end = chip_time(end_chip, trace);
  }
  return estimate;
}

DeviationSummary mean_absolute_deviation(std::span<const std::optional<WindowEstimate>> estimates,
                                         std::span<const TruthWindow> truths) {
  if (estimates.empty() || estimates.size() != truths.size()) {
    throw std::invalid_argument("estimates and truths must be equal-length and non-empty");
  }
  DeviationSummary summary;
  double total = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (!estimates[i]) {
      ++summary.not_found;
      continue;
    }
    total += 0.5 * (std::abs(estimates[i]->start - truths[i].start) +
                    std::abs(estimates[i]->end - truths[i].end));
    ++summary.used;
  }
  if (summary.used == 0) {
    throw std::invalid_argument("no estimates left after excluding not-found results");
  }
  summary.e_m = total / static_cast<double>(summary.used);
  return summary;
}

std::vector<ImpulseResponse> draw_template_channels(const LocalizationSetup& setup,
                                                    double distance, std::size_t distance_index,
                                                    std::size_t count, std::uint64_t seed) {
  Geometry geometry = setup.geometry;
  geometry.baseline_distance = distance;
  std::vector<ImpulseResponse> irs(count);
  parallel_for(static_cast<std::int64_t>(count), [&](std::int64_t r) {
    const auto idx = static_cast<std::size_t>(r);
    TransportOptions run = setup.transport;
    run.seed = substream_key(seed, {+Domain::kTemplate, distance_index, idx});
    irs[idx] = simulate_impulse_response(geometry, setup.atmosphere, run);
  });
  return irs;
}

PhotoelectronTrace benchmark_trace(const LocalizationSetup& setup, double distance,
                                   std::size_t distance_index, std::size_t realization,
                                   double pulse_energy, std::uint64_t seed, double* lambda_s) {
  Geometry geometry = setup.geometry;
  geometry.baseline_distance = distance;
  TransportOptions run = setup.transport;
  run.seed = substream_key(seed, {+Domain::kRealization, distance_index, realization});
  SourceDetectorParams source = setup.source;
  source.pulse_energy = pulse_energy;
  const SignalRate rate =
      signal_rate(simulate_impulse_response(geometry, setup.atmosphere, run), source);
  if (lambda_s != nullptr) *lambda_s = mean_signal_count(rate);
  TraceOptions options = setup.trace;
  options.seed = substream_key(seed, {+Domain::kBenchmark, distance_index, realization});
  return generate_trace(rate, source, options);
}

std::vector<LocalizationRow> localization_benchmark(std::span<const double> distances,
                                                    const LocalizationSetup& setup,
                                                    std::size_t realizations,
                                                    std::size_t template_realizations,
                                                    std::uint64_t seed) {
  if (distances.empty()) throw std::invalid_argument("distance list is empty");
  if (realizations < 1) throw std::invalid_argument("realizations must be >= 1");
  if (template_realizations < 1) {
    throw std::invalid_argument("template_realizations must be >= 1");
  }

  std::vector<LocalizationRow> rows;
  for (std::size_t di = 0; di < distances.size(); ++di) {
    const std::vector<ImpulseResponse> template_irs =
        draw_template_channels(setup, distances[di], di, template_realizations, seed);
    const PulseTemplate pulse = build_template(template_irs, setup.trace.chip_duration,
                                               setup.trace.threshold_fraction);
    SourceDetectorParams source = setup.source;
    source.pulse_energy = calibrate_pulse_energy(average_impulse_responses(template_irs),
                                                 source, setup.target_lambda_s);
    const double corr_threshold = correlation_threshold(source.background_rate, pulse,
                                                        setup.correlation_threshold_factor);

    std::vector<TruthWindow> truths(realizations);
    std::vector<std::optional<WindowEstimate>> counting(realizations);
    std::vector<std::optional<WindowEstimate>> correlation(realizations);
    std::vector<double> lambda_s(realizations);
    parallel_for(static_cast<std::int64_t>(realizations), [&](std::int64_t r) {
      const auto idx = static_cast<std::size_t>(r);
      double mean_count = 0.0;
      const PhotoelectronTrace trace = benchmark_trace(setup, distances[di], di, idx,
                                                       source.pulse_energy, seed, &mean_count);
      truths[idx] = trace.truth;
      lambda_s[idx] = mean_count;
      counting[idx] =
          localize_counting(trace, setup.counting_window_chips, setup.counting_threshold);
      correlation[idx] = localize_correlation(trace, pulse, corr_threshold, setup.end_rule);
    });

    LocalizationRow row;
    row.distance = distances[di];
    row.pulse_energy = source.pulse_energy;
    double lambda_sum = 0.0;
    for (const double v : lambda_s) lambda_sum += v;
    row.lambda_s = lambda_sum / static_cast<double>(realizations);
    row.template_length = pulse.length();
    row.counting = summarize(counting, truths);
    row.correlation = summarize(correlation, truths);
    row.sample = {truths.front(), counting.front(), correlation.front()};
    rows.push_back(row);
  }
  return rows;
}

}  // namespace uvlink
