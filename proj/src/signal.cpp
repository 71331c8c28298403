#include "uvlink/signal.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "uvlink/random.hpp"

namespace uvlink {
namespace {

void require_field(bool ok, const char* field, const char* what) {
  if (!ok) throw std::invalid_argument(std::string(field) + ": " + what);
}

}  // namespace

void SourceDetectorParams::validate() const {
  require_field(std::isfinite(pulse_energy) && pulse_energy > 0.0, "source.pulse_energy",
                "must be > 0");
  require_field(quantum_efficiency > 0.0 && quantum_efficiency <= 1.0,
                "source.quantum_efficiency", "must lie in (0, 1]");
  require_field(std::isfinite(wavelength) && wavelength > 0.0, "source.wavelength",
                "must be > 0");
  require_field(std::isfinite(background_rate) && background_rate >= 0.0,
                "source.background_rate", "must be >= 0");
}

void TraceOptions::validate() const {
  require_field(std::isfinite(chip_duration) && chip_duration > 0.0, "trace.chip_duration",
                "must be > 0");
  require_field(std::isfinite(frame_length) && frame_length >= chip_duration,
                "trace.frame_length", "must hold at least one chip");
  require_field(pulse_offset >= 0.0 && pulse_offset < frame_length, "trace.pulse_offset",
                "must lie inside the frame");
  require_field(threshold_fraction > 0.0 && threshold_fraction < 1.0,
                "trace.threshold_fraction", "must lie in (0, 1)");
}

SignalRate signal_rate(const ImpulseResponse& ir, const SourceDetectorParams& params) {
  params.validate();
  // Received power g = E * p / dt; rate = eta * g / E_p.
  const double scale =
      params.quantum_efficiency * params.pulse_energy / (params.photon_energy() * ir.bin_width);
  SignalRate rate;
  rate.bin_width = ir.bin_width;
  rate.time_origin = ir.time_origin;
  rate.rate.reserve(ir.bins.size());
  for (const double p : ir.bins) rate.rate.push_back(scale * p);
  return rate;
}

double mean_signal_count(const SignalRate& rate) {
  double sum = 0.0;
  for (const double r : rate.rate) sum += r * rate.bin_width;
  return sum;
}

double calibrate_pulse_energy(const ImpulseResponse& ir, const SourceDetectorParams& params,
                              double target_lambda_s) {
  if (!(target_lambda_s > 0.0)) {
    throw std::invalid_argument("target_lambda_s must be > 0");
  }
  SourceDetectorParams unit = params;
  unit.pulse_energy = 1.0;
  const double per_joule = mean_signal_count(signal_rate(ir, unit));
  if (!(per_joule > 0.0)) {
    throw std::invalid_argument("cannot calibrate pulse energy: no received signal");
  }
  return target_lambda_s / per_joule;
}

std::vector<double> expected_chip_counts(const SignalRate& rate, double background_rate,
                                         const TraceOptions& options, TruthWindow* truth) {
  options.validate();
  const double tau = options.chip_duration;
  const auto chips = static_cast<std::size_t>(std::llround(options.frame_length / tau));
  std::vector<double> expected(chips, background_rate * tau);

  const bool has_signal =
      std::any_of(rate.rate.begin(), rate.rate.end(), [](double r) { return r > 0.0; });
  if (!has_signal) {
    if (truth) *truth = {options.pulse_offset, options.pulse_offset};
    return expected;
  }

  const SupportRange support = threshold_support(rate.rate, options.threshold_fraction);
  const double left = rate.time_origin + static_cast<double>(support.first) * rate.bin_width;
  const double duration = static_cast<double>(support.last + 1 - support.first) * rate.bin_width;
  const double frame = static_cast<double>(chips) * tau;
  if (options.pulse_offset + duration > frame * (1.0 + 1e-12)) {
    throw std::invalid_argument("frame too short: pulse_offset + pulse duration exceeds frame");
  }
  if (truth) *truth = {options.pulse_offset, options.pulse_offset + duration};

  const double shift = options.pulse_offset - left;
  for (std::size_t j = 0; j < rate.rate.size(); ++j) {
    if (rate.rate[j] <= 0.0) continue;
    const double t0 = rate.time_origin + static_cast<double>(j) * rate.bin_width + shift;
    const double t1 = t0 + rate.bin_width;
    if (t1 <= 0.0 || t0 >= frame) continue;
    const double density = rate.rate[j];  // counts per second within the bin
    const auto k_begin = static_cast<std::size_t>(std::max(0.0, std::floor(t0 / tau)));
    const auto k_end =
        std::min(chips, static_cast<std::size_t>(std::max(0.0, std::ceil(t1 / tau))));
    for (std::size_t k = k_begin; k < k_end; ++k) {
      const double lo = std::max(t0, static_cast<double>(k) * tau);
      const double hi = std::min(t1, static_cast<double>(k + 1) * tau);
      if (hi > lo) expected[k] += density * (hi - lo);
    }
  }
  return expected;
}

PhotoelectronTrace generate_trace(const SignalRate& rate, const SourceDetectorParams& params,
                                  const TraceOptions& options) {
  params.validate();
  PhotoelectronTrace trace;
  trace.chip_duration = options.chip_duration;
  const std::vector<double> expected =
      expected_chip_counts(rate, params.background_rate, options, &trace.truth);

  Xoshiro256pp rng(substream_key(options.seed, {+Domain::kTrace}));
  trace.counts.resize(expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k) {
    if (expected[k] > 0.0) {
      std::poisson_distribution<std::uint32_t> draw(expected[k]);
      trace.counts[k] = draw(rng);
    }
  }
  return trace;
}

}  // namespace uvlink
