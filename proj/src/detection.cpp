#include "uvlink/detection.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>

#include "uvlink/poisson.hpp"
#include "uvlink/random.hpp"

namespace uvlink {
namespace {

constexpr std::uint64_t kTrialBlock = 1 << 16;

// Log-likelihood ratio log(pmf_on(n) / pmf_off(n)).
double log_likelihood_ratio(std::uint64_t n, double lambda_s, double lambda_b) {
  return static_cast<double>(n) * std::log1p(lambda_s / lambda_b) - lambda_s;
}

class CountSampler {
 public:
  explicit CountSampler(double mean) {
    if (mean > 0.0) dist_.emplace(mean);
  }
  template <typename Rng>
  std::uint64_t operator()(Rng& rng) {
    return dist_ ? (*dist_)(rng) : 0;
  }

 private:
  std::optional<std::poisson_distribution<std::uint64_t>> dist_;
};

std::uint64_t count_block_errors(const OokOperatingPoint& point, std::uint64_t threshold,
                                 std::uint64_t block, std::uint64_t trials, std::uint64_t seed) {
  Xoshiro256pp rng(substream_key(seed, {+Domain::kBerTrials, block}));
  CountSampler on(point.lambda_s + point.lambda_b());
  CountSampler off(point.lambda_b());
  std::uint64_t errors = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const bool bit = (rng() >> 63) != 0;
    const std::uint64_t count = bit ? on(rng) : off(rng);
    if ((count >= threshold) != bit) ++errors;
  }
  return errors;
}

BerEstimate make_estimate(std::uint64_t errors, std::uint64_t trials) {
  BerEstimate est;
  est.errors = errors;
  est.trials = trials;
  est.ber = static_cast<double>(errors) / static_cast<double>(trials);
  est.standard_error = std::sqrt(est.ber * (1.0 - est.ber) / static_cast<double>(trials));
  return est;
}

void require_trials(std::uint64_t trials) {
  if (trials == 0) throw std::invalid_argument("Monte Carlo trials must be >= 1");
}

}  // namespace

void OokOperatingPoint::validate() const {
  if (!(lambda_s >= 0.0) || !std::isfinite(lambda_s)) {
    throw std::invalid_argument("lambda_s must be finite and >= 0");
  }
  if (!(background_rate >= 0.0) || !std::isfinite(background_rate)) {
    throw std::invalid_argument("background_rate must be finite and >= 0");
  }
  if (!(window_length > 0.0) || !std::isfinite(window_length)) {
    throw std::invalid_argument("window_length must be > 0");
  }
}

std::uint64_t ml_threshold(const OokOperatingPoint& point) {
  point.validate();
  const double lambda_s = point.lambda_s;
  const double lambda_b = point.lambda_b();
  if (lambda_s == 0.0) return 0;
  if (lambda_b == 0.0) return 1;

  // Smallest n with pmf_on(n) >= pmf_off(n); the closed form can land one
  // off after rounding, so nudge against the exact ratio.
  auto n = static_cast<std::uint64_t>(
      std::max(0.0, std::ceil(lambda_s / std::log1p(lambda_s / lambda_b))));
  while (n > 0 && log_likelihood_ratio(n - 1, lambda_s, lambda_b) >= 0.0) --n;
  while (log_likelihood_ratio(n, lambda_s, lambda_b) < 0.0) ++n;
  return n;
}

double ook_error_probability(const OokOperatingPoint& point, std::uint64_t threshold) {
  point.validate();
  const double on_mean = point.lambda_s + point.lambda_b();
  const double off_mean = point.lambda_b();
  if (threshold == 0) return 0.5;  // always decides "on"
  const double miss = poisson_cdf(threshold - 1, on_mean);
  const double false_alarm = poisson_sf(threshold - 1, off_mean);
  return 0.5 * (miss + false_alarm);
}

double ook_ber_analytic(const OokOperatingPoint& point) {
  return ook_error_probability(point, ml_threshold(point));
}

BerEstimate ook_ber_monte_carlo(const OokOperatingPoint& point, std::uint64_t trials,
                                std::uint64_t seed) {
  require_trials(trials);
  const std::uint64_t threshold = ml_threshold(point);
  const auto blocks = static_cast<std::int64_t>((trials + kTrialBlock - 1) / kTrialBlock);
  std::uint64_t errors = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : errors)
  for (std::int64_t b = 0; b < blocks; ++b) {
    const auto block = static_cast<std::uint64_t>(b);
    const std::uint64_t n = std::min(kTrialBlock, trials - block * kTrialBlock);
    errors += count_block_errors(point, threshold, block, n, seed);
  }
  return make_estimate(errors, trials);
}

namespace serial {

BerEstimate ook_ber_monte_carlo(const OokOperatingPoint& point, std::uint64_t trials,
                                std::uint64_t seed) {
  require_trials(trials);
  const std::uint64_t threshold = ml_threshold(point);
  std::uint64_t errors = 0;
  for (std::uint64_t block = 0; block * kTrialBlock < trials; ++block) {
    const std::uint64_t n = std::min(kTrialBlock, trials - block * kTrialBlock);
    errors += count_block_errors(point, threshold, block, n, seed);
  }
  return make_estimate(errors, trials);
}

}  // namespace serial

std::vector<BerPoint> ber_curve(std::span<const double> lambda_s_values, double background_rate,
                                std::span<const double> window_lengths) {
  if (lambda_s_values.empty() || window_lengths.empty()) {
    throw std::invalid_argument("ber_curve needs non-empty lambda_s and window lists");
  }
  std::vector<BerPoint> grid(lambda_s_values.size() * window_lengths.size());
  const auto total = static_cast<std::int64_t>(grid.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t idx = 0; idx < total; ++idx) {
    const std::size_t i = static_cast<std::size_t>(idx) / window_lengths.size();
    const std::size_t j = static_cast<std::size_t>(idx) % window_lengths.size();
    const OokOperatingPoint point{lambda_s_values[i], background_rate, window_lengths[j]};
    BerPoint& out = grid[static_cast<std::size_t>(idx)];
    out.lambda_s = point.lambda_s;
    out.window_length = point.window_length;
    out.lambda_b = point.lambda_b();
    out.threshold = ml_threshold(point);
    out.ber = ook_error_probability(point, out.threshold);
  }
  return grid;
}

LaserComparison continuous_laser_benchmark(double symbol_rate, double pulse_energy,
                                           double background_rate, double channel_scale,
                                           double pulse_window) {
  if (!(symbol_rate > 0.0)) throw std::invalid_argument("symbol_rate must be > 0");
  if (!(pulse_energy >= 0.0)) throw std::invalid_argument("pulse_energy must be >= 0");
  if (!(channel_scale >= 0.0)) throw std::invalid_argument("channel_scale must be >= 0");

  LaserComparison cmp;
  cmp.lambda_s = channel_scale * pulse_energy;
  cmp.pulse_window = pulse_window;
  cmp.continuous_window = 1.0 / symbol_rate;

  const OokOperatingPoint pulse{cmp.lambda_s, background_rate, pulse_window};
  const OokOperatingPoint continuous{cmp.lambda_s, background_rate, cmp.continuous_window};
  cmp.pulse_lambda_b = pulse.lambda_b();
  cmp.continuous_lambda_b = continuous.lambda_b();
  cmp.pulse_ber = ook_ber_analytic(pulse);
  cmp.continuous_ber = ook_ber_analytic(continuous);
  cmp.pulse_advantage = pulse_window < cmp.continuous_window;
  return cmp;
}

}  // namespace uvlink
