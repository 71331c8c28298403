#include "uvlink/poisson.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace uvlink {
namespace {

constexpr double kTermEpsilon = 1e-17;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// lgamma(n + 1) - (n + 1/2) log n + n - log sqrt(2 pi); series for large n.
double stirling_error(double n) {
  if (n <= 15.0) {
    return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n - kLogSqrt2Pi;
  }
  constexpr double s0 = 1.0 / 12, s1 = 1.0 / 360, s2 = 1.0 / 1260, s3 = 1.0 / 1680,
                   s4 = 1.0 / 1188;
  const double nn = n * n;
  return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// Deviance term x log(x / mean) + mean - x without cancellation near x = mean.
double deviance(double x, double mean) {
  if (std::abs(x - mean) < 0.1 * (x + mean)) {
    double v = (x - mean) / (x + mean);
    double s = (x - mean) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double next = s + ej / (2 * j + 1);
      if (next == s) return next;
      s = next;
    }
  }
  return x * std::log(x / mean) + mean - x;
}

void require_mean(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::domain_error("Poisson mean must be finite and >= 0");
  }
}

// sum_{k=0..n} pmf(k) for n <= mean: walk downward, terms shrink by k/mean.
double lower_sum(std::uint64_t n, double mean) {
  double term = std::exp(poisson_log_pmf(n, mean));
  double sum = term;
  for (std::uint64_t k = n; k > 0; --k) {
    term *= static_cast<double>(k) / mean;
    sum += term;
    if (term < kTermEpsilon * sum) break;
  }
  return sum;
}

// sum_{k>n} pmf(k) for n >= mean: walk upward, terms shrink by mean/(k+1).
double upper_sum(std::uint64_t n, double mean) {
  double term = std::exp(poisson_log_pmf(n + 1, mean));
  double sum = term;
  for (std::uint64_t k = n + 1;; ++k) {
    term *= mean / static_cast<double>(k + 1);
    sum += term;
    if (term < kTermEpsilon * sum || term == 0.0) break;
  }
  return sum;
}

}  // namespace

double poisson_log_pmf(std::uint64_t n, double mean) {
  require_mean(mean);
  if (mean == 0.0) {
    return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  if (n == 0) return -mean;
  const double x = static_cast<double>(n);
  return -stirling_error(x) - deviance(x, mean) - 0.5 * std::log(x) - kLogSqrt2Pi;
}

double poisson_cdf(std::uint64_t n, double mean) {
  require_mean(mean);
  if (mean == 0.0) return 1.0;
  if (static_cast<double>(n) < mean) return lower_sum(n, mean);
  return 1.0 - upper_sum(n, mean);
}

double poisson_sf(std::uint64_t n, double mean) {
  require_mean(mean);
  if (mean == 0.0) return 0.0;
  if (static_cast<double>(n) < mean) return 1.0 - lower_sum(n, mean);
  return upper_sum(n, mean);
}

}  // namespace uvlink
