#pragma once

// Goodness-of-fit helpers shared by the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace uvlink::testing {

/// Kolmogorov distribution tail Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
inline double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

/// One-sample KS test; p-value from the asymptotic distribution with
/// Stephens' small-sample correction.
inline KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  const double root = std::sqrt(n);
  return {d, kolmogorov_q((root + 0.12 + 0.11 / root) * d)};
}

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 0.0;
};

/// Pearson chi-square of samples against `cdf` over `bins` equiprobable
/// cells (edges located by bisection on [lo, hi]).
inline ChiSquareResult chi_square_test(const std::vector<double>& samples,
                                       const std::function<double(double)>& cdf, double lo,
                                       double hi, int bins) {
  std::vector<double> edges{lo};
  for (int k = 1; k < bins; ++k) {
    const double target = static_cast<double>(k) / bins;
    double a = lo, b = hi;
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (a + b);
      (cdf(m) < target ? a : b) = m;
    }
    edges.push_back(0.5 * (a + b));
  }
  edges.push_back(hi);

  std::vector<double> observed(static_cast<std::size_t>(bins), 0.0);
  for (const double x : samples) {
    const auto it = std::upper_bound(edges.begin() + 1, edges.end() - 1, x);
    observed[static_cast<std::size_t>(it - edges.begin() - 1)] += 1.0;
  }
  const double n = static_cast<double>(samples.size());
  double stat = 0.0;
  for (int k = 0; k < bins; ++k) {
    const double expected = n * (cdf(edges[k + 1]) - cdf(edges[k]));
    const double diff = observed[static_cast<std::size_t>(k)] - expected;
    stat += diff * diff / expected;
  }
  const int dof = bins - 1;
  const boost::math::chi_squared dist(dof);
  return {stat, dof, boost::math::cdf(boost::math::complement(dist, stat))};
}

}  // namespace uvlink::testing
