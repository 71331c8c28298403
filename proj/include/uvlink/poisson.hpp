#pragma once

#include <cstdint>

namespace uvlink {

/// log P(N = n) for N ~ Poisson(mean).
double poisson_log_pmf(std::uint64_t n, double mean);

/// P(N <= n). Terms are summed outward from n in the direction in which they
/// shrink, starting from a log-space anchor, so the result keeps ~1e-14
/// relative accuracy for means up to 1e6 and beyond.
double poisson_cdf(std::uint64_t n, double mean);

/// P(N > n), computed directly (not as 1 - cdf) when it is the small tail.
double poisson_sf(std::uint64_t n, double mean);

}  // namespace uvlink
