// Serial reference vs OpenMP kernels: wall time and largest difference
// relative to the peak magnitude (0 means bit-identical).
//   uvlink_bench [threads] [photons]

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <json.hpp>

#include "uvlink/channel.hpp"
#include "uvlink/detection.hpp"
#include "uvlink/localization.hpp"
#include "uvlink/signal.hpp"

using namespace uvlink;

namespace {

template <typename F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return INFINITY;
  double diff = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    peak = std::max(peak, std::abs(a[i]));
  }
  return peak > 0.0 ? diff / peak : diff;
}

void report(const char* kernel, double serial_s, double parallel_s, double rel_diff) {
  nlohmann::ordered_json rec = {{"kernel", kernel},
                                {"threads", omp_get_max_threads()},
                                {"serial_s", serial_s},
                                {"parallel_s", parallel_s},
                                {"speedup", serial_s / parallel_s},
                                {"max_rel_diff", rel_diff}};
  std::puts(rec.dump().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) omp_set_num_threads(std::atoi(argv[1]));
  const std::uint64_t photons = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 200'000;

  Geometry geometry;
  AtmosphereParams atmosphere;
  TransportOptions options;
  options.photons = photons;
  options.seed = 42;

  ImpulseResponse a, b;
  const double ts = seconds([&] { a = serial::simulate_impulse_response(geometry, atmosphere, options); });
  const double tp = seconds([&] { b = simulate_impulse_response(geometry, atmosphere, options); });
  report("simulate_impulse_response", ts, tp, max_rel_diff(a.bins, b.bins));

  const OokOperatingPoint point{50.0, 5e4, 1e-3};
  BerEstimate ea, eb;
  const double bs = seconds([&] { ea = serial::ook_ber_monte_carlo(point, 4'000'000, 7); });
  const double bp = seconds([&] { eb = ook_ber_monte_carlo(point, 4'000'000, 7); });
  report("ook_ber_monte_carlo", bs, bp, max_rel_diff({ea.ber}, {eb.ber}));

  const PulseTemplate pulse = build_template(std::span(&b, 1), b.bin_width);
  SourceDetectorParams source;
  source.pulse_energy = calibrate_pulse_energy(b, source, 50.0);
  TraceOptions trace_options;
  trace_options.seed = 3;
  const PhotoelectronTrace trace = generate_trace(signal_rate(b, source), source, trace_options);
  std::vector<double> ca, cb;
  const double cs = seconds([&] { ca = serial::sliding_correlation(trace, pulse); });
  const double cp = seconds([&] { cb = sliding_correlation(trace, pulse); });
  report("sliding_correlation", cs, cp, max_rel_diff(ca, cb));
  return 0;
}
