#include "uvlink/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "uvlink/random.hpp"

namespace uvlink {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMinWeight = 1e-12;
constexpr std::uint64_t kBlockPhotons = 4096;
constexpr std::uint64_t kWaveBlocks = 64;

void require_field(bool ok, const char* prefix, const char* field, const char* what) {
  if (!ok) {
    throw std::invalid_argument(std::string(prefix) + field + ": " + what);
  }
}

// Everything a photon history needs, resolved once per simulation.
struct TransportContext {
  Geometry geometry;
  AtmosphereParams atmosphere;
  ScatteringSampler sampler;
  TransportOptions options;
  Vec3 rx_position;
  Vec3 tx_axis;
  Vec3 rx_axis;
  double cos_fov;
  double k_e;
  double albedo;
  double aperture_radius;
  std::size_t bin_count;

  TransportContext(const Geometry& g, const AtmosphereParams& a, const TransportOptions& o)
      : geometry(g),
        atmosphere(a),
        sampler(a),
        options(o),
        rx_position(g.receiver_position()),
        tx_axis(g.tx_axis()),
        rx_axis(g.rx_axis()),
        cos_fov(std::cos(g.rx_fov)),
        k_e(a.k_e()),
        albedo(a.albedo()),
        aperture_radius(std::sqrt(g.aperture_area / kPi)),
        bin_count(static_cast<std::size_t>(std::ceil(o.max_time / o.bin_width))) {}

  bool in_fov(const Vec3& from_receiver, double distance) const {
    return dot(from_receiver, rx_axis) >= cos_fov * distance;
  }
};

Vec3 launch_direction(const TransportContext& ctx, Xoshiro256pp& rng) {
  const double cos_div = std::cos(ctx.geometry.tx_divergence);
  const double mu = 1.0 - rng.uniform() * (1.0 - cos_div);
  const double phi = sample_azimuth(rng.uniform());
  return deflect(ctx.tx_axis, mu, phi);
}

// Runs one photon history and reports (bin, value) scores to `tally`.
template <typename Tally>
void trace_photon(const TransportContext& ctx, std::uint64_t index, Tally&& tally) {
  Xoshiro256pp rng(substream_key(ctx.options.seed, {+Domain::kPhoton, index}));
  Vec3 position{};
  Vec3 direction = launch_direction(ctx, rng);
  double path = 0.0;
  double weight = 1.0;
  const double inv_c_bin = 1.0 / (kSpeedOfLight * ctx.options.bin_width);

  auto score = [&](double total_path, double value) {
    const double bin = total_path * inv_c_bin;
    if (bin < static_cast<double>(ctx.bin_count)) {
      tally(static_cast<std::size_t>(bin), value);
    }
  };

  const bool analog = ctx.options.estimator == Estimator::kAnalog;
  for (int event = 0; event <= ctx.options.max_scatters; ++event) {
    const double flight = sample_free_distance(rng.uniform_open(), ctx.k_e);

    if (analog) {
      // Aperture modelled as a disc of area A facing the incoming photon.
      const Vec3 to_rx = ctx.rx_position - position;
      const double along = dot(to_rx, direction);
      if (along > 0.0 && along < flight) {
        const double miss2 = dot(to_rx, to_rx) - along * along;
        if (miss2 <= ctx.aperture_radius * ctx.aperture_radius &&
            ctx.in_fov(-direction, 1.0)) {
          score(path + along, weight);
          return;
        }
      }
    }
    if (event == ctx.options.max_scatters) break;

    position += direction * flight;
    path += flight;
    weight *= ctx.albedo;

    if (!analog) {
      const Vec3 to_rx = ctx.rx_position - position;
      const double distance = norm(to_rx);
      if (distance > 0.0 && ctx.in_fov(-to_rx, distance)) {
        const double mu_r = std::clamp(dot(direction, to_rx) / distance, -1.0, 1.0);
        const double scored = std::max(distance, ctx.options.min_receiver_distance);
        const double value = weight * ctx.sampler.density(mu_r) *
                             ctx.geometry.aperture_area / (scored * scored) *
                             std::exp(-ctx.k_e * scored);
        score(path + distance, value);
      }
    }
    if (weight < kMinWeight) break;

    const double mu = ctx.sampler.sample(rng.uniform());
    const double phi = sample_azimuth(rng.uniform());
    direction = normalized(deflect(direction, mu, phi));
  }
}

ImpulseResponse finish(const TransportContext& ctx, std::vector<double> bins) {
  const double scale = 1.0 / static_cast<double>(ctx.options.photons);
  for (double& v : bins) v *= scale;
  while (!bins.empty() && bins.back() == 0.0) bins.pop_back();
  ImpulseResponse ir;
  ir.bin_width = ctx.options.bin_width;
  ir.bins = std::move(bins);
  ir.photons_launched = ctx.options.photons;
  return ir;
}

ImpulseResponse unreachable_response(const TransportOptions& options) {
  ImpulseResponse ir;
  ir.bin_width = options.bin_width;
  ir.photons_launched = options.photons;
  ir.receiver_reachable = false;
  return ir;
}

}  // namespace

void Geometry::validate() const {
  constexpr const char* p = "geometry.";
  require_field(std::isfinite(baseline_distance) && baseline_distance > 0.0, p,
                "baseline_distance", "must be > 0");
  require_field(std::isfinite(aperture_area) && aperture_area > 0.0, p, "aperture_area",
                "must be > 0");
  require_field(tx_elevation >= 0.0 && tx_elevation <= kPi / 2, p, "tx_elevation",
                "must lie in [0, pi/2]");
  require_field(rx_elevation >= 0.0 && rx_elevation <= kPi / 2, p, "rx_elevation",
                "must lie in [0, pi/2]");
  require_field(rx_fov > 0.0 && rx_fov <= kPi / 2, p, "rx_fov", "must lie in (0, pi/2]");
  require_field(tx_divergence >= 0.0 && tx_divergence <= kPi / 4, p, "tx_divergence",
                "must lie in [0, pi/4]");
}

Vec3 Geometry::tx_axis() const { return {std::cos(tx_elevation), 0.0, std::sin(tx_elevation)}; }

Vec3 Geometry::rx_axis() const {
  return {-std::cos(rx_elevation), 0.0, std::sin(rx_elevation)};
}

void TransportOptions::validate() const {
  constexpr const char* p = "transport.";
  require_field(photons >= 1, p, "photons", "must be >= 1");
  require_field(std::isfinite(bin_width) && bin_width > 0.0, p, "bin_width", "must be > 0");
  require_field(max_scatters >= 1, p, "max_scatters", "must be >= 1");
  require_field(std::isfinite(max_time) && max_time > bin_width, p, "max_time",
                "must exceed bin_width");
  require_field(std::isfinite(min_receiver_distance) && min_receiver_distance >= 0.0, p,
                "min_receiver_distance", "must be >= 0");
}

double ImpulseResponse::total() const {
  double sum = 0.0;
  for (const double v : bins) sum += v;
  return sum;
}

SupportRange threshold_support(std::span<const double> values, double threshold_fraction) {
  if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0)) {
    throw std::invalid_argument("threshold_fraction must lie in (0, 1)");
  }
  const auto peak_it = std::max_element(values.begin(), values.end());
  if (peak_it == values.end() || !(*peak_it > 0.0)) {
    throw std::invalid_argument("no received signal");
  }
  const double level = threshold_fraction * *peak_it;
  SupportRange range;
  range.first = static_cast<std::size_t>(
      std::find_if(values.begin(), values.end(), [&](double v) { return v >= level; }) -
      values.begin());
  range.last = values.size() - 1 -
               static_cast<std::size_t>(std::find_if(values.rbegin(), values.rend(),
                                                     [&](double v) { return v >= level; }) -
                                        values.rbegin());
  return range;
}

double local_estimate_arrival(const Vec3& scatter_position, const Vec3& incident_direction,
                              const Geometry& geometry, const AtmosphereParams& atmosphere) {
  const Vec3 to_rx = geometry.receiver_position() - scatter_position;
  const double distance = norm(to_rx);
  if (!(distance > 0.0)) {
    throw std::invalid_argument("scatter position coincides with the receiver");
  }
  if (dot(-to_rx, geometry.rx_axis()) < std::cos(geometry.rx_fov) * distance) {
    return 0.0;
  }
  const double mu_r = std::clamp(dot(incident_direction, to_rx) / distance, -1.0, 1.0);
  return combined_phase(mu_r, atmosphere) * geometry.aperture_area / (distance * distance) *
         std::exp(-atmosphere.k_e() * distance);
}

bool single_scatter_reachable(const Geometry& geometry) {
  const Vec3 rx = geometry.receiver_position();
  const Vec3 rx_axis = geometry.rx_axis();
  const double cos_fov = std::cos(geometry.rx_fov);
  const Vec3 tx_axis = geometry.tx_axis();

  std::vector<Vec3> rays{tx_axis};
  if (geometry.tx_divergence > 0.0) {
    const double mu = std::cos(geometry.tx_divergence);
    for (int k = 0; k < 32; ++k) {
      rays.push_back(deflect(tx_axis, mu, 2.0 * kPi * k / 32.0));
    }
  }
  // Log-spaced range out to 1000 baselines; the FOV/beam intersection along a
  // ray is an interval, which this grid resolves at any practical scale.
  const double near = 1e-3 * geometry.baseline_distance;
  const double far = 1e3 * geometry.baseline_distance;
  constexpr int kSteps = 4000;
  for (const Vec3& ray : rays) {
    for (int s = 0; s <= kSteps; ++s) {
      const double t = near * std::pow(far / near, static_cast<double>(s) / kSteps);
      const Vec3 from_rx = ray * t - rx;
      if (dot(from_rx, rx_axis) >= cos_fov * norm(from_rx)) return true;
    }
  }
  return false;
}

ImpulseResponse simulate_impulse_response(const Geometry& geometry,
                                          const AtmosphereParams& atmosphere,
                                          const TransportOptions& options) {
  geometry.validate();
  atmosphere.validate();
  options.validate();
  if (!single_scatter_reachable(geometry)) return unreachable_response(options);

  const TransportContext ctx(geometry, atmosphere, options);
  const std::uint64_t blocks = (options.photons + kBlockPhotons - 1) / kBlockPhotons;
  std::vector<double> total(ctx.bin_count, 0.0);
  std::vector<std::vector<double>> wave(std::min(kWaveBlocks, blocks),
                                        std::vector<double>(ctx.bin_count));

  for (std::uint64_t wave_begin = 0; wave_begin < blocks; wave_begin += kWaveBlocks) {
    const auto wave_size =
        static_cast<std::int64_t>(std::min(kWaveBlocks, blocks - wave_begin));
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t b = 0; b < wave_size; ++b) {
      std::vector<double>& hist = wave[b];
      std::fill(hist.begin(), hist.end(), 0.0);
      const std::uint64_t first = (wave_begin + b) * kBlockPhotons;
      const std::uint64_t last = std::min(first + kBlockPhotons, options.photons);
      for (std::uint64_t photon = first; photon < last; ++photon) {
        trace_photon(ctx, photon, [&hist](std::size_t bin, double v) { hist[bin] += v; });
      }
    }
    for (std::int64_t b = 0; b < wave_size; ++b) {
      for (std::size_t i = 0; i < ctx.bin_count; ++i) total[i] += wave[b][i];
    }
  }
  return finish(ctx, std::move(total));
}

namespace serial {

ImpulseResponse simulate_impulse_response(const Geometry& geometry,
                                          const AtmosphereParams& atmosphere,
                                          const TransportOptions& options) {
  geometry.validate();
  atmosphere.validate();
  options.validate();
  if (!single_scatter_reachable(geometry)) return unreachable_response(options);

  const TransportContext ctx(geometry, atmosphere, options);
  std::vector<double> hist(ctx.bin_count, 0.0);
  for (std::uint64_t photon = 0; photon < options.photons; ++photon) {
    trace_photon(ctx, photon, [&hist](std::size_t bin, double v) { hist[bin] += v; });
  }
  return finish(ctx, std::move(hist));
}

}  // namespace serial

ImpulseResponse average_impulse_responses(std::span<const ImpulseResponse> responses) {
  if (responses.empty()) {
    throw std::invalid_argument("cannot average an empty list of impulse responses");
  }
  ImpulseResponse mean;
  mean.bin_width = responses.front().bin_width;
  mean.time_origin = responses.front().time_origin;
  mean.receiver_reachable = false;
  std::size_t length = 0;
  for (const auto& ir : responses) {
    if (ir.bin_width != mean.bin_width) {
      throw std::invalid_argument("impulse responses have mismatched bin widths");
    }
    if (ir.time_origin != mean.time_origin) {
      throw std::invalid_argument("impulse responses have mismatched time origins");
    }
    length = std::max(length, ir.bins.size());
    mean.photons_launched += ir.photons_launched;
    mean.receiver_reachable = mean.receiver_reachable || ir.receiver_reachable;
  }
  mean.bins.assign(length, 0.0);
  for (const auto& ir : responses) {
    for (std::size_t i = 0; i < ir.bins.size(); ++i) mean.bins[i] += ir.bins[i];
  }
  const double inv = 1.0 / static_cast<double>(responses.size());
  for (double& v : mean.bins) v *= inv;
  return mean;
}

BroadeningResult pulse_broadening(const ImpulseResponse& ir, double threshold_fraction) {
  const SupportRange range = threshold_support(ir.bins, threshold_fraction);
  BroadeningResult result;
  result.left_boundary = ir.bin_start(range.first);
  result.right_boundary = ir.bin_start(range.last + 1);
  result.broadening = result.right_boundary - result.left_boundary;
  return result;
}

std::vector<BroadeningRow> broadening_elevation_sweep(const Geometry& geometry_base,
                                                      const AtmosphereParams& atmosphere,
                                                      std::span<const double> elevations,
                                                      int realizations_per_point,
                                                      const TransportOptions& options,
                                                      double threshold_fraction) {
  if (elevations.empty()) throw std::invalid_argument("elevation list is empty");
  if (realizations_per_point < 1) {
    throw std::invalid_argument("realizations_per_point must be >= 1");
  }
  std::vector<BroadeningRow> rows;
  rows.reserve(elevations.size());
  for (const double elevation : elevations) {
    Geometry geometry = geometry_base;
    geometry.rx_elevation = elevation;
    std::vector<ImpulseResponse> responses;
    responses.reserve(static_cast<std::size_t>(realizations_per_point));
    for (int r = 0; r < realizations_per_point; ++r) {
      TransportOptions run = options;
      run.seed = substream_key(options.seed,
                               {+Domain::kRealization, static_cast<std::uint64_t>(r)});
      responses.push_back(simulate_impulse_response(geometry, atmosphere, run));
    }
    const ImpulseResponse mean = average_impulse_responses(responses);
    rows.push_back({elevation, pulse_broadening(mean, threshold_fraction), mean.total()});
  }
  return rows;
}

}  // namespace uvlink
