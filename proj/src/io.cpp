#include "uvlink/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

namespace uvlink::io {
namespace {

std::string format_estimate(const std::optional<WindowEstimate>& e, bool start) {
  if (!e) return "not_found";
  return format_number(start ? e->start : e->end);
}

nlohmann::ordered_json estimate_json(const std::optional<WindowEstimate>& e) {
  if (!e) return nullptr;
  return {{"start_s", e->start}, {"end_s", e->end}, {"end_clamped", e->end_clamped}};
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf.data(), ptr);
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[hash & 0xf];
    hash >>= 4;
  }
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("failed writing output file " + path.string());
}

std::string impulse_response_csv(const ImpulseResponse& ir) {
  std::string out = "bin_start_s,arrival_probability\n";
  for (std::size_t i = 0; i < ir.bins.size(); ++i) {
    out += format_number(ir.bin_start(i));
    out += ',';
    out += format_number(ir.bins[i]);
    out += '\n';
  }
  return out;
}

std::string trace_csv(const PhotoelectronTrace& trace) {
  std::string out = "chip_index,count\n";
  for (std::size_t i = 0; i < trace.counts.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += std::to_string(trace.counts[i]);
    out += '\n';
  }
  return out;
}

std::string template_csv(const PulseTemplate& pulse) {
  std::string out = "m,value\n";
  for (std::size_t m = 0; m < pulse.values.size(); ++m) {
    out += std::to_string(m + 1) + ',' + format_number(pulse.values[m]) + '\n';
  }
  return out;
}

std::string ber_curve_csv(std::span<const BerPoint> grid) {
  std::string out = "lambda_s,T1_s,ber,lambda_b,threshold\n";
  for (const BerPoint& p : grid) {
    out += format_number(p.lambda_s) + ',' + format_number(p.window_length) + ',' +
           format_number(p.ber) + ',' + format_number(p.lambda_b) + ',' +
           std::to_string(p.threshold) + '\n';
  }
  return out;
}

std::string broadening_csv(std::span<const BroadeningRow> rows) {
  std::string out = "elevation_rad,broadening_s,left_s,right_s,total_arrival\n";
  for (const BroadeningRow& r : rows) {
    out += format_number(r.elevation) + ',' + format_number(r.broadening.broadening) + ',' +
           format_number(r.broadening.left_boundary) + ',' +
           format_number(r.broadening.right_boundary) + ',' + format_number(r.total_arrival) +
           '\n';
  }
  return out;
}

std::string localization_table_csv(std::span<const LocalizationRow> rows) {
  std::string out = "quantity";
  for (const auto& r : rows) out += ',' + format_number(r.distance / 1000.0);
  out += '\n';

  auto emit = [&](std::string_view name, auto&& cell) {
    out += name;
    for (const auto& r : rows) out += ',' + cell(r);
    out += '\n';
  };
  emit("P_L", [](const LocalizationRow& r) { return format_number(r.sample.truth.start); });
  emit("P_L1_hat", [](const LocalizationRow& r) { return format_estimate(r.sample.counting, true); });
  emit("P_L2_hat",
       [](const LocalizationRow& r) { return format_estimate(r.sample.correlation, true); });
  emit("P_R", [](const LocalizationRow& r) { return format_number(r.sample.truth.end); });
  emit("P_R1_hat",
       [](const LocalizationRow& r) { return format_estimate(r.sample.counting, false); });
  emit("P_R2_hat",
       [](const LocalizationRow& r) { return format_estimate(r.sample.correlation, false); });
  emit("e_M_counting", [](const LocalizationRow& r) { return format_number(r.counting.e_m); });
  emit("e_M_matching", [](const LocalizationRow& r) { return format_number(r.correlation.e_m); });
  emit("not_found_counting",
       [](const LocalizationRow& r) { return std::to_string(r.counting.not_found); });
  emit("not_found_matching",
       [](const LocalizationRow& r) { return std::to_string(r.correlation.not_found); });
  emit("lambda_s", [](const LocalizationRow& r) { return format_number(r.lambda_s); });
  emit("pulse_energy_J", [](const LocalizationRow& r) { return format_number(r.pulse_energy); });
  return out;
}

nlohmann::ordered_json to_json(const Geometry& g) {
  return {{"baseline_distance", g.baseline_distance}, {"tx_elevation", g.tx_elevation},
          {"rx_elevation", g.rx_elevation},           {"rx_fov", g.rx_fov},
          {"aperture_area", g.aperture_area},         {"tx_divergence", g.tx_divergence}};
}

nlohmann::ordered_json to_json(const AtmosphereParams& a) {
  return {{"k_a", a.k_a}, {"k_s_rayleigh", a.k_s_rayleigh}, {"k_s_mie", a.k_s_mie}, {"g", a.g},
          {"f", a.f},     {"gamma", a.gamma},               {"wavelength", a.wavelength}};
}

nlohmann::ordered_json to_json(const SourceDetectorParams& s) {
  return {{"pulse_energy", s.pulse_energy},
          {"quantum_efficiency", s.quantum_efficiency},
          {"wavelength", s.wavelength},
          {"background_rate", s.background_rate},
          {"photon_energy", s.photon_energy()}};
}

nlohmann::ordered_json to_json(const ImpulseResponse& ir) {
  return {{"bin_width_s", ir.bin_width},
          {"bins", ir.bins.size()},
          {"photons_launched", ir.photons_launched},
          {"time_origin_s", ir.time_origin},
          {"receiver_reachable", ir.receiver_reachable},
          {"total_arrival_probability", ir.total()}};
}

nlohmann::ordered_json to_json(const PhotoelectronTrace& trace) {
  std::uint64_t total = 0;
  for (const auto c : trace.counts) total += c;
  return {{"chip_duration_s", trace.chip_duration},
          {"chips", trace.counts.size()},
          {"total_count", total},
          {"truth_window_s", {trace.truth.start, trace.truth.end}}};
}

nlohmann::ordered_json to_json(const LaserComparison& c) {
  return {{"lambda_s", c.lambda_s},
          {"pulse_window_s", c.pulse_window},
          {"continuous_window_s", c.continuous_window},
          {"pulse_lambda_b", c.pulse_lambda_b},
          {"continuous_lambda_b", c.continuous_lambda_b},
          {"pulse_ber", c.pulse_ber},
          {"continuous_ber", c.continuous_ber},
          {"pulse_advantage", c.pulse_advantage}};
}

nlohmann::ordered_json to_json(const LocalizationRow& r) {
  auto summary = [](const DeviationSummary& s) {
    return nlohmann::ordered_json{{"e_M_s", std::isnan(s.e_m) ? nlohmann::ordered_json(nullptr)
                                                              : nlohmann::ordered_json(s.e_m)},
                                  {"used", s.used},
                                  {"not_found", s.not_found}};
  };
  return {{"distance_m", r.distance},
          {"pulse_energy_J", r.pulse_energy},
          {"mean_lambda_s", r.lambda_s},
          {"template_chips", r.template_length},
          {"counting", summary(r.counting)},
          {"matching", summary(r.correlation)},
          {"sample",
           {{"truth_s", {r.sample.truth.start, r.sample.truth.end}},
            {"counting", estimate_json(r.sample.counting)},
            {"matching", estimate_json(r.sample.correlation)}}}};
}

}  // namespace uvlink::io
