#include "uvlink/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "uvlink/io.hpp"

namespace uvlink {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Reads one JSON object, remembering which keys were consumed so that typos
// surface as errors instead of silently falling back to defaults.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(where("") + ": expected an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    const auto it = node_.find(key);
    if (it == node_.end()) return;
    try {
      if constexpr (std::is_same_v<T, std::uint64_t>) {
        if (!it->is_number_unsigned()) throw ConfigError("expected a non-negative integer");
      } else if constexpr (std::is_same_v<T, int>) {
        if (!it->is_number_integer()) throw ConfigError("expected an integer");
      } else if constexpr (std::is_same_v<T, double>) {
        if (!it->is_number()) throw ConfigError("expected a number");
      }
      out = it->get<T>();
    } catch (const std::exception& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
  }

  Section child(const char* key) {
    seen_.insert(key);
    const auto it = node_.find(key);
    static const json empty = json::object();
    return Section(it == node_.end() ? empty : *it, where(key));
  }

  std::string where(std::string_view key) const {
    if (key.empty()) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.contains(key)) throw ConfigError(where(key) + ": unknown key");
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

void require(bool ok, std::string_view field, std::string_view what) {
  if (!ok) throw ConfigError(std::string(field) + ": " + std::string(what));
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

template <typename Validate>
void prefixed(std::string_view prefix, Validate&& validate) {
  try {
    validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(prefix) + e.what());
  }
}

CorrelationEndRule parse_end_rule(const std::string& name, std::string_view field) {
  if (name == "threshold") return CorrelationEndRule::kFirstAtOrBelowThreshold;
  if (name == "zero") return CorrelationEndRule::kFirstZero;
  if (name == "zero_plus_length") return CorrelationEndRule::kFirstZeroPlusLength;
  throw ConfigError(std::string(field) + ": expected threshold, zero or zero_plus_length");
}

Estimator parse_estimator(const std::string& name, std::string_view field) {
  if (name == "local") return Estimator::kLocal;
  if (name == "analog") return Estimator::kAnalog;
  throw ConfigError(std::string(field) + ": expected local or analog");
}

}  // namespace

std::string_view to_string(CorrelationEndRule rule) {
  switch (rule) {
    case CorrelationEndRule::kFirstZero: return "zero";
    case CorrelationEndRule::kFirstZeroPlusLength: return "zero_plus_length";
    case CorrelationEndRule::kFirstAtOrBelowThreshold: return "threshold";
  }
  return "unknown";
}

std::string_view to_string(Estimator estimator) {
  return estimator == Estimator::kAnalog ? "analog" : "local";
}

BroadeningRunConfig::BroadeningRunConfig() {
  for (int k = 1; k <= 6; ++k) elevations.push_back(k * std::numbers::pi / 12.0);
}

void ExperimentConfig::validate() const {
  geometry.validate();
  atmosphere.validate();
  source.validate();
  prefixed("", [&] {
    TransportOptions t = transport;
    t.photons = 1;
    t.validate();
  });

  require(channel.photons >= 1, "channel.photons", "must be >= 1");
  require(channel.realizations >= 1, "channel.realizations", "must be >= 1");
  require(channel.threshold_fraction > 0.0 && channel.threshold_fraction < 1.0,
          "channel.threshold_fraction", "must lie in (0, 1)");

  require(!broadening.elevations.empty(), "broadening.elevations", "must not be empty");
  for (const double e : broadening.elevations) {
    require(e >= 0.0 && e <= std::numbers::pi / 2, "broadening.elevations",
            "every entry must lie in [0, pi/2]");
  }
  require(broadening.photons >= 1, "broadening.photons", "must be >= 1");
  require(broadening.realizations >= 1, "broadening.realizations", "must be >= 1");
  require(broadening.threshold_fraction > 0.0 && broadening.threshold_fraction < 1.0,
          "broadening.threshold_fraction", "must lie in (0, 1)");

  require(!ber.lambda_s.empty(), "ber.lambda_s", "must not be empty");
  for (const double v : ber.lambda_s) {
    require(std::isfinite(v) && v >= 0.0, "ber.lambda_s", "every entry must be >= 0");
  }
  require(!ber.window_lengths.empty(), "ber.window_lengths", "must not be empty");
  for (const double v : ber.window_lengths) {
    require(positive(v), "ber.window_lengths", "every entry must be > 0");
  }
  require(positive(ber.symbol_rate), "ber.symbol_rate", "must be > 0");
  for (const double v : ber.pulse_windows) {
    require(positive(v), "ber.pulse_windows", "every entry must be > 0");
  }

  const auto& loc = localization;
  require(!loc.distances.empty(), "localization.distances", "must not be empty");
  for (const double d : loc.distances) {
    require(positive(d), "localization.distances", "every entry must be > 0");
  }
  require(loc.photons >= 1, "localization.photons", "must be >= 1");
  require(loc.realizations >= 1, "localization.realizations", "must be >= 1");
  require(loc.template_realizations >= 1, "localization.template_realizations", "must be >= 1");
  require(positive(loc.target_lambda_s), "localization.target_lambda_s", "must be > 0");
  require(loc.counting_window_chips >= 1, "localization.counting_window_chips", "must be >= 1");
  require(loc.counting_threshold >= 1, "localization.counting_threshold", "must be >= 1");
  require(positive(loc.correlation_threshold_factor),
          "localization.correlation_threshold_factor", "must be > 0");
  prefixed("localization.", [&] { loc.trace.validate(); });
  require(std::abs(loc.trace.chip_duration - transport.bin_width) <= 1e-12 * transport.bin_width,
          "localization.trace.chip_duration", "must equal transport.bin_width");
  require(static_cast<double>(loc.counting_window_chips) * loc.trace.chip_duration <=
              loc.trace.frame_length,
          "localization.counting_window_chips", "window longer than the frame");
}

LocalizationSetup ExperimentConfig::localization_setup() const {
  LocalizationSetup s;
  s.geometry = geometry;
  s.atmosphere = atmosphere;
  s.source = source;
  s.transport = transport;
  s.transport.photons = localization.photons;
  s.trace = localization.trace;
  s.target_lambda_s = localization.target_lambda_s;
  s.counting_window_chips = localization.counting_window_chips;
  s.counting_threshold = localization.counting_threshold;
  s.correlation_threshold_factor = localization.correlation_threshold_factor;
  s.end_rule = localization.end_rule;
  return s;
}

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig c;
  Section root(doc, "");
  root.read("seed", c.seed);
  std::string out = c.output_dir.string();
  root.read("output_dir", out);
  c.output_dir = out;

  {
    auto s = root.child("geometry");
    s.read("baseline_distance", c.geometry.baseline_distance);
    s.read("tx_elevation", c.geometry.tx_elevation);
    s.read("rx_elevation", c.geometry.rx_elevation);
    s.read("rx_fov", c.geometry.rx_fov);
    s.read("aperture_area", c.geometry.aperture_area);
    s.read("tx_divergence", c.geometry.tx_divergence);
    s.finish();
  }
  {
    auto s = root.child("atmosphere");
    s.read("k_a", c.atmosphere.k_a);
    s.read("k_s_rayleigh", c.atmosphere.k_s_rayleigh);
    s.read("k_s_mie", c.atmosphere.k_s_mie);
    s.read("g", c.atmosphere.g);
    s.read("f", c.atmosphere.f);
    s.read("gamma", c.atmosphere.gamma);
    s.read("wavelength", c.atmosphere.wavelength);
    s.finish();
  }
  {
    auto s = root.child("source");
    s.read("pulse_energy", c.source.pulse_energy);
    s.read("quantum_efficiency", c.source.quantum_efficiency);
    s.read("wavelength", c.source.wavelength);
    s.read("background_rate", c.source.background_rate);
    s.finish();
  }
  {
    auto s = root.child("transport");
    s.read("bin_width", c.transport.bin_width);
    s.read("max_scatters", c.transport.max_scatters);
    s.read("max_time", c.transport.max_time);
    s.read("min_receiver_distance", c.transport.min_receiver_distance);
    std::string estimator(to_string(c.transport.estimator));
    s.read("estimator", estimator);
    c.transport.estimator = parse_estimator(estimator, s.where("estimator"));
    s.finish();
  }
  {
    auto s = root.child("channel");
    s.read("photons", c.channel.photons);
    s.read("realizations", c.channel.realizations);
    s.read("threshold_fraction", c.channel.threshold_fraction);
    s.finish();
  }
  {
    auto s = root.child("broadening");
    s.read("elevations", c.broadening.elevations);
    s.read("photons", c.broadening.photons);
    s.read("realizations", c.broadening.realizations);
    s.read("threshold_fraction", c.broadening.threshold_fraction);
    s.finish();
  }
  {
    auto s = root.child("ber");
    s.read("lambda_s", c.ber.lambda_s);
    s.read("window_lengths", c.ber.window_lengths);
    s.read("mc_trials", c.ber.mc_trials);
    s.read("symbol_rate", c.ber.symbol_rate);
    s.read("pulse_windows", c.ber.pulse_windows);
    s.finish();
  }
  {
    auto s = root.child("localization");
    auto& l = c.localization;
    s.read("distances", l.distances);
    s.read("photons", l.photons);
    s.read("realizations", l.realizations);
    s.read("template_realizations", l.template_realizations);
    s.read("target_lambda_s", l.target_lambda_s);
    s.read("counting_window_chips", l.counting_window_chips);
    s.read("counting_threshold", l.counting_threshold);
    s.read("correlation_threshold_factor", l.correlation_threshold_factor);
    std::string rule(to_string(l.end_rule));
    s.read("end_rule", rule);
    l.end_rule = parse_end_rule(rule, s.where("end_rule"));
    {
      auto t = s.child("trace");
      t.read("frame_length", l.trace.frame_length);
      t.read("pulse_offset", l.trace.pulse_offset);
      t.read("chip_duration", l.trace.chip_duration);
      t.read("threshold_fraction", l.trace.threshold_fraction);
      t.finish();
    }
    s.finish();
  }
  root.finish();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

ordered_json to_json(const ExperimentConfig& c) {
  const auto& l = c.localization;
  ordered_json transport = {{"bin_width", c.transport.bin_width},
                            {"max_scatters", c.transport.max_scatters},
                            {"max_time", c.transport.max_time},
                            {"min_receiver_distance", c.transport.min_receiver_distance},
                            {"estimator", to_string(c.transport.estimator)}};
  return {
      {"seed", c.seed},
      {"geometry", io::to_json(c.geometry)},
      {"atmosphere", io::to_json(c.atmosphere)},
      {"source",
       {{"pulse_energy", c.source.pulse_energy},
        {"quantum_efficiency", c.source.quantum_efficiency},
        {"wavelength", c.source.wavelength},
        {"background_rate", c.source.background_rate}}},
      {"transport", transport},
      {"channel",
       {{"photons", c.channel.photons},
        {"realizations", c.channel.realizations},
        {"threshold_fraction", c.channel.threshold_fraction}}},
      {"broadening",
       {{"elevations", c.broadening.elevations},
        {"photons", c.broadening.photons},
        {"realizations", c.broadening.realizations},
        {"threshold_fraction", c.broadening.threshold_fraction}}},
      {"ber",
       {{"lambda_s", c.ber.lambda_s},
        {"window_lengths", c.ber.window_lengths},
        {"mc_trials", c.ber.mc_trials},
        {"symbol_rate", c.ber.symbol_rate},
        {"pulse_windows", c.ber.pulse_windows}}},
      {"localization",
       {{"distances", l.distances},
        {"photons", l.photons},
        {"realizations", l.realizations},
        {"template_realizations", l.template_realizations},
        {"target_lambda_s", l.target_lambda_s},
        {"counting_window_chips", l.counting_window_chips},
        {"counting_threshold", l.counting_threshold},
        {"correlation_threshold_factor", l.correlation_threshold_factor},
        {"end_rule", to_string(l.end_rule)},
        {"trace",
         {{"frame_length", l.trace.frame_length},
          {"pulse_offset", l.trace.pulse_offset},
          {"chip_duration", l.trace.chip_duration},
          {"threshold_fraction", l.trace.threshold_fraction}}}}},
  };
}

std::string config_hash(const ExperimentConfig& config) {
  return io::fnv1a_hex(to_json(config).dump());
}

}  // namespace uvlink
