#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "uvlink/atmosphere.hpp"
#include "uvlink/channel.hpp"
#include "uvlink/localization.hpp"
#include "uvlink/signal.hpp"

namespace uvlink {

/// Invalid or malformed configuration. The message starts with the dotted
/// field path.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ChannelRunConfig {
  std::uint64_t photons = 1'000'000;
  std::uint64_t realizations = 4;
  double threshold_fraction = 0.01;
};

struct BroadeningRunConfig {
  std::vector<double> elevations;  ///< rad; pi/12 .. pi/2 by default
  std::uint64_t photons = 1'000'000;
  std::uint64_t realizations = 20;
  double threshold_fraction = 0.01;

  BroadeningRunConfig();
};

struct BerRunConfig {
  std::vector<double> lambda_s{50.0, 75.0, 100.0};
  std::vector<double> window_lengths{1e-5, 2e-5, 5e-5, 1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3, 1e-2};
  std::uint64_t mc_trials = 0;  ///< per grid point; 0 skips the Monte Carlo column
  double symbol_rate = 100.0;   ///< continuous-laser comparison, 1/s
  std::vector<double> pulse_windows{1e-4, 1e-3, 1e-2};
};

struct LocalizationRunConfig {
  std::vector<double> distances{5000.0, 6000.0, 7000.0, 8000.0, 9000.0};
  std::uint64_t photons = 20'000;
  std::uint64_t realizations = 200;
  std::uint64_t template_realizations = 100;
  double target_lambda_s = 50.0;
  std::uint64_t counting_window_chips = 100;
  std::uint64_t counting_threshold = 2;
  double correlation_threshold_factor = 3.0;
  CorrelationEndRule end_rule = CorrelationEndRule::kFirstAtOrBelowThreshold;
  TraceOptions trace;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "uvlink_out";
  Geometry geometry;
  AtmosphereParams atmosphere;
  SourceDetectorParams source;
  TransportOptions transport;  ///< photons and seed are set per command
  ChannelRunConfig channel;
  BroadeningRunConfig broadening;
  BerRunConfig ber;
  LocalizationRunConfig localization;

  /// Throws ConfigError naming the first offending field.
  void validate() const;
  /// Localization parameters assembled for the library call.
  LocalizationSetup localization_setup() const;
};

/// Parses a JSON config; absent keys keep their defaults, unknown keys are
/// rejected.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON of every resolved setting except the output directory.
nlohmann::ordered_json to_json(const ExperimentConfig& config);
/// FNV-1a of the canonical JSON dump.
std::string config_hash(const ExperimentConfig& config);

std::string_view to_string(CorrelationEndRule rule);
std::string_view to_string(Estimator estimator);

}  // namespace uvlink
