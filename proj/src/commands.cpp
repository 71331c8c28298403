#include "uvlink/commands.hpp"

#include <omp.h>

#include <cmath>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "uvlink/detection.hpp"
#include "uvlink/io.hpp"
#include "uvlink/random.hpp"

namespace uvlink::cli {
namespace {

using nlohmann::ordered_json;

// Writes CSV + JSON pairs that all carry the same provenance.
class ArtifactWriter {
 public:
  ArtifactWriter(const ExperimentConfig& config, std::string command)
      : dir_(config.output_dir),
        command_(std::move(command)),
        hash_(config_hash(config)),
        seed_(config.seed),
        config_(to_json(config)) {}

  void csv(const std::string& stem, const std::string& body, ordered_json data) {
    const std::string header =
        "# uvlink " + command_ + " config_hash=" + hash_ + " seed=" + std::to_string(seed_) + '\n';
    write(stem + ".csv", header + body);
    json(stem, std::move(data), stem + ".csv");
  }

  void json(const std::string& stem, ordered_json data, const std::string& companion = "") {
    ordered_json doc = {{"tool", "uvlink"},
                        {"command", command_},
                        {"config_hash", hash_},
                        {"seed", seed_}};
    if (!companion.empty()) doc["artifact"] = companion;
    doc["data"] = std::move(data);
    doc["config"] = config_;
    write(stem + ".json", doc.dump(2) + '\n');
  }

  Artifacts take() { return std::move(written_); }

 private:
  void write(const std::string& name, const std::string& contents) {
    const auto path = dir_ / name;
    io::write_file(path, contents);
    written_.push_back(path);
  }

  std::filesystem::path dir_;
  std::string command_;
  std::string hash_;
  std::uint64_t seed_;
  ordered_json config_;
  Artifacts written_;
};

std::string distance_tag(double metres) {
  if (metres == std::floor(metres) && metres < 1e12) {
    return std::to_string(static_cast<std::uint64_t>(metres)) + "m";
  }
  return io::format_number(metres) + "m";
}

ordered_json broadening_json(const ImpulseResponse& ir, double threshold_fraction) {
  if (ir.total() <= 0.0) return nullptr;
  const BroadeningResult b = pulse_broadening(ir, threshold_fraction);
  return {{"threshold_fraction", threshold_fraction},
          {"left_s", b.left_boundary},
          {"right_s", b.right_boundary},
          {"broadening_s", b.broadening}};
}

ordered_json template_json(const PulseTemplate& pulse) {
  return {{"chip_duration_s", pulse.chip_duration},
          {"length_chips", pulse.length()},
          {"length_s", pulse.chip_duration * static_cast<double>(pulse.length())}};
}

}  // namespace

Artifacts run_simulate_channel(const ExperimentConfig& config) {
  config.validate();
  ArtifactWriter out(config, "simulate-channel");
  TransportOptions options = config.transport;
  options.photons = config.channel.photons;

  std::vector<ImpulseResponse> responses;
  for (std::uint64_t r = 0; r < config.channel.realizations; ++r) {
    options.seed = substream_key(config.seed, {+Domain::kRealization, r});
    ImpulseResponse ir = simulate_impulse_response(config.geometry, config.atmosphere, options);
    ordered_json meta = io::to_json(ir);
    meta["realization"] = r;
    meta["broadening"] = broadening_json(ir, config.channel.threshold_fraction);
    char stem[32];
    std::snprintf(stem, sizeof stem, "ir_r%03llu", static_cast<unsigned long long>(r));
    out.csv(stem, io::impulse_response_csv(ir), std::move(meta));
    responses.push_back(std::move(ir));
  }

  const ImpulseResponse mean = average_impulse_responses(responses);
  ordered_json meta = io::to_json(mean);
  meta["realizations"] = responses.size();
  meta["broadening"] = broadening_json(mean, config.channel.threshold_fraction);
  out.csv("ir_mean", io::impulse_response_csv(mean), std::move(meta));
  return out.take();
}

Artifacts run_broadening_sweep(const ExperimentConfig& config) {
  config.validate();
  ArtifactWriter out(config, "broadening-sweep");
  TransportOptions options = config.transport;
  options.photons = config.broadening.photons;
  options.seed = config.seed;
  const auto rows = broadening_elevation_sweep(
      config.geometry, config.atmosphere, config.broadening.elevations,
      static_cast<int>(config.broadening.realizations), options,
      config.broadening.threshold_fraction);

  double lo = rows.front().broadening.broadening;
  double hi = lo;
  for (const auto& row : rows) {
    lo = std::min(lo, row.broadening.broadening);
    hi = std::max(hi, row.broadening.broadening);
  }
  ordered_json meta = {{"baseline_distance", config.geometry.baseline_distance},
                       {"realizations_per_elevation", config.broadening.realizations},
                       {"threshold_fraction", config.broadening.threshold_fraction},
                       {"min_broadening_s", lo},
                       {"max_broadening_s", hi},
                       {"max_over_min", lo > 0.0 ? ordered_json(hi / lo) : ordered_json(nullptr)}};
  out.csv("broadening", io::broadening_csv(rows), std::move(meta));
  return out.take();
}

Artifacts run_ber_curve(const ExperimentConfig& config) {
  config.validate();
  ArtifactWriter out(config, "ber-curve");
  const auto& ber = config.ber;
  const double background = config.source.background_rate;
  const auto grid = ber_curve(ber.lambda_s, background, ber.window_lengths);
  out.csv("ber_curve", io::ber_curve_csv(grid),
          {{"background_rate", background}, {"points", grid.size()}});

  if (ber.mc_trials > 0) {
    std::string body = "lambda_s,T1_s,ber_analytic,ber_monte_carlo,standard_error,errors,trials\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const OokOperatingPoint point{grid[i].lambda_s, background, grid[i].window_length};
      const BerEstimate mc = ook_ber_monte_carlo(
          point, ber.mc_trials, substream_key(config.seed, {+Domain::kBerTrials, i}));
      body += io::format_number(grid[i].lambda_s) + ',' +
              io::format_number(grid[i].window_length) + ',' + io::format_number(grid[i].ber) +
              ',' + io::format_number(mc.ber) + ',' + io::format_number(mc.standard_error) + ',' +
              std::to_string(mc.errors) + ',' + std::to_string(mc.trials) + '\n';
    }
    out.csv("ber_monte_carlo", body, {{"trials_per_point", ber.mc_trials}});
  }

  // Energy per symbol fixed at 1 J, so channel_scale is lambda_s per joule.
  ordered_json records = ordered_json::array();
  for (const double lambda_s : ber.lambda_s) {
    for (const double window : ber.pulse_windows) {
      ordered_json rec = io::to_json(
          continuous_laser_benchmark(ber.symbol_rate, 1.0, background, lambda_s, window));
      rec["symbol_rate"] = ber.symbol_rate;
      records.push_back(std::move(rec));
    }
  }
  out.json("ber_benchmark", {{"records", std::move(records)}});
  return out.take();
}

Artifacts run_localization_benchmark(const ExperimentConfig& config) {
  config.validate();
  ArtifactWriter out(config, "localize-bench");
  const auto& loc = config.localization;
  const LocalizationSetup setup = config.localization_setup();
  const auto rows =
      localization_benchmark(loc.distances, setup, loc.realizations, loc.template_realizations,
                             config.seed);

  ordered_json per_distance = ordered_json::array();
  for (const auto& row : rows) per_distance.push_back(io::to_json(row));
  out.csv("localization_table", io::localization_table_csv(rows),
          {{"realizations", loc.realizations},
           {"template_realizations", loc.template_realizations},
           {"rows", std::move(per_distance)}});

  // Realization 0 at each distance, the one reported in the table's sample rows.
  for (std::size_t di = 0; di < rows.size(); ++di) {
    const PhotoelectronTrace trace =
        benchmark_trace(setup, loc.distances[di], di, 0, rows[di].pulse_energy, config.seed);
    ordered_json meta = io::to_json(trace);
    meta["distance_m"] = loc.distances[di];
    meta["realization"] = 0;
    meta["pulse_energy_J"] = rows[di].pulse_energy;
    out.csv("trace_" + distance_tag(loc.distances[di]), io::trace_csv(trace), std::move(meta));
  }
  return out.take();
}

Artifacts run_build_template(const ExperimentConfig& config) {
  config.validate();
  ArtifactWriter out(config, "build-template");
  const auto& loc = config.localization;
  const LocalizationSetup setup = config.localization_setup();
  for (std::size_t di = 0; di < loc.distances.size(); ++di) {
    const auto irs = draw_template_channels(setup, loc.distances[di], di,
                                            loc.template_realizations, config.seed);
    const PulseTemplate pulse =
        build_template(irs, loc.trace.chip_duration, loc.trace.threshold_fraction);
    ordered_json meta = template_json(pulse);
    meta["distance_m"] = loc.distances[di];
    meta["realizations"] = loc.template_realizations;
    out.csv("template_" + distance_tag(loc.distances[di]), io::template_csv(pulse),
            std::move(meta));
  }
  return out.take();
}

Artifacts run_calibrate_energy(const ExperimentConfig& config) {
  config.validate();
  ArtifactWriter out(config, "calibrate-energy");
  const auto& loc = config.localization;
  const LocalizationSetup setup = config.localization_setup();
  std::string body = "distance_m,arrival_probability,pulse_energy_J,target_lambda_s\n";
  for (std::size_t di = 0; di < loc.distances.size(); ++di) {
    const auto irs = draw_template_channels(setup, loc.distances[di], di,
                                            loc.template_realizations, config.seed);
    const ImpulseResponse mean = average_impulse_responses(irs);
    const double energy = calibrate_pulse_energy(mean, config.source, loc.target_lambda_s);
    body += io::format_number(loc.distances[di]) + ',' + io::format_number(mean.total()) + ',' +
            io::format_number(energy) + ',' + io::format_number(loc.target_lambda_s) + '\n';
  }
  out.csv("calibration", body,
          {{"realizations", loc.template_realizations},
           {"source", io::to_json(config.source)}});
  return out.take();
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Pulse-laser NLOS UV link simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed, photons, realizations;
  std::optional<std::string> out_dir;
  int threads = 0;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "master seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--photons", photons, "photons per channel realization");
  app.add_option("--realizations", realizations, "channel realizations");

  struct Entry {
    const char* name;
    const char* help;
    Artifacts (*fn)(const ExperimentConfig&);
  };
  static constexpr Entry kCommands[] = {
      {"simulate-channel", "impulse responses per realization and their mean",
       run_simulate_channel},
      {"broadening-sweep", "pulse broadening against receiver elevation", run_broadening_sweep},
      {"ber-curve", "OOK BER against processing window", run_ber_curve},
      {"localize-bench", "counting vs correlation pulse localization", run_localization_benchmark},
      {"build-template", "averaged pulse templates per distance", run_build_template},
      {"calibrate-energy", "pulse energy giving the target photoelectron count",
       run_calibrate_energy},
  };
  for (const auto& entry : kCommands) app.add_subcommand(entry.name, entry.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kInvalidConfig;
  }

  const Entry* chosen = nullptr;
  for (const auto& entry : kCommands) {
    if (app.got_subcommand(entry.name)) chosen = &entry;
  }
  const std::string name = chosen->name;

  ExperimentConfig config;
  try {
    if (!config_path.empty()) config = load_config(config_path);
    if (seed) config.seed = *seed;
    if (out_dir) config.output_dir = *out_dir;
    if (photons) {
      if (name == "simulate-channel") {
        config.channel.photons = *photons;
      } else if (name == "broadening-sweep") {
        config.broadening.photons = *photons;
      } else if (name == "ber-curve") {
        throw ConfigError("--photons: not used by ber-curve");
      } else {
        config.localization.photons = *photons;
      }
    }
    if (realizations) {
      if (name == "simulate-channel") {
        config.channel.realizations = *realizations;
      } else if (name == "broadening-sweep") {
        config.broadening.realizations = *realizations;
      } else if (name == "localize-bench") {
        config.localization.realizations = *realizations;
      } else if (name == "ber-curve") {
        throw ConfigError("--realizations: not used by ber-curve");
      } else {
        config.localization.template_realizations = *realizations;
      }
    }
    config.validate();
  } catch (const std::invalid_argument& e) {
    std::cerr << "uvlink: invalid config: " << e.what() << '\n';
    return kInvalidConfig;
  }

  if (threads > 0) omp_set_num_threads(threads);
  try {
    for (const auto& path : chosen->fn(config)) std::cout << path.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "uvlink: " << name << " failed: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kSuccess;
}

}  // namespace uvlink::cli
