#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "uvlink/config.hpp"

namespace uvlink::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInvalidConfig = 1,
  kRuntimeFailure = 2,
};

/// Each command writes its artifacts under config.output_dir and returns the
/// paths written, in order.
using Artifacts = std::vector<std::filesystem::path>;

Artifacts run_simulate_channel(const ExperimentConfig& config);
Artifacts run_broadening_sweep(const ExperimentConfig& config);
Artifacts run_ber_curve(const ExperimentConfig& config);
Artifacts run_localization_benchmark(const ExperimentConfig& config);
Artifacts run_build_template(const ExperimentConfig& config);
Artifacts run_calibrate_energy(const ExperimentConfig& config);

/// Command-line entry point; returns an ExitCode.
int run(int argc, const char* const* argv);

}  // namespace uvlink::cli
