#pragma once

#include "config.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace repdyn::cli {

struct Artifact {
  std::string name;  // relative to the output directory
  std::uintmax_t bytes = 0;
  std::string checksum;  // fnv1a-64 of the file contents, hex
};

struct Manifest {
  nlohmann::json config;
  double wall_seconds = 0.0;
  std::vector<Artifact> artifacts;
};

/// FNV-1a 64-bit hash of a file's bytes, as a hex string.
std::string fnv1a64_file(const std::filesystem::path& path);

/**
 * Executes an experiment: dispatches to the sweep, training, or metric
 * pipelines, writes every artifact under the configured output directory,
 * and finally writes `manifest.json` (config echo, wall time, artifact
 * checksums) atomically. On failure all partial outputs are removed and
 * the error is rethrown.
 */
Manifest run_experiment(const ExperimentConfig& config);

}  // namespace repdyn::cli
