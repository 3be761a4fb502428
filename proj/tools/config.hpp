#pragma once

#include "repdyn/gaussian.hpp"
#include "repdyn/spectrum.hpp"
#include "repdyn/train.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace repdyn::cli {

enum class Command { sweep_features, sweep_variance, train_toy, metrics };

std::string command_name(Command command);

struct MetricsParams {
  std::filesystem::path input;
  std::optional<std::filesystem::path> input2;
  std::vector<std::string> metrics;  // subset of {er,vne,renyi,mi,cev,count,uniformity}
  SpectrumMode spectrum_mode = SpectrumMode::covariance;
  double alpha = 2.0;
  double cev_p = 0.1;
  double tau = 0.01;
  bool center = false;
};

struct SweepParams {
  BlobConfig blobs;
  std::vector<int> feature_counts;   // sweep-features
  std::vector<double> cluster_stds;  // sweep-variance
  int pca_k = 10;
  int repeats = 100;
};

struct TrainToyParams {
  TrainConfig train;
  std::optional<std::filesystem::path> data_csv;  // alternative to blobs
  std::optional<std::filesystem::path> resume;
  bool save_model = true;
  bool export_labels = false;
};

/**
 * A fully resolved experiment: command, seed, output directory, and the
 * command-specific parameter block with every default filled in.
 */
struct ExperimentConfig {
  Command command = Command::metrics;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
  MetricsParams metrics;
  SweepParams sweep;
  TrainToyParams train;
};

/// Parses and validates a JSON experiment description. Unknown keys are
/// rejected; every constraint violation names the offending key.
ExperimentConfig parse_config(const nlohmann::json& source);

ExperimentConfig parse_config_file(const std::filesystem::path& path);

/// Serializes a config with all resolved defaults; parse_config(to_json(c))
/// reproduces c exactly.
nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace repdyn::cli
