#include "runner.hpp"

#include "repdyn/checkpoint.hpp"
#include "repdyn/csv.hpp"
#include "repdyn/errors.hpp"

#include <chrono>
#include <fstream>

namespace repdyn::cli {

namespace {

namespace fs = std::filesystem;

Eigen::MatrixXd maybe_centered(const FeatureMatrix& x, bool center) {
  if (!center) return x.values();
  return x.values().rowwise() - x.values().colwise().mean();
}

void run_metrics(const MetricsParams& params, const fs::path& out_csv) {
  const FeatureMatrix input = load_feature_csv(params.input);
  std::ofstream out(out_csv, std::ios::binary);
  if (!out) {
    throw error("cannot open " + out_csv.string() + " for writing");
  }
  out << "metric,value\n";
  for (const std::string& metric : params.metrics) {
    double value = 0.0;
    if (metric == "er") {
      value = effective_rank(compute_spectrum(input, params.spectrum_mode));
    } else if (metric == "vne") {
      value = von_neumann_entropy(compute_spectrum(input, params.spectrum_mode));
    } else if (metric == "renyi") {
      value = renyi_matrix_entropy(
          GramMatrix::from_features(FeatureMatrix(maybe_centered(input, params.center))),
          params.alpha);
    } else if (metric == "mi") {
      const FeatureMatrix other = load_feature_csv(*params.input2);
      value = matrix_mutual_information(FeatureMatrix(maybe_centered(input, params.center)),
                                        FeatureMatrix(maybe_centered(other, params.center)),
                                        params.alpha);
    } else if (metric == "cev") {
      value = cumulative_explained_variance(compute_spectrum(input, params.spectrum_mode),
                                            params.cev_p);
    } else if (metric == "count") {
      value = count_above_threshold(compute_spectrum(input, params.spectrum_mode), params.tau);
    } else if (metric == "uniformity") {
      value = uniformity(input);
    }
    out << metric << ',' << format_real(value) << '\n';
  }
}

void run_train(const TrainToyParams& params, const fs::path& out_dir,
               std::vector<std::string>& artifacts) {
  TrainConfig cfg = params.train;
  if (params.data_csv.has_value()) {
    cfg.matrix_data = load_feature_csv(*params.data_csv).values();
  }
  if (params.resume.has_value()) {
    cfg.initial_model = load_checkpoint(*params.resume);
  }
  const TrainResult result = train(cfg);

  write_trajectory_csv(result.trajectory, out_dir / "trajectory.csv");
  artifacts.push_back("trajectory.csv");
  if (params.save_model) {
    save_checkpoint(result.model, out_dir / "model.ckpt");
    artifacts.push_back("model.ckpt");
  }
  if (params.export_labels && cfg.blob_data.has_value()) {
    std::ofstream labels(out_dir / "labels.csv", std::ios::binary);
    labels << "sample,cluster\n";
    const std::vector<int> assignment = blob_labels(*cfg.blob_data);
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      labels << i << ',' << assignment[i] << '\n';
    }
    artifacts.push_back("labels.csv");
  }
}

}  // namespace

std::string fnv1a64_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw error("cannot open " + path.string() + " for hashing");
  }
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buffer[1 << 15];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
  return hex;
}

Manifest run_experiment(const ExperimentConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  fs::create_directories(config.out_dir);

  std::vector<std::string> artifacts;
  try {
    switch (config.command) {
      case Command::sweep_features: {
        const SweepResult result = sweep_features(config.sweep.blobs, config.sweep.feature_counts,
                                                  config.sweep.pca_k, config.sweep.repeats);
        write_sweep_samples_csv(result, config.out_dir / "samples.csv");
        artifacts.push_back("samples.csv");
        write_sweep_aggregate_csv(result, config.out_dir / "aggregate.csv");
        artifacts.push_back("aggregate.csv");
        break;
      }
      case Command::sweep_variance: {
        const SweepResult result = sweep_variance(config.sweep.blobs, config.sweep.cluster_stds,
                                                  config.sweep.pca_k, config.sweep.repeats);
        write_sweep_samples_csv(result, config.out_dir / "samples.csv");
        artifacts.push_back("samples.csv");
        write_sweep_aggregate_csv(result, config.out_dir / "aggregate.csv");
        artifacts.push_back("aggregate.csv");
        break;
      }
      case Command::train_toy:
        run_train(config.train, config.out_dir, artifacts);
        break;
      case Command::metrics:
        run_metrics(config.metrics, config.out_dir / "metrics.csv");
        artifacts.push_back("metrics.csv");
        break;
    }
  } catch (...) {
    // Never leave partial outputs behind.
    for (const char* name : {"samples.csv", "aggregate.csv", "trajectory.csv", "model.ckpt",
                             "labels.csv", "metrics.csv"}) {
      std::error_code ignored;
      fs::remove(config.out_dir / name, ignored);
    }
    throw;
  }

  Manifest manifest;
  manifest.config = to_json(config);
  manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  for (const std::string& name : artifacts) {
    const fs::path path = config.out_dir / name;
    manifest.artifacts.push_back({name, fs::file_size(path), fnv1a64_file(path)});
  }

  nlohmann::json manifest_json{{"command", command_name(config.command)},
                               {"seed", config.seed},
                               {"config", manifest.config},
                               {"wall_seconds", manifest.wall_seconds}};
  manifest_json["artifacts"] = nlohmann::json::array();
  for (const Artifact& artifact : manifest.artifacts) {
    manifest_json["artifacts"].push_back({{"name", artifact.name},
                                          {"bytes", artifact.bytes},
                                          {"fnv1a64", artifact.checksum}});
  }

  // The manifest is written last, atomically.
  const fs::path tmp = config.out_dir / "manifest.json.tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) {
      throw error("cannot write manifest in " + config.out_dir.string());
    }
    out << manifest_json.dump(2) << '\n';
  }
  fs::rename(tmp, config.out_dir / "manifest.json");
  return manifest;
}

}  // namespace repdyn::cli
