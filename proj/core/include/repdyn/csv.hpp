#pragma once

#include "repdyn/gaussian.hpp"
#include "repdyn/train.hpp"
#include "repdyn/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace repdyn {

/// Real formatted with 12 significant digits, the numeric format of every
/// CSV artifact.
std::string format_real(double value);

/// Loads a feature matrix from CSV: a header row of column names followed
/// by one sample per line of decimal reals.
FeatureMatrix load_feature_csv(const std::filesystem::path& path);

/// Writes a feature matrix with the given column names (generated as
/// f0, f1, ... when empty).
void write_feature_csv(const Eigen::MatrixXd& values, const std::vector<std::string>& columns,
                       const std::filesystem::path& path);

/// Per-repeat sweep rows: param,repeat,seed,mi,entropy_r,effective_rank_r.
void write_sweep_samples_csv(const SweepResult& result, const std::filesystem::path& path);

/// Aggregated sweep curve: param,mi_mean,mi_std.
void write_sweep_aggregate_csv(const SweepResult& result, const std::filesystem::path& path);

/// Training log: epoch,loss_total,loss_nce,loss_vicreg,alpha,er_r,er_z,
/// mi_rz,uniformity_r,uniformity_z. Writes the header even when empty.
void write_trajectory_csv(const std::vector<TrajectoryRecord>& trajectory,
                          const std::filesystem::path& path);

}  // namespace repdyn
