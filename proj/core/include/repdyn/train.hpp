#pragma once

#include "repdyn/gaussian.hpp"
#include "repdyn/losses.hpp"
#include "repdyn/mlp.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace repdyn {

/// How the loss-interpolation weight alpha is chosen during training.
enum class AlphaMode { fixed, adaptive };

/**
 * Adaptive-alpha schedule: every `every_epochs` epochs, before that epoch's
 * updates, forward `probe_batches` freshly sampled unaugmented batches,
 * average the effective rank of their centered representations, and set
 * alpha = mean effective rank / representation dimension (clamped to [0,1]).
 */
struct AlphaSchedule {
  int every_epochs = 50;
  int probe_batches = 10;
  int probe_batch_size = 256;
};

/// alpha from probe representations: mean effective rank of the centered
/// batches' singular-value spectra divided by `max_dim`, clamped to [0, 1].
double compute_alpha(const std::vector<Eigen::MatrixXd>& probe_representations, int max_dim);

/// Per-epoch log row of a training run. `er_r`/`er_z` are effective ranks
/// of the centered encoder/projector outputs on the clean dataset; `mi_rz`
/// is the matrix-based (alpha = 2) mutual information between the clean
/// input data and the projector output, computed on mean-centered features.
struct TrajectoryRecord {
  int epoch = 0;
  double loss_total = 0.0;
  double loss_nce = 0.0;
  double loss_vicreg = 0.0;
  double alpha = 0.0;
  double er_r = 0.0;
  double er_z = 0.0;
  double mi_rz = 0.0;
  double uniformity_r = 0.0;
  double uniformity_z = 0.0;
};

struct TrainConfig {
  /// Exactly one data source: generated blobs or a preloaded matrix.
  std::optional<BlobConfig> blob_data;
  std::optional<Eigen::MatrixXd> matrix_data;

  std::vector<int> encoder_dims;    // {input, hidden..., representation}
  std::vector<int> projector_dims;  // {representation, hidden..., embedding}

  LossConfig loss;
  AlphaMode alpha_mode = AlphaMode::fixed;
  double fixed_alpha = 1.0;
  AlphaSchedule schedule;

  int epochs = 1000;
  int batch_size = 0;  // 0 means full batch
  AdamConfig adam;
  double augment_sigma = 0.5;
  int log_every = 10;
  std::uint64_t seed = 0;

  /// Warm-start parameters (e.g. from a checkpoint); optimizer state is fresh.
  std::optional<MlpModel> initial_model;
};

struct TrainResult {
  std::vector<TrajectoryRecord> trajectory;
  MlpModel model;
  /// alpha used during each epoch (size = epochs).
  std::vector<double> alpha_by_epoch;
  /// (epoch, alpha) at every adaptive recomputation point.
  std::vector<std::pair<int, double>> alpha_recomputes;
};

/**
 * Two-view training loop: augment the data twice with Gaussian noise,
 * forward both views, blend the contrastive and redundancy-reduction losses
 * with the current alpha, backpropagate, and apply one Adam step per batch.
 * Metrics (effective ranks, matrix-based I(R;Z), uniformity) are evaluated
 * on the clean full dataset after the updates of every logged epoch.
 * Bit-reproducible per seed.
 */
TrainResult train(const TrainConfig& cfg);

}  // namespace repdyn
