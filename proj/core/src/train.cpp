#include "repdyn/train.hpp"

#include "repdyn/errors.hpp"
#include "repdyn/rng.hpp"
#include "repdyn/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace repdyn {

namespace {

// Stream labels for deriving independent RNG streams from the run seed.
enum Stream : std::uint64_t { kInitStream = 1, kBatchStream = 2, kProbeStream = 3, kAugmentStream = 4 };

Eigen::MatrixXd center_rows(const Eigen::MatrixXd& H) {
  return H.rowwise() - H.colwise().mean();
}

/// Effective rank of the centered singular-value spectrum; 0 for a matrix
/// with no spectral mass (fully collapsed output).
double centered_effective_rank(const Eigen::MatrixXd& H) {
  const Spectrum s = compute_spectrum(FeatureMatrix(center_rows(H)), SpectrumMode::singular);
  if (s.values().sum() <= 0.0) return 0.0;
  return effective_rank(s);
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, const std::vector<int>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
  }
  return out;
}

void validate_config(const TrainConfig& cfg, Eigen::Index data_cols) {
  if (cfg.blob_data.has_value() == cfg.matrix_data.has_value()) {
    throw invalid_parameter_error("training needs exactly one data source");
  }
  if (cfg.encoder_dims.size() < 2 || cfg.projector_dims.size() < 2) {
    throw invalid_parameter_error("encoder and projector need input and output dimensions");
  }
  if (cfg.encoder_dims.front() != static_cast<int>(data_cols)) {
    throw shape_error("encoder input dimension does not match the data");
  }
  if (cfg.projector_dims.front() != cfg.encoder_dims.back()) {
    throw shape_error("projector input must match the encoder output");
  }
  if (cfg.epochs < 0) throw invalid_parameter_error("epochs must be nonnegative");
  if (cfg.log_every < 1) throw invalid_parameter_error("log_every must be at least 1");
  if (cfg.batch_size < 0) throw invalid_parameter_error("batch_size must be nonnegative");
  if (cfg.batch_size == 1) {
    throw degenerate_batch_error("batch_size 1 leaves the losses undefined");
  }
  if (cfg.alpha_mode == AlphaMode::fixed && (cfg.fixed_alpha < 0.0 || cfg.fixed_alpha > 1.0)) {
    throw invalid_parameter_error("fixed alpha must lie in [0, 1]");
  }
  if (cfg.schedule.every_epochs < 1 || cfg.schedule.probe_batches < 1 ||
      cfg.schedule.probe_batch_size < 2) {
    throw invalid_parameter_error("alpha schedule parameters out of range");
  }
}

}  // namespace

double compute_alpha(const std::vector<Eigen::MatrixXd>& probe_representations, int max_dim) {
  if (probe_representations.empty()) {
    throw invalid_parameter_error("alpha needs at least one probe batch");
  }
  if (max_dim < 1) {
    throw invalid_parameter_error("max_dim must be positive");
  }
  double total = 0.0;
  for (const Eigen::MatrixXd& batch : probe_representations) {
    if (batch.rows() < 2) {
      throw invalid_input_error("probe batches need at least two rows");
    }
    const Spectrum s =
        compute_spectrum(FeatureMatrix(center_rows(batch)), SpectrumMode::singular);
    total += effective_rank(s);
  }
  const double alpha = total / static_cast<double>(probe_representations.size()) /
                       static_cast<double>(max_dim);
  return std::clamp(alpha, 0.0, 1.0);
}

TrainResult train(const TrainConfig& cfg) {
  const Eigen::MatrixXd data = cfg.blob_data.has_value()
                                   ? generate_blobs(*cfg.blob_data).values()
                                   : cfg.matrix_data.value_or(Eigen::MatrixXd());
  if (data.rows() < 2) {
    throw invalid_input_error("training data needs at least two samples");
  }
  validate_config(cfg, data.cols());
  const int n = static_cast<int>(data.rows());
  const int batch_size = cfg.batch_size == 0 ? n : std::min(cfg.batch_size, n);

  TrainResult result{.trajectory = {},
                     .model = cfg.initial_model.has_value()
                                  ? *cfg.initial_model
                                  : MlpModel::random_init(cfg.encoder_dims, cfg.projector_dims,
                                                          derive_seed(cfg.seed, kInitStream)),
                     .alpha_by_epoch = {},
                     .alpha_recomputes = {}};
  result.model.validate();
  if (result.model.input_dim() != data.cols()) {
    throw shape_error("warm-start model does not match the data dimension");
  }
  const int representation_dim = static_cast<int>(result.model.representation_dim());

  AdamState opt_state = AdamState::zeros_like(result.model);
  Rng batch_rng(derive_seed(cfg.seed, kBatchStream));
  Rng probe_rng(derive_seed(cfg.seed, kProbeStream));

  double alpha = cfg.alpha_mode == AlphaMode::fixed ? cfg.fixed_alpha : 0.0;
  result.alpha_by_epoch.reserve(static_cast<std::size_t>(cfg.epochs));

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (cfg.alpha_mode == AlphaMode::adaptive &&
        (epoch - 1) % cfg.schedule.every_epochs == 0) {
      // Recompute alpha on fresh unaugmented probe batches before this
      // epoch touches the parameters.
      const int probe_size = std::min(cfg.schedule.probe_batch_size, n);
      std::vector<Eigen::MatrixXd> probes;
      probes.reserve(static_cast<std::size_t>(cfg.schedule.probe_batches));
      std::vector<int> pool(static_cast<std::size_t>(n));
      for (int b = 0; b < cfg.schedule.probe_batches; ++b) {
        std::iota(pool.begin(), pool.end(), 0);
        for (int i = 0; i < probe_size; ++i) {
          const int j = i + static_cast<int>(probe_rng.below(static_cast<std::uint64_t>(n - i)));
          std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
        }
        std::vector<int> rows(pool.begin(), pool.begin() + probe_size);
        probes.push_back(forward(result.model, take_rows(data, rows)).representation);
      }
      alpha = compute_alpha(probes, representation_dim);
      result.alpha_recomputes.emplace_back(epoch, alpha);
    }

    // Batch order for this epoch.
    std::vector<std::vector<int>> batches;
    if (batch_size >= n) {
      batches.push_back(order);
    } else {
      std::vector<int> shuffled = order;
      for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(batch_rng.below(static_cast<std::uint64_t>(i + 1)));
        std::swap(shuffled[static_cast<std::size_t>(i)], shuffled[static_cast<std::size_t>(j)]);
      }
      for (int start = 0; start + 2 <= n; start += batch_size) {
        const int stop = std::min(start + batch_size, n);
        if (stop - start < 2) break;  // a trailing singleton cannot form a batch
        batches.emplace_back(shuffled.begin() + start, shuffled.begin() + stop);
      }
    }

    const bool log_this_epoch = epoch % cfg.log_every == 0 || epoch == cfg.epochs;
    const bool need_nce_grad = alpha > 0.0;
    const bool need_vic_grad = alpha < 1.0;

    double epoch_nce = 0.0;
    double epoch_vic = 0.0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      const Eigen::MatrixXd batch = take_rows(data, batches[b]);
      const std::uint64_t view_base =
          derive_seed(cfg.seed, kAugmentStream + static_cast<std::uint64_t>(epoch) * 1024,
                      static_cast<std::uint64_t>(b));
      const Eigen::MatrixXd view_a = augment(batch, cfg.augment_sigma, derive_seed(view_base, 0));
      const Eigen::MatrixXd view_b = augment(batch, cfg.augment_sigma, derive_seed(view_base, 1));

      ForwardCache cache_a;
      ForwardCache cache_b;
      const ForwardResult out_a = forward(result.model, view_a, &cache_a);
      const ForwardResult out_b = forward(result.model, view_b, &cache_b);
      if (!out_a.embedding.allFinite() || !out_b.embedding.allFinite()) {
        throw training_divergence_error("network outputs became non-finite", epoch - 1);
      }

      // The component with zero weight contributes no gradient; its value
      // is still evaluated on logged epochs so the record carries both.
      LossValue nce;
      LossValue vic;
      if (need_nce_grad) {
        nce = info_nce_loss(out_a.embedding, out_b.embedding, cfg.loss.tau);
      } else if (log_this_epoch) {
        nce.loss = info_nce_loss_value(out_a.embedding, out_b.embedding, cfg.loss.tau);
      }
      if (need_vic_grad) {
        vic = vicreg_loss(out_a.embedding, out_b.embedding, cfg.loss);
      } else if (log_this_epoch) {
        vic.loss = vicreg_loss_value(out_a.embedding, out_b.embedding, cfg.loss);
      }
      const double batch_loss = alpha * nce.loss + (1.0 - alpha) * vic.loss;
      if (!std::isfinite(batch_loss)) {
        throw training_divergence_error("loss became non-finite", epoch - 1);
      }
      epoch_nce += nce.loss;
      epoch_vic += vic.loss;

      Eigen::MatrixXd grad_a;
      Eigen::MatrixXd grad_b;
      if (need_nce_grad && need_vic_grad) {
        grad_a = alpha * nce.grad_z + (1.0 - alpha) * vic.grad_z;
        grad_b = alpha * nce.grad_zp + (1.0 - alpha) * vic.grad_zp;
      } else if (need_nce_grad) {
        grad_a = std::move(nce.grad_z);
        grad_b = std::move(nce.grad_zp);
      } else {
        grad_a = std::move(vic.grad_z);
        grad_b = std::move(vic.grad_zp);
      }
      ModelGrads grads = backward(result.model, cache_a, grad_a);
      grads += backward(result.model, cache_b, grad_b);
      try {
        adam_step(result.model, grads, opt_state, cfg.adam);
      } catch (const training_divergence_error&) {
        throw training_divergence_error("gradients became non-finite", epoch - 1);
      }
    }
    result.alpha_by_epoch.push_back(alpha);

    if (log_this_epoch) {
      const auto batch_count = static_cast<double>(batches.size());
      const ForwardResult clean = forward(result.model, data);
      TrajectoryRecord record;
      record.epoch = epoch;
      record.loss_nce = epoch_nce / batch_count;
      record.loss_vicreg = epoch_vic / batch_count;
      record.loss_total = alpha * record.loss_nce + (1.0 - alpha) * record.loss_vicreg;
      record.alpha = alpha;
      record.er_r = centered_effective_rank(clean.representation);
      record.er_z = centered_effective_rank(clean.embedding);
      // I(R;Z) of the network-simulation protocol: R is the clean input
      // data, Z the network output. Features are mean-centered before the
      // Gram construction so a common mean offset cannot mask the
      // dependence structure.
      record.mi_rz = matrix_mutual_information(FeatureMatrix(center_rows(data)),
                                               FeatureMatrix(center_rows(clean.embedding)), 2.0);
      record.uniformity_r = uniformity(FeatureMatrix(clean.representation));
      record.uniformity_z = uniformity(FeatureMatrix(clean.embedding));
      result.trajectory.push_back(record);
    }
  }
  return result;
}

}  // namespace repdyn
