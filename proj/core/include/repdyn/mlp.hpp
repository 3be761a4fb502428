#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace repdyn {

/// One dense layer: output = input * weight + bias, weight stored (in x out).
struct DenseLayer {
  Eigen::MatrixXd weight;
  Eigen::VectorXd bias;
};

/**
 * Encoder/projector pair of dense stacks with ReLU between layers and
 * identity on each stack's output. The encoder output is the
 * representation R, the projector output the embedding Z.
 */
struct MlpModel {
  std::vector<DenseLayer> encoder;
  std::vector<DenseLayer> projector;

  /// He-normal weights, zero biases; deterministic per seed.
  /// `encoder_dims` is {input, hidden..., representation},
  /// `projector_dims` is {representation, hidden..., embedding}.
  static MlpModel random_init(const std::vector<int>& encoder_dims,
                              const std::vector<int>& projector_dims, std::uint64_t seed);

  /// Throws unless layer dimensions chain and all parameters are finite.
  void validate() const;

  Eigen::Index input_dim() const { return encoder.front().weight.rows(); }
  Eigen::Index representation_dim() const { return encoder.back().weight.cols(); }
  Eigen::Index embedding_dim() const { return projector.back().weight.cols(); }
};

/// Per-layer activations retained for backpropagation.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> encoder_inputs;
  std::vector<Eigen::MatrixXd> encoder_pre;
  std::vector<Eigen::MatrixXd> projector_inputs;
  std::vector<Eigen::MatrixXd> projector_pre;
};

struct ForwardResult {
  Eigen::MatrixXd representation;  // n x dim(R)
  Eigen::MatrixXd embedding;       // n x dim(Z)
};

/// Batch forward pass; fills `cache` when given.
ForwardResult forward(const MlpModel& model, const Eigen::MatrixXd& X,
                      ForwardCache* cache = nullptr);

struct LayerGrads {
  Eigen::MatrixXd weight;
  Eigen::VectorXd bias;
};

struct ModelGrads {
  std::vector<LayerGrads> encoder;
  std::vector<LayerGrads> projector;

  static ModelGrads zeros_like(const MlpModel& model);
  ModelGrads& operator+=(const ModelGrads& other);
  bool all_finite() const;
};

/// Backpropagates a gradient with respect to the embedding through the
/// projector and encoder, returning gradients for every parameter tensor.
ModelGrads backward(const MlpModel& model, const ForwardCache& cache,
                    const Eigen::MatrixXd& grad_embedding);

/// X plus elementwise N(0, sigma^2) noise; deterministic per seed.
Eigen::MatrixXd augment(const Eigen::MatrixXd& X, double sigma, std::uint64_t seed);

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First/second moment estimates plus the step counter.
struct AdamState {
  ModelGrads first;
  ModelGrads second;
  long step = 0;

  static AdamState zeros_like(const MlpModel& model);
};

/// Standard Adam update with bias correction, applied in place to every
/// parameter tensor. Throws training_divergence_error on non-finite grads.
void adam_step(MlpModel& model, const ModelGrads& grads, AdamState& state, const AdamConfig& cfg);

}  // namespace repdyn
