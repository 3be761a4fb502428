#include "repdyn/mlp.hpp"

#include "repdyn/errors.hpp"
#include "repdyn/rng.hpp"

#include <cmath>
#include <string>

namespace repdyn {

namespace {

std::vector<DenseLayer> init_stack(const std::vector<int>& dims, Rng& rng) {
  if (dims.size() < 2) {
    throw invalid_parameter_error("a layer stack needs at least an input and an output dim");
  }
  std::vector<DenseLayer> layers;
  layers.reserve(dims.size() - 1);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    if (fan_in < 1 || fan_out < 1) {
      throw invalid_parameter_error("layer dimensions must be positive");
    }
    DenseLayer layer;
    layer.weight.resize(fan_in, fan_out);
    const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (int i = 0; i < fan_in; ++i) {
      for (int j = 0; j < fan_out; ++j) {
        layer.weight(i, j) = scale * rng.normal();
      }
    }
    layer.bias = Eigen::VectorXd::Zero(fan_out);
    layers.push_back(std::move(layer));
  }
  return layers;
}

/// Runs one dense stack, recording inputs and pre-activations when asked.
Eigen::MatrixXd run_stack(const std::vector<DenseLayer>& layers, Eigen::MatrixXd activation,
                          std::vector<Eigen::MatrixXd>* inputs,
                          std::vector<Eigen::MatrixXd>* pres) {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (activation.cols() != layers[l].weight.rows()) {
      throw shape_error("layer input width " + std::to_string(activation.cols()) +
                        " does not match weight rows " + std::to_string(layers[l].weight.rows()));
    }
    if (inputs != nullptr) inputs->push_back(activation);
    Eigen::MatrixXd pre =
        (activation * layers[l].weight).rowwise() + layers[l].bias.transpose();
    if (pres != nullptr) pres->push_back(pre);
    if (l + 1 < layers.size()) {
      activation = pre.cwiseMax(0.0);
    } else {
      activation = std::move(pre);
    }
  }
  return activation;
}

/// Backpropagates through one stack; returns the gradient w.r.t. its input.
Eigen::MatrixXd backprop_stack(const std::vector<DenseLayer>& layers,
                               const std::vector<Eigen::MatrixXd>& inputs,
                               const std::vector<Eigen::MatrixXd>& pres,
                               Eigen::MatrixXd grad_output, std::vector<LayerGrads>& grads) {
  grads.resize(layers.size());
  for (std::size_t idx = layers.size(); idx-- > 0;) {
    Eigen::MatrixXd delta = std::move(grad_output);
    if (idx + 1 < layers.size()) {
      // ReLU applied after this layer's pre-activation.
      delta = delta.cwiseProduct(
          (pres[idx].array() > 0.0).cast<double>().matrix());
    }
    grads[idx].weight = inputs[idx].transpose() * delta;
    grads[idx].bias = delta.colwise().sum();
    grad_output = delta * layers[idx].weight.transpose();
  }
  return grad_output;
}

void check_same_shape(const LayerGrads& g, const DenseLayer& layer) {
  if (g.weight.rows() != layer.weight.rows() || g.weight.cols() != layer.weight.cols() ||
      g.bias.size() != layer.bias.size()) {
    throw shape_error("gradient shapes do not match the model parameters");
  }
}

template <typename Tensor>
void adam_update_tensor(Tensor& param, const Tensor& grad, Tensor& m, Tensor& v,
                        const AdamConfig& cfg, double bias1, double bias2) {
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  param.array() -= cfg.lr * (m.array() / bias1) / ((v.array() / bias2).sqrt() + cfg.eps);
}

}  // namespace

MlpModel MlpModel::random_init(const std::vector<int>& encoder_dims,
                               const std::vector<int>& projector_dims, std::uint64_t seed) {
  Rng rng(seed);
  MlpModel model;
  model.encoder = init_stack(encoder_dims, rng);
  model.projector = init_stack(projector_dims, rng);
  model.validate();
  return model;
}

void MlpModel::validate() const {
  if (encoder.empty() || projector.empty()) {
    throw invalid_parameter_error("model needs at least one encoder and one projector layer");
  }
  auto check_stack = [](const std::vector<DenseLayer>& layers, const char* name) {
    for (std::size_t l = 0; l < layers.size(); ++l) {
      if (layers[l].weight.cols() != layers[l].bias.size()) {
        throw shape_error(std::string(name) + " layer bias width mismatch");
      }
      if (!layers[l].weight.allFinite() || !layers[l].bias.allFinite()) {
        throw invalid_input_error(std::string(name) + " parameters must be finite");
      }
      if (l > 0 && layers[l].weight.rows() != layers[l - 1].weight.cols()) {
        throw shape_error(std::string(name) + " layer dimensions do not chain");
      }
    }
  };
  check_stack(encoder, "encoder");
  check_stack(projector, "projector");
  if (projector.front().weight.rows() != encoder.back().weight.cols()) {
    throw shape_error("projector input must match encoder output");
  }
}

ForwardResult forward(const MlpModel& model, const Eigen::MatrixXd& X, ForwardCache* cache) {
  if (X.cols() != model.input_dim()) {
    throw shape_error("input width does not match the first encoder layer");
  }
  ForwardResult result;
  result.representation = run_stack(model.encoder, X,
                                    cache != nullptr ? &cache->encoder_inputs : nullptr,
                                    cache != nullptr ? &cache->encoder_pre : nullptr);
  result.embedding = run_stack(model.projector, result.representation,
                               cache != nullptr ? &cache->projector_inputs : nullptr,
                               cache != nullptr ? &cache->projector_pre : nullptr);
  return result;
}

ModelGrads ModelGrads::zeros_like(const MlpModel& model) {
  ModelGrads grads;
  auto zero_stack = [](const std::vector<DenseLayer>& layers) {
    std::vector<LayerGrads> out(layers.size());
    for (std::size_t l = 0; l < layers.size(); ++l) {
      out[l].weight = Eigen::MatrixXd::Zero(layers[l].weight.rows(), layers[l].weight.cols());
      out[l].bias = Eigen::VectorXd::Zero(layers[l].bias.size());
    }
    return out;
  };
  grads.encoder = zero_stack(model.encoder);
  grads.projector = zero_stack(model.projector);
  return grads;
}

ModelGrads& ModelGrads::operator+=(const ModelGrads& other) {
  if (other.encoder.size() != encoder.size() || other.projector.size() != projector.size()) {
    throw shape_error("cannot accumulate gradients of different layouts");
  }
  for (std::size_t l = 0; l < encoder.size(); ++l) {
    encoder[l].weight += other.encoder[l].weight;
    encoder[l].bias += other.encoder[l].bias;
  }
  for (std::size_t l = 0; l < projector.size(); ++l) {
    projector[l].weight += other.projector[l].weight;
    projector[l].bias += other.projector[l].bias;
  }
  return *this;
}

bool ModelGrads::all_finite() const {
  for (const auto& g : encoder) {
    if (!g.weight.allFinite() || !g.bias.allFinite()) return false;
  }
  for (const auto& g : projector) {
    if (!g.weight.allFinite() || !g.bias.allFinite()) return false;
  }
  return true;
}

ModelGrads backward(const MlpModel& model, const ForwardCache& cache,
                    const Eigen::MatrixXd& grad_embedding) {
  if (cache.encoder_inputs.size() != model.encoder.size() ||
      cache.projector_inputs.size() != model.projector.size()) {
    throw shape_error("forward cache does not match the model");
  }
  ModelGrads grads;
  const Eigen::MatrixXd grad_representation = backprop_stack(
      model.projector, cache.projector_inputs, cache.projector_pre, grad_embedding,
      grads.projector);
  backprop_stack(model.encoder, cache.encoder_inputs, cache.encoder_pre, grad_representation,
                 grads.encoder);
  return grads;
}

Eigen::MatrixXd augment(const Eigen::MatrixXd& X, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) {
    throw invalid_parameter_error("augmentation noise sigma must be nonnegative");
  }
  if (sigma == 0.0) return X;
  Rng rng(seed);
  Eigen::MatrixXd noisy = X;
  for (Eigen::Index i = 0; i < noisy.rows(); ++i) {
    for (Eigen::Index j = 0; j < noisy.cols(); ++j) {
      noisy(i, j) += sigma * rng.normal();
    }
  }
  return noisy;
}

AdamState AdamState::zeros_like(const MlpModel& model) {
  AdamState state;
  state.first = ModelGrads::zeros_like(model);
  state.second = ModelGrads::zeros_like(model);
  state.step = 0;
  return state;
}

void adam_step(MlpModel& model, const ModelGrads& grads, AdamState& state,
               const AdamConfig& cfg) {
  if (!grads.all_finite()) {
    throw training_divergence_error("non-finite gradient in optimizer step",
                                    static_cast<int>(state.step));
  }
  state.step += 1;
  const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));

  auto update_stack = [&](std::vector<DenseLayer>& layers, const std::vector<LayerGrads>& gs,
                          std::vector<LayerGrads>& m, std::vector<LayerGrads>& v) {
    for (std::size_t l = 0; l < layers.size(); ++l) {
      check_same_shape(gs[l], layers[l]);
      adam_update_tensor(layers[l].weight, gs[l].weight, m[l].weight, v[l].weight, cfg, bias1,
                         bias2);
      adam_update_tensor(layers[l].bias, gs[l].bias, m[l].bias, v[l].bias, cfg, bias1, bias2);
    }
  };
  update_stack(model.encoder, grads.encoder, state.first.encoder, state.second.encoder);
  update_stack(model.projector, grads.projector, state.first.projector, state.second.projector);
}

}  // namespace repdyn
