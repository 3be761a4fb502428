#include "repdyn/mlp.hpp"

#include "repdyn/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace repdyn;

TEST_CASE("forward of trivial networks") {
  MlpModel zero = MlpModel::random_init({3, 4, 2}, {2, 2}, 1);
  for (auto& layer : zero.encoder) layer.weight.setZero();
  for (auto& layer : zero.projector) layer.weight.setZero();

  Eigen::MatrixXd x(5, 3);
  x.setRandom();
  const ForwardResult out = forward(zero, x);
  CHECK(oracles::close_abs(out.representation.cwiseAbs().maxCoeff() == 0.0); CHECK(out.embedding.cwiseAbs().maxCoeff() == 0.0); // Identity single layers: the network is the identity map. MlpModel identity; identity.encoder.push_back({Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3)}); identity.projector.push_back({Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3)}); const ForwardResult same = forward(identity, x); CHECK((same.embedding - x).cwiseAbs().maxCoeff() == 0.0); // Cached and cache-free paths agree bitwise. MlpModel net = MlpModel::random_init({3, 6, 4}, {4, 3, 2}, 7); ForwardCache cache; const ForwardResult with_cache = forward(net, x, &cache); const ForwardResult without = forward(net, x); CHECK((with_cache.embedding - without.embedding).cwiseAbs().maxCoeff() == 0.0); CHECK(cache.encoder_pre.size() == 2); CHECK(cache.projector_pre.size() == 2); Eigen::MatrixXd wrong(5, 4); wrong.setZero(); CHECK_THROWS_AS(forward(net, wrong), shape_error); } TEST_CASE("backward matches finite differences through both stacks") { std::mt19937_64 engine(3); std::normal_distribution<double> normal; MlpModel net = MlpModel::random_init({3, 4, 3}, {3, 3, 2}, 11); Eigen::MatrixXd x(5, 3); for (int i = 0; i < 5; ++i) { for (int j = 0; j < 3; ++j) x(i, j) = normal(engine); } // Scalar objective 0.5 ||Z||^2 so dL/dZ = Z. auto objective = [&](const MlpModel& m) { return 0.5 * forward(m, x).embedding.squaredNorm(); }; ForwardCache cache; const ForwardResult out = forward(net, x, &cache); const ModelGrads grads = backward(net, cache, out.embedding); auto fd_weight = [&](bool encoder_stack, std::size_t layer, const Eigen::MatrixXd& analytic) { auto& layers = encoder_stack ? net.encoder : net.projector; Eigen::MatrixXd fd(analytic.rows(), analytic.cols()); for (Eigen::Index i = 0; i < analytic.rows(); ++i) { for (Eigen::Index j = 0; j < analytic.cols(); ++j) { const double keep = layers[layer].weight(i, j); layers[layer].weight(i, j) = keep + 1e-6; const double up = objective(net); layers[layer].weight(i, j) = keep - 1e-6; const double down = objective(net); layers[layer].weight(i, j) = keep; fd(i, j) = (up - down) / 2e-6; } } CHECK(oracles::max_relative_error(analytic, fd) < 1e-4); }; for (std::size_t l = 0; l < net.encoder.size(); ++l) fd_weight(true, l, grads.encoder[l].weight); for (std::size_t l = 0; l < net.projector.size(); ++l) { fd_weight(false, l, grads.projector[l].weight); } // Bias gradient of the last projector layer is the column sum of dZ. CHECK((grads.projector.back().bias.transpose() - out.embedding.colwise().sum()) .cwiseAbs() .maxCoeff() < 1e-12); } TEST_CASE("adam_step follows the published recurrence") { // Single 1x1 encoder weight acts as the scalar parameter. MlpModel scalar; scalar.encoder.push_back({Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::VectorXd::Zero(1)}); scalar.projector.push_back({Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::VectorXd::Zero(1)}); AdamState state = AdamState::zeros_like(scalar); AdamConfig cfg; cfg.lr = 0.1; // Zero gradient leaves parameters untouched. ModelGrads zero = ModelGrads::zeros_like(scalar); adam_step(scalar, zero, state, cfg); CHECK(scalar.encoder[0].weight(0, 0) == 1.0); // First bias-corrected step moves by about lr against the gradient sign. state = AdamState::zeros_like(scalar); ModelGrads grads = ModelGrads::zeros_like(scalar); grads.encoder[0].weight(0, 0) = 3.7; adam_step(scalar, grads, state, cfg); const double moved = 1.0 - scalar.encoder[0].weight(0, 0); CHECK(moved, cfg.lr).epsilon(1e-6)); // 100 steps on the quadratic 0.5 x^2 starting at x = 1 track the // hand-rolled reference recurrence to 1e-10. scalar.encoder[0].weight(0, 0) = 1.0; state = AdamState::zeros_like(scalar); oracles::ScalarAdamReference reference(cfg.lr, cfg.beta1, cfg.beta2, cfg.eps); double x_ref = 1.0; for (int step = 0; step < 100; ++step) { grads.encoder[0].weight(0, 0) = scalar.encoder[0].weight(0, 0); adam_step(scalar, grads, state, cfg); x_ref = reference.step(x_ref, x_ref); CHECK(scalar.encoder[0].weight(0, 0) == doctest::Approx(x_ref, 1e-10));
  }

  // lr = 0 leaves parameters unchanged.
  MlpModel frozen = MlpModel::random_init({2, 3, 2}, {2, 2}, 5);
  const MlpModel before = frozen;
  AdamState fstate = AdamState::zeros_like(frozen);
  AdamConfig lr0;
  lr0.lr = 0.0;
  ModelGrads g = ModelGrads::zeros_like(frozen);
  for (auto& layer : g.encoder) layer.weight.setConstant(2.0);
  adam_step(frozen, g, fstate, lr0);
  for (std::size_t l = 0; l < frozen.encoder.size(); ++l) {
    CHECK((frozen.encoder[l].weight - before.encoder[l].weight).cwiseAbs().maxCoeff() == 0.0);
  }

  // Non-finite gradients abort the run.
  g.encoder[0].weight(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(adam_step(frozen, g, fstate, cfg), training_divergence_error);
}

TEST_CASE("augment adds calibrated noise deterministically") {
  Eigen::MatrixXd x(100, 10);
  x.setRandom();
  CHECK((augment(x, 0.0, 5) - x).cwiseAbs().maxCoeff() == 0.0);
  CHECK((augment(x, 0.5, 5) - augment(x, 0.5, 5)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((augment(x, 0.5, 5) - augment(x, 0.5, 6)).cwiseAbs().maxCoeff() > 0.0);
  CHECK_THROWS_AS(augment(x, -1.0, 5), invalid_parameter_error);

  // Empirical noise scale over 10^6 entries.
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(1000, 1000);
  const Eigen::MatrixXd noise = augment(big, 0.5, 123) - big;
  const double std_hat = std::sqrt(noise.squaredNorm() / (noise.size() - 1));
  CHECK(std_hat == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("model initialization and validation") {
  const MlpModel a = MlpModel::random_init({25, 20, 20, 20, 20, 20}, {20, 5, 5}, 42);
  CHECK(a.encoder.size() == 5);
  CHECK(a.projector.size() == 2);
  CHECK(a.input_dim() == 25);
  CHECK(a.representation_dim() == 20);
  CHECK(a.embedding_dim() == 5);

  const MlpModel b = MlpModel::random_init({25, 20, 20, 20, 20, 20}, {20, 5, 5}, 42);
  CHECK((a.encoder[3].weight - b.encoder[3].weight).cwiseAbs().maxCoeff() == 0.0);

  MlpModel broken = a;
  broken.projector[0].weight.resize(7, 5);
  broken.projector[0].weight.setZero();
  CHECK_THROWS_AS(broken.validate(), shape_error);

  CHECK_THROWS_AS(MlpModel::random_init({3}, {3, 2}, 0), invalid_parameter_error);
}
