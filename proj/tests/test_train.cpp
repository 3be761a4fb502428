#include "repdyn/train.hpp"

#include "repdyn/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace repdyn;

namespace {

/// A centered batch whose singular values are uniform over `rank`
/// directions embedded in `dim` columns: effective rank exactly `rank`.
Eigen::MatrixXd uniform_rank_batch(int rank, int dim, std::mt19937_64& engine) {
  const Eigen::MatrixXd q = oracles::random_rotation(dim, engine).leftCols(rank);
  Eigen::MatrixXd batch(2 * rank, dim);
  batch.topRows(rank) = q.transpose();
  batch.bottomRows(rank) = -q.transpose();
  return batch;
}

TrainConfig small_config(std::uint64_t seed) {
  TrainConfig cfg;
  BlobConfig blobs;
  blobs.n_samples = 60;
  blobs.n_features = 6;
  blobs.n_centers = 3;
  blobs.cluster_std = 0.05;
  blobs.seed = seed + 1000;
  cfg.blob_data = blobs;
  cfg.encoder_dims = {6, 8, 4};
  cfg.projector_dims = {4, 3};
  cfg.epochs = 20;
  cfg.log_every = 5;
  cfg.augment_sigma = 0.3;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("compute_alpha from probe representations") {
  std::mt19937_64 engine(1);

  // Rank-1 batches: alpha = 1/D.
  Eigen::MatrixXd rank1(6, 10);
  for (int i = 0; i < 6; ++i) rank1.row(i) = (i % 2 ? 1.0 : -1.0) * Eigen::RowVectorXd::Ones(10);
  CHECK(compute_alpha({rank1, rank1}, 10) == doctest::Approx(0.1).epsilon(1e-9));

  // Uniform spectra across the full dimension: alpha = 1.
  const Eigen::MatrixXd full = uniform_rank_batch(10, 10, engine);
  CHECK(compute_alpha({full}, 10) == doctest::Approx(1.0).epsilon(1e-9));

  // Effective ranks 4 and 6 with D = 20 average to alpha = 0.25.
  const Eigen::MatrixXd er4 = uniform_rank_batch(4, 20, engine);
  const Eigen::MatrixXd er6 = uniform_rank_batch(6, 20, engine);
  CHECK(compute_alpha({er4, er6}, 20) == doctest::Approx(0.25).epsilon(1e-9));

  CHECK_THROWS_AS(compute_alpha({}, 10), invalid_parameter_error);
  CHECK_THROWS_AS(compute_alpha({Eigen::MatrixXd::Zero(4, 3)}, 3), degenerate_spectrum_error);
}

TEST_CASE("train with zero epochs is a validated no-op") {
  TrainConfig cfg = small_config(4);
  cfg.epochs = 0;
  const TrainResult result = train(cfg);
  CHECK(result.trajectory.empty());
  CHECK(result.alpha_by_epoch.empty());
  result.model.validate();
  // The untouched model equals a second zero-epoch run's model.
  const TrainResult again = train(cfg);
  for (std::size_t l = 0; l < result.model.encoder.size(); ++l) {
    CHECK((result.model.encoder[l].weight - again.model.encoder[l].weight)
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
}

TEST_CASE("training trajectories are bit-reproducible per seed") {
  const TrainConfig cfg = small_config(7);
  const TrainResult a = train(cfg);
  const TrainResult b = train(cfg);
  REQUIRE(a.trajectory.size() == b.trajectory.size());
  for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
    CHECK(a.trajectory[i].epoch == b.trajectory[i].epoch);
    CHECK(a.trajectory[i].loss_total == b.trajectory[i].loss_total);
    CHECK(a.trajectory[i].loss_nce == b.trajectory[i].loss_nce);
    CHECK(a.trajectory[i].loss_vicreg == b.trajectory[i].loss_vicreg);
    CHECK(a.trajectory[i].mi_rz == b.trajectory[i].mi_rz);
    CHECK(a.trajectory[i].er_r == b.trajectory[i].er_r);
    CHECK(a.trajectory[i].uniformity_z == b.trajectory[i].uniformity_z);
  }

  TrainConfig other = cfg;
  other.seed = 8;
  const TrainResult c = train(other);
  CHECK(c.trajectory.back().loss_total != a.trajectory.back().loss_total);
}

TEST_CASE("trajectory records respect their invariants") {
  TrainConfig cfg = small_config(12);
  cfg.epochs = 30;
  const TrainResult result = train(cfg);
  REQUIRE(!result.trajectory.empty());
  CHECK(result.trajectory.back().epoch == 30);
  for (const TrajectoryRecord& r : result.trajectory) {
    CHECK(r.alpha >= 0.0);
    CHECK(r.alpha <= 1.0);
    CHECK(r.er_r >= 1.0);
    CHECK(r.er_r <= 4.0 + 1e-9);  // min(batch, dim R) with dim R = 4
    CHECK(r.loss_nce >= 0.0);
    CHECK(r.loss_vicreg >= 0.0);
    CHECK(r.uniformity_r <= 1e-12);
    CHECK(std::isfinite(r.mi_rz));
  }
}

TEST_CASE("mini-batch mode trains and logs") {
  TrainConfig cfg = small_config(9);
  cfg.batch_size = 16;
  cfg.epochs = 8;
  cfg.log_every = 4;
  const TrainResult result = train(cfg);
  CHECK(result.trajectory.size() == 2);
  CHECK(std::isfinite(result.trajectory.back().loss_total));
}

TEST_CASE("adaptive alpha recomputes on schedule") {
  TrainConfig cfg = small_config(10);
  cfg.epochs = 12;
  cfg.alpha_mode = AlphaMode::adaptive;
  cfg.schedule.every_epochs = 4;
  cfg.schedule.probe_batches = 3;
  cfg.schedule.probe_batch_size = 20;
  const TrainResult result = train(cfg);

  REQUIRE(result.alpha_recomputes.size() == 3);
  CHECK(result.alpha_recomputes[0].first == 1);
  CHECK(result.alpha_recomputes[1].first == 5);
  CHECK(result.alpha_recomputes[2].first == 9);

  REQUIRE(result.alpha_by_epoch.size() == 12);
  for (int epoch = 1; epoch <= 12; ++epoch) {
    const double expected = result.alpha_recomputes[(epoch - 1) / 4].second;
    CHECK(result.alpha_by_epoch[static_cast<std::size_t>(epoch - 1)] == expected);
  }
  for (const auto& [epoch, alpha] : result.alpha_recomputes) {
    CHECK(alpha >= 0.0);
    CHECK(alpha <= 1.0);
  }
}

TEST_CASE("training reports divergence with the last good epoch") {
  TrainConfig cfg = small_config(2);
  cfg.adam.lr = 1e18;  // guaranteed blow-up
  cfg.epochs = 50;
  try {
    train(cfg);
    FAIL("expected training_divergence_error");
  } catch (const training_divergence_error& e) {
    CHECK(e.last_good_epoch() >= 0);
    CHECK(e.last_good_epoch() < 50);
  }
}

TEST_CASE("train validates its configuration") {
  TrainConfig cfg = small_config(3);
  cfg.projector_dims = {5, 3};  // does not chain with encoder output 4
  CHECK_THROWS_AS(train(cfg), shape_error);

  TrainConfig both = small_config(3);
  both.matrix_data = Eigen::MatrixXd::Ones(10, 6);
  CHECK_THROWS_AS(train(both), invalid_parameter_error);

  TrainConfig neither = small_config(3);
  neither.blob_data.reset();
  CHECK_THROWS_AS(train(neither), invalid_parameter_error);

  TrainConfig tiny_batch = small_config(3);
  tiny_batch.batch_size = 1;
  CHECK_THROWS_AS(train(tiny_batch), degenerate_batch_error);
}

TEST_CASE("warm starting from a model continues from its parameters") {
  TrainConfig cfg = small_config(6);
  cfg.epochs = 5;
  const TrainResult first = train(cfg);

  TrainConfig resumed = cfg;
  resumed.initial_model = first.model;
  resumed.epochs = 0;
  const TrainResult loaded = train(resumed);
  CHECK((loaded.model.encoder[0].weight - first.model.encoder[0].weight).cwiseAbs().maxCoeff() ==
        0.0);
}
