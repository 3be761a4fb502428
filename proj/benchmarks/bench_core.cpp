/**
 * Microbenchmarks for the hot paths: spectrum metrics, the matrix-based
 * mutual information estimator, the closed-form Gaussian MI, and the two
 * training losses at the toy-run batch shape.
 */

#include "repdyn/gaussian.hpp"
#include "repdyn/losses.hpp"
#include "repdyn/mlp.hpp"
#include "repdyn/spectrum.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace repdyn;

Eigen::MatrixXd random_matrix(int n, int d, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) x(i, j) = normal(engine);
  }
  return x;
}

void BM_compute_spectrum_covariance(benchmark::State& state) {
  const FeatureMatrix x(random_matrix(static_cast<int>(state.range(0)), 20, 1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_spectrum(x, SpectrumMode::covariance));
  }
}
BENCHMARK(BM_compute_spectrum_covariance)->Arg(256)->Arg(1000);

void BM_effective_rank(benchmark::State& state) {
  const Spectrum s =
      compute_spectrum(FeatureMatrix(random_matrix(256, 20, 2)), SpectrumMode::singular);
  for (auto _ : state) {
    benchmark::DoNotOptimize(effective_rank(s));
  }
}
BENCHMARK(BM_effective_rank);

void BM_matrix_mutual_information(benchmark::State& state) {
  const FeatureMatrix x(random_matrix(static_cast<int>(state.range(0)), 20, 3));
  const FeatureMatrix y(random_matrix(static_cast<int>(state.range(0)), 5, 4));
  for (auto _ : state) {
    benchmark::DoNotOptimize(matrix_mutual_information(x, y, 2.0));
  }
}
BENCHMARK(BM_matrix_mutual_information)->Arg(256)->Arg(1000);

void BM_gaussian_mi_pipeline(benchmark::State& state) {
  BlobConfig cfg;
  cfg.n_samples = 1000;
  cfg.n_features = static_cast<int>(state.range(0));
  cfg.cluster_std = 1.0;
  cfg.seed = 5;
  const FeatureMatrix r = generate_blobs(cfg);
  const PcaProjector pca = fit_pca(r, 10);
  const FeatureMatrix z = project(pca, r);
  const BlockCovariance cov = empirical_block_covariance(r, z);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gaussian_mutual_info(cov));
  }
}
BENCHMARK(BM_gaussian_mi_pipeline)->Arg(25)->Arg(50);

void BM_info_nce_loss(benchmark::State& state) {
  const Eigen::MatrixXd z = random_matrix(static_cast<int>(state.range(0)), 5, 6);
  const Eigen::MatrixXd zp = random_matrix(static_cast<int>(state.range(0)), 5, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(info_nce_loss(z, zp, 0.1));
  }
}
BENCHMARK(BM_info_nce_loss)->Arg(256)->Arg(1000);

void BM_vicreg_loss(benchmark::State& state) {
  const Eigen::MatrixXd z = random_matrix(static_cast<int>(state.range(0)), 5, 8);
  const Eigen::MatrixXd zp = random_matrix(static_cast<int>(state.range(0)), 5, 9);
  LossConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(vicreg_loss(z, zp, cfg));
  }
}
BENCHMARK(BM_vicreg_loss)->Arg(256)->Arg(1000);

void BM_forward_backward(benchmark::State& state) {
  const MlpModel model = MlpModel::random_init({25, 20, 20, 20, 20, 20}, {20, 5, 5}, 10);
  const Eigen::MatrixXd x = random_matrix(1000, 25, 11);
  for (auto _ : state) {
    ForwardCache cache;
    const ForwardResult out = forward(model, x, &cache);
    benchmark::DoNotOptimize(backward(model, cache, out.embedding));
  }
}
BENCHMARK(BM_forward_backward);

}  // namespace

BENCHMARK_MAIN();
