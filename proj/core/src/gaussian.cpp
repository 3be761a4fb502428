#include "repdyn/gaussian.hpp"

#include "repdyn/errors.hpp"
#include "repdyn/rng.hpp"
#include "repdyn/spectrum.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <iostream>
#include <numbers>

namespace repdyn {

namespace {

constexpr double kSchurAgreementTol = 1e-6;
constexpr double kLogDetFloor = -690.77552789821368;  // ln(1e-300)

double logdet_spd(const Eigen::MatrixXd& M, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) {
    throw singular_model_error(std::string(what) + " is not positive definite");
  }
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

struct ConditionalParts {
  double ridge = 0.0;
  double logdet_sigma_z = 0.0;
  double logdet_sigma_r = 0.0;
  double logdet_var_z_given_r = 0.0;
  double logdet_var_r_given_z = 0.0;
  double form_zr = 0.0;  // 0.5 (ln|Sigma_Z| - ln|Var(Z|R)|)
  double form_rz = 0.0;  // 0.5 (ln|Sigma_R| - ln|Var(R|Z)|)
};

double resolve_ridge(const BlockCovariance& c, double ridge) {
  if (ridge >= 0.0) return ridge;
  // Automatic policy: ridge only when the joint covariance is numerically
  // rank deficient, which is exactly the deterministic-projection regime.
  const Eigen::MatrixXd joint = c.assembled();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(joint, Eigen::EigenvaluesOnly);
  const double lam_max = solver.eigenvalues().maxCoeff();
  const double lam_min = solver.eigenvalues().minCoeff();
  if (lam_min < 1e-10 * std::max(lam_max, 0.0)) {
    return 1e-9 * joint.trace() / static_cast<double>(joint.rows());
  }
  return 0.0;
}

/// Log-determinant of Sigma_a - Cross (Sigma_b + ridge I)^-1 Cross^T.
double logdet_conditional(const Eigen::MatrixXd& sigma_a, const Eigen::MatrixXd& sigma_b,
                          const Eigen::MatrixXd& cross, double ridge, const char* what) {
  Eigen::MatrixXd ridged_b = sigma_b;
  ridged_b.diagonal().array() += ridge;
  Eigen::LLT<Eigen::MatrixXd> llt(ridged_b);
  if (llt.info() != Eigen::Success) {
    throw singular_model_error(std::string(what) + ": conditioning block is singular");
  }
  Eigen::MatrixXd conditional = sigma_a - cross * llt.solve(cross.transpose());
  conditional = 0.5 * (conditional + conditional.transpose().eval());

  Eigen::LLT<Eigen::MatrixXd> llt_cond(conditional);
  if (llt_cond.info() != Eigen::Success) {
    throw singular_model_error(std::string(what) +
                               " collapsed: the map between the blocks is deterministic");
  }
  const double logdet = 2.0 * llt_cond.matrixLLT().diagonal().array().log().sum();
  if (!(logdet > kLogDetFloor)) {
    throw singular_model_error(std::string(what) +
                               " determinant underflow: the map between the blocks is "
                               "deterministic");
  }
  return logdet;
}

ConditionalParts conditional_parts(const BlockCovariance& c, double ridge) {
  ConditionalParts parts;
  parts.ridge = resolve_ridge(c, ridge);
  parts.logdet_sigma_z = logdet_spd(c.sigma_z(), "Sigma_Z");
  parts.logdet_sigma_r = logdet_spd(c.sigma_r(), "Sigma_R");
  parts.logdet_var_z_given_r = logdet_conditional(c.sigma_z(), c.sigma_r(),
                                                  c.sigma_zr(), parts.ridge, "Var(Z|R)");
  parts.logdet_var_r_given_z = logdet_conditional(c.sigma_r(), c.sigma_z(),
                                                  c.sigma_rz(), parts.ridge, "Var(R|Z)");
  parts.form_zr = 0.5 * (parts.logdet_sigma_z - parts.logdet_var_z_given_r);
  parts.form_rz = 0.5 * (parts.logdet_sigma_r - parts.logdet_var_r_given_z);
  return parts;
}

double sample_std(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

/// Shared generate-project-measure pipeline for both sweep flavors.
SweepResult run_sweep(const BlobConfig& base, const std::vector<double>& params,
                      bool vary_features, int pca_k, int repeats) {
  if (repeats < 1) throw invalid_parameter_error("sweep repeats must be at least 1");
  SweepResult result;
  for (double param : params) {
    std::vector<double> mis;
    mis.reserve(repeats);
    for (int rep = 0; rep < repeats; ++rep) {
      BlobConfig cfg = base;
      if (vary_features) {
        cfg.n_features = static_cast<int>(param);
      } else {
        cfg.cluster_std = param;
      }
      cfg.seed = base.seed + static_cast<std::uint64_t>(rep);
      const FeatureMatrix R = generate_blobs(cfg);
      const PcaProjector pca = fit_pca(R, pca_k);
      const FeatureMatrix Z = project(pca, R);
      const BlockCovariance cov = empirical_block_covariance(R, Z);
      SweepSample sample;
      sample.param = param;
      sample.repeat = rep;
      sample.seed = cfg.seed;
      sample.mi = gaussian_mutual_info(cov);
      sample.entropy_r = gaussian_entropy(cov.sigma_r());
      sample.effective_rank_r = effective_rank(compute_spectrum(R, SpectrumMode::covariance));
      mis.push_back(sample.mi);
      result.samples.push_back(sample);
    }
    SweepPoint point;
    point.param = param;
    point.mi_mean = 0.0;
    for (double mi : mis) point.mi_mean += mi;
    point.mi_mean /= static_cast<double>(mis.size());
    point.mi_std = sample_std(mis, point.mi_mean);
    result.aggregate.push_back(point);
  }
  return result;
}

}  // namespace

FeatureMatrix generate_blobs(const BlobConfig& cfg) {
  if (cfg.n_centers < 1 || cfg.n_samples < cfg.n_centers) {
    throw invalid_parameter_error("blobs require n_samples >= n_centers >= 1");
  }
  if (cfg.n_features < 1) {
    throw invalid_parameter_error("blobs require at least one feature");
  }
  if (cfg.cluster_std < 0.0) {
    throw invalid_parameter_error("cluster_std must be nonnegative");
  }
  if (!(cfg.center_min < cfg.center_max)) {
    throw invalid_parameter_error("center box must have positive width");
  }
  Rng rng(cfg.seed);
  Eigen::MatrixXd centers(cfg.n_centers, cfg.n_features);
  for (int c = 0; c < cfg.n_centers; ++c) {
    for (int j = 0; j < cfg.n_features; ++j) {
      centers(c, j) = rng.uniform(cfg.center_min, cfg.center_max);
    }
  }
  Eigen::MatrixXd samples(cfg.n_samples, cfg.n_features);
  for (int i = 0; i < cfg.n_samples; ++i) {
    const int c = i % cfg.n_centers;
    for (int j = 0; j < cfg.n_features; ++j) {
      samples(i, j) = centers(c, j) + cfg.cluster_std * rng.normal();
    }
  }
  return FeatureMatrix(std::move(samples));
}

std::vector<int> blob_labels(const BlobConfig& cfg) {
  std::vector<int> labels(static_cast<std::size_t>(cfg.n_samples));
  for (int i = 0; i < cfg.n_samples; ++i) labels[static_cast<std::size_t>(i)] = i % cfg.n_centers;
  return labels;
}

PcaProjector::PcaProjector(Eigen::VectorXd mean, Eigen::MatrixXd components,
                           Eigen::VectorXd explained)
    : mean_(std::move(mean)), components_(std::move(components)), explained_(std::move(explained)) {
  if (components_.cols() != mean_.size() || components_.rows() != explained_.size()) {
    throw shape_error("PCA projector pieces have inconsistent shapes");
  }
  const Eigen::MatrixXd gram = components_ * components_.transpose();
  if ((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() > 1e-8) {
    throw invalid_matrix_error("PCA component rows must be orthonormal");
  }
  for (Eigen::Index i = 0; i < explained_.size(); ++i) {
    if (explained_[i] < 0.0 || (i > 0 && explained_[i] > explained_[i - 1])) {
      throw invalid_input_error("explained variances must be nonnegative and descending");
    }
  }
}

PcaProjector fit_pca(const FeatureMatrix& X, int k) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  if (k < 1 || k > std::min<Eigen::Index>(n - 1, d)) {
    throw invalid_parameter_error("PCA component count k must satisfy 1 <= k <= min(n-1, d)");
  }
  const Eigen::VectorXd mean = X.values().colwise().mean();
  const Eigen::MatrixXd centered = X.values().rowwise() - mean.transpose();
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
  cov = 0.5 * (cov + cov.transpose().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw invalid_matrix_error("eigendecomposition of the sample covariance failed");
  }
  // Eigen returns ascending order; take the top k from the back.
  Eigen::MatrixXd components(k, d);
  Eigen::VectorXd explained(k);
  for (int r = 0; r < k; ++r) {
    const Eigen::Index src = d - 1 - r;
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    // Deterministic sign: largest-magnitude entry is positive.
    Eigen::Index arg_max = 0;
    v.cwiseAbs().maxCoeff(&arg_max);
    if (v[arg_max] < 0.0) v = -v;
    components.row(r) = v.transpose();
    explained[r] = std::max(0.0, solver.eigenvalues()[src]);
  }
  return PcaProjector(mean, std::move(components), std::move(explained));
}

FeatureMatrix project(const PcaProjector& p, const FeatureMatrix& X) {
  if (X.cols() != p.input_dim()) {
    throw shape_error("projection input has wrong feature count");
  }
  const Eigen::MatrixXd centered = X.values().rowwise() - p.mean().transpose();
  return FeatureMatrix(centered * p.components().transpose());
}

BlockCovariance::BlockCovariance(Eigen::MatrixXd sigma_z, Eigen::MatrixXd sigma_r,
                                 Eigen::MatrixXd sigma_rz)
    : sigma_z_(std::move(sigma_z)), sigma_r_(std::move(sigma_r)), sigma_rz_(std::move(sigma_rz)) {
  if (sigma_z_.rows() != sigma_z_.cols() || sigma_r_.rows() != sigma_r_.cols() ||
      sigma_rz_.rows() != sigma_r_.rows() || sigma_rz_.cols() != sigma_z_.rows()) {
    throw shape_error("block covariance pieces have inconsistent shapes");
  }
  const Eigen::MatrixXd joint = assembled();
  if (!joint.allFinite()) {
    throw invalid_input_error("block covariance entries must be finite");
  }
  if ((joint - joint.transpose()).cwiseAbs().maxCoeff() > 1e-8) {
    throw invalid_matrix_error("block covariance must be symmetric within 1e-8");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(joint, Eigen::EigenvaluesOnly);
  const double lam_max = solver.eigenvalues().cwiseAbs().maxCoeff();
  if (solver.eigenvalues().minCoeff() < -1e-8 * std::max(1.0, lam_max)) {
    throw invalid_matrix_error("block covariance must be positive semidefinite within 1e-8");
  }
}

Eigen::MatrixXd BlockCovariance::assembled() const {
  const Eigen::Index nz = dim_z();
  const Eigen::Index m = dim_r();
  Eigen::MatrixXd joint(nz + m, nz + m);
  joint.topLeftCorner(nz, nz) = sigma_z_;
  joint.topRightCorner(nz, m) = sigma_rz_.transpose();
  joint.bottomLeftCorner(m, nz) = sigma_rz_;
  joint.bottomRightCorner(m, m) = sigma_r_;
  return joint;
}

BlockCovariance empirical_block_covariance(const FeatureMatrix& R, const FeatureMatrix& Z) {
  if (R.rows() != Z.rows()) {
    throw shape_error("R and Z must have the same number of samples");
  }
  const Eigen::Index n = R.rows();
  if (n < 2) {
    throw invalid_input_error("empirical covariance requires at least two samples");
  }
  const Eigen::Index m = R.cols();
  const Eigen::Index nz = Z.cols();
  if (n < m + nz + 1) {
    std::cerr << "warning: empirical joint covariance from " << n << " samples of dimension "
              << (m + nz) << " is rank deficient\n";
  }
  Eigen::MatrixXd joint_data(n, nz + m);
  joint_data.leftCols(nz) = Z.values();
  joint_data.rightCols(m) = R.values();
  const Eigen::RowVectorXd mean = joint_data.colwise().mean();
  const Eigen::MatrixXd centered = joint_data.rowwise() - mean;
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
  cov = 0.5 * (cov + cov.transpose().eval());
  return BlockCovariance(cov.topLeftCorner(nz, nz), cov.bottomRightCorner(m, m),
                         cov.bottomLeftCorner(m, nz));
}

double gaussian_mutual_info(const BlockCovariance& c, double ridge) {
  const ConditionalParts parts = conditional_parts(c, ridge);
  const double disagreement = std::abs(parts.form_zr - parts.form_rz);
  const double scale = std::max({1.0, std::abs(parts.form_zr), std::abs(parts.form_rz)});
  if (disagreement > kSchurAgreementTol * scale) {
    throw error("conditional-variance forms of the Gaussian MI disagree beyond 1e-6 relative");
  }
  return 0.5 * (parts.form_zr + parts.form_rz);
}

MutualInfoForms gaussian_mutual_info_forms(const BlockCovariance& c, double ridge) {
  const ConditionalParts parts = conditional_parts(c, ridge);
  return {parts.form_zr, parts.form_rz};
}

double gaussian_entropy(const Eigen::MatrixXd& sigma_r) {
  if (sigma_r.rows() != sigma_r.cols() || sigma_r.rows() < 1) {
    throw shape_error("covariance block must be square and nonempty");
  }
  const auto m = static_cast<double>(sigma_r.rows());
  Eigen::MatrixXd ridged = sigma_r;
  ridged.diagonal().array() += 1e-12 * std::max(1.0, sigma_r.trace() / m);
  const double logdet = logdet_spd(ridged, "Sigma_R");
  return 0.5 * m * std::log(2.0 * std::numbers::pi) + 0.5 * logdet + 0.5 * m;
}

BoundTerms bound_decomposition(const BlockCovariance& c, double g_const) {
  const ConditionalParts parts = conditional_parts(c, kAutoRidge);
  BoundTerms terms;
  terms.k_term = 0.5 * (parts.logdet_sigma_r - parts.logdet_sigma_z);
  terms.v_term = 0.5 * parts.logdet_var_z_given_r;
  terms.d_term = 0.5 * static_cast<double>(c.dim_r()) * (std::log(2.0 * std::numbers::pi) + 1.0);
  terms.g_const = g_const;
  return terms;
}

SweepResult sweep_features(const BlobConfig& base, const std::vector<int>& feature_counts,
                           int pca_k, int repeats) {
  if (feature_counts.empty()) {
    throw invalid_parameter_error("feature sweep needs at least one feature count");
  }
  std::vector<double> params;
  params.reserve(feature_counts.size());
  for (int count : feature_counts) {
    if (count < pca_k + 1) {
      throw invalid_parameter_error("every feature count must be at least pca_k + 1");
    }
    params.push_back(static_cast<double>(count));
  }
  return run_sweep(base, params, /*vary_features=*/true, pca_k, repeats);
}

SweepResult sweep_variance(const BlobConfig& base, const std::vector<double>& cluster_stds,
                           int pca_k, int repeats) {
  if (cluster_stds.empty()) {
    throw invalid_parameter_error("variance sweep needs at least one cluster std");
  }
  for (double std_value : cluster_stds) {
    if (!(std_value > 0.0)) {
      throw invalid_parameter_error("every cluster std must be positive");
    }
  }
  if (base.n_features < pca_k + 1) {
    throw invalid_parameter_error("feature count must be at least pca_k + 1");
  }
  return run_sweep(base, cluster_stds, /*vary_features=*/false, pca_k, repeats);
}

}  // namespace repdyn
