#pragma once

#include "repdyn/types.hpp"

#include <cstdint>
#include <vector>

namespace repdyn {

/**
 * Synthetic isotropic Gaussian clusters: `n_centers` cluster centers placed
 * uniformly in [center_min, center_max]^n_features, samples assigned to
 * centers round-robin and perturbed with N(0, cluster_std^2) noise.
 * Fully determined by `seed`.
 */
struct BlobConfig {
  int n_samples = 1000;
  int n_features = 2;
  int n_centers = 5;
  double cluster_std = 1.0;
  double center_min = -10.0;
  double center_max = 10.0;
  std::uint64_t seed = 0;
};

FeatureMatrix generate_blobs(const BlobConfig& cfg);

/// Cluster index of each generated sample (round-robin assignment).
std::vector<int> blob_labels(const BlobConfig& cfg);

/**
 * Principal-component projector fitted on a data matrix: column means,
 * top-k orthonormal component rows, and the matching covariance
 * eigenvalues in descending order.
 */
class PcaProjector {
 public:
  PcaProjector(Eigen::VectorXd mean, Eigen::MatrixXd components, Eigen::VectorXd explained);

  Eigen::Index input_dim() const { return mean_.size(); }
  Eigen::Index output_dim() const { return components_.rows(); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& components() const { return components_; }
  const Eigen::VectorXd& explained() const { return explained_; }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd components_;  // k x d, orthonormal rows
  Eigen::VectorXd explained_;   // k covariance eigenvalues, descending
};

PcaProjector fit_pca(const FeatureMatrix& X, int k);

/// (X - mean) * components^T, shape n x k.
FeatureMatrix project(const PcaProjector& p, const FeatureMatrix& X);

/**
 * Joint covariance of a pair of Gaussian variable blocks (Z, R), stored as
 * the marginal blocks plus the cross block. The assembled matrix is
 * [[Sigma_Z, Sigma_ZR], [Sigma_RZ, Sigma_R]] and must be symmetric PSD
 * within 1e-8.
 */
class BlockCovariance {
 public:
  BlockCovariance(Eigen::MatrixXd sigma_z, Eigen::MatrixXd sigma_r, Eigen::MatrixXd sigma_rz);

  Eigen::Index dim_z() const { return sigma_z_.rows(); }
  Eigen::Index dim_r() const { return sigma_r_.rows(); }
  const Eigen::MatrixXd& sigma_z() const { return sigma_z_; }
  const Eigen::MatrixXd& sigma_r() const { return sigma_r_; }
  /// Cross block Cov(R, Z), shape dim_r x dim_z.
  const Eigen::MatrixXd& sigma_rz() const { return sigma_rz_; }
  Eigen::MatrixXd sigma_zr() const { return sigma_rz_.transpose(); }

  Eigen::MatrixXd assembled() const;

 private:
  Eigen::MatrixXd sigma_z_;
  Eigen::MatrixXd sigma_r_;
  Eigen::MatrixXd sigma_rz_;
};

/// Sample covariance (1/(n-1)) of the concatenated rows (Z_i, R_i).
BlockCovariance empirical_block_covariance(const FeatureMatrix& R, const FeatureMatrix& Z);

/// Sentinel: pick the ridge automatically (1e-9 * trace/dim of the joint,
/// applied only when the joint covariance is numerically rank-deficient).
inline constexpr double kAutoRidge = -1.0;

/**
 * Closed-form mutual information of a jointly Gaussian (Z, R) pair.
 * Evaluates both conditional-variance forms
 *   0.5 (ln|Sigma_Z| - ln|Var(Z|R)|)  and  0.5 (ln|Sigma_R| - ln|Var(R|Z)|)
 * with Var(Z|R) = Sigma_Z - Sigma_ZR (Sigma_R + ridge I)^-1 Sigma_RZ,
 * checks they agree within 1e-6 relative, and returns their mean.
 * Throws singular_model_error when a conditional covariance collapses
 * (determinant below 1e-300 after ridging), which signals a deterministic
 * map between the blocks.
 */
double gaussian_mutual_info(const BlockCovariance& c, double ridge = kAutoRidge);

/// Both conditional-variance forms of the closed-form MI, for consumers
/// that want to inspect the dual-route agreement directly.
struct MutualInfoForms {
  double from_z_given_r = 0.0;  // 0.5 (ln|Sigma_Z| - ln|Var(Z|R)|)
  double from_r_given_z = 0.0;  // 0.5 (ln|Sigma_R| - ln|Var(R|Z)|)
};

MutualInfoForms gaussian_mutual_info_forms(const BlockCovariance& c, double ridge = kAutoRidge);

/// Differential entropy (m/2) ln(2 pi) + 0.5 ln|Sigma| + m/2 of an
/// m-dimensional Gaussian; a 1e-12-scale ridge guards the determinant.
double gaussian_entropy(const Eigen::MatrixXd& sigma_r);

/**
 * Decomposition of the information bound into a variance-differential
 * term K = 0.5 (ln|Sigma_R| - ln|Sigma_Z|), a conditional-variance term
 * V = 0.5 ln|Var(Z|R)|, and a total-dimension term D = (m/2)(ln 2pi + 1),
 * plus the caller-supplied constant G. Satisfies
 * k + v + d = H(R) - I(R;Z) for the same covariance.
 */
struct BoundTerms {
  double k_term = 0.0;
  double v_term = 0.0;
  double d_term = 0.0;
  double g_const = 0.0;
};

BoundTerms bound_decomposition(const BlockCovariance& c, double g_const);

/// One generate-project-measure sample of a simulation sweep.
struct SweepSample {
  double param = 0.0;
  int repeat = 0;
  std::uint64_t seed = 0;
  double mi = 0.0;
  double entropy_r = 0.0;
  double effective_rank_r = 0.0;
};

/// Aggregate of all repeats at one parameter value.
struct SweepPoint {
  double param = 0.0;
  double mi_mean = 0.0;
  double mi_std = 0.0;
};

struct SweepResult {
  std::vector<SweepSample> samples;
  std::vector<SweepPoint> aggregate;
};

/**
 * I(R;Z) as the feature count of the generated data varies with the
 * cluster noise fixed: for each count, generate blobs, project to pca_k
 * principal components, and evaluate the closed-form MI on the empirical
 * joint covariance; repeats use seeds base.seed + repeat.
 */
SweepResult sweep_features(const BlobConfig& base, const std::vector<int>& feature_counts,
                           int pca_k, int repeats);

/// Same protocol with the cluster noise varied and the feature count fixed.
SweepResult sweep_variance(const BlobConfig& base, const std::vector<double>& cluster_stds,
                           int pca_k, int repeats);

}  // namespace repdyn
