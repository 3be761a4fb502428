#pragma once

#include <Eigen/Core>

namespace repdyn {

/// Weights and constants shared by the contrastive and redundancy-reduction
/// losses. Defaults follow the standard settings: temperature 0.1,
/// invariance/variance weights 25, covariance weight 1, variance target 1.
struct LossConfig {
  double tau = 0.1;
  double lambda_sim = 25.0;
  double mu_var = 25.0;
  double nu_cov = 1.0;
  double gamma = 1.0;
  /// Stabilizer inside the regularized standard deviation sqrt(var + eps).
  double var_eps = 1e-4;
};

/// A loss value together with its gradients with respect to both embedding
/// matrices.
struct LossValue {
  double loss = 0.0;
  Eigen::MatrixXd grad_z;
  Eigen::MatrixXd grad_zp;
};

/**
 * NT-Xent contrastive loss over the 2N embeddings of two augmented views,
 * averaged over all 2N anchors. Similarities are cosine, scaled by the
 * temperature; each anchor's positive is its counterpart in the other view
 * and the denominator runs over all other 2N - 1 embeddings.
 */
LossValue info_nce_loss(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& Zp, double tau);

/**
 * Invariance + variance + covariance loss:
 *   lambda * s(Z,Z') + mu * [v(Z) + v(Z')] + nu * [c(Z) + c(Z')]
 * with s the mean squared row difference, v the mean hinge on the
 * regularized per-dimension standard deviation against gamma, and c the
 * mean squared off-diagonal entry of the sample covariance scaled by 1/D.
 * The hinge uses subgradient zero exactly at the target.
 */
LossValue vicreg_loss(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& Zp, const LossConfig& cfg);

/// Convex combination alpha * NT-Xent + (1 - alpha) * VICReg-style loss.
/// At the endpoints only the active loss is evaluated.
LossValue blended_loss(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& Zp, double alpha,
                       const LossConfig& cfg);

/// Loss values without the gradient computation (for logging).
double info_nce_loss_value(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& Zp, double tau);
double vicreg_loss_value(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& Zp,
                         const LossConfig& cfg);

}  // namespace repdyn
