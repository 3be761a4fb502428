#include "repdyn/losses.hpp"

#include "repdyn/errors.hpp"

#include <cmath>
#include <limits>

namespace repdyn {

namespace {

void check_pair_shapes(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& Zp) {
  if (Z.rows() != Zp.rows() || Z.cols() != Zp.cols()) {
    throw shape_error("the two views must have identical shapes");
  }
  if (Z.rows() < 2) {
    throw degenerate_batch_error("contrastive losses require a batch of at least two samples");
  }
  if (!Z.allFinite() || !Zp.allFinite()) {
    throw invalid_input_error("embeddings must be finite");
  }
}

/**
 * NT-Xent engine. Cosine similarities are bounded by 1, so the softmax is
 * computed from exp((s - 1)/tau), which never overflows; the constant shift
 * cancels in the loss and the softmax weights.
 */
LossValue info_nce_impl(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& Zp, double tau,
                        bool with_grads) {
  check_pair_shapes(Z, Zp);
  if (!(tau > 0.0)) {
    throw invalid_parameter_error("temperature tau must be positive");
  }
  const Eigen::Index n = Z.rows();
  const Eigen::Index total = 2 * n;

  Eigen::MatrixXd unit(total, Z.cols());
  unit.topRows(n) = Z;
  unit.bottomRows(n) = Zp;

  const Eigen::VectorXd norms = unit.rowwise().norm();
  if (norms.minCoeff() <= 0.0) {
    throw invalid_input_error("cosine similarity undefined for a zero embedding row");
  }
  unit.array().colwise() /= norms.array();

  // The (2N)^2 buffer is by far the largest allocation in a training epoch;
  // keep it across calls and morph it in place from cosine similarities to
  // softmax weights to the similarity gradient.
  static thread_local Eigen::MatrixXd work;
  work.resize(total, total);
  work.noalias() = unit * unit.transpose();

  Eigen::VectorXd positive_sim(total);
  for (Eigen::Index i = 0; i < total; ++i) {
    positive_sim[i] = work(i, i < n ? i + n : i - n);
  }
  work.diagonal().setConstant(-std::numeric_limits<double>::infinity());
  work.array() = ((work.array() - 1.0) / tau).exp();
  const Eigen::VectorXd row_sum = work.rowwise().sum();

  double loss = 0.0;
  for (Eigen::Index i = 0; i < total; ++i) {
    loss += std::log(row_sum[i]) + (1.0 - positive_sim[i]) / tau;
  }
  loss /= static_cast<double>(total);

  LossValue value;
  value.loss = loss;
  if (!with_grads) return value;

  // d loss / d similarity: softmax weights minus the positive indicator,
  // all scaled by 1/(2N tau).
  const double scale = 1.0 / (static_cast<double>(total) * tau);
  const Eigen::VectorXd row_scale = (scale / row_sum.array()).matrix();
  work.array().colwise() *= row_scale.array();
  for (Eigen::Index i = 0; i < total; ++i) {
    work(i, i < n ? i + n : i - n) -= scale;
  }

  // Each similarity appears once per anchor; accumulate both orientations,
  // then push through the row-normalization Jacobian.
  Eigen::MatrixXd grad_unit(total, Z.cols());
  grad_unit.noalias() = work * unit;
  grad_unit.noalias() += work.transpose() * unit;
  Eigen::MatrixXd grad(total, Z.cols());
  for (Eigen::Index i = 0; i < total; ++i) {
    const double radial = grad_unit.row(i).dot(unit.row(i));
    grad.row(i) = (grad_unit.row(i) - radial * unit.row(i)) / norms[i];
  }

  value.grad_z = grad.topRows(n);
  value.grad_zp = grad.bottomRows(n);
  return value;
}

/// Variance and covariance terms of one view plus their gradient,
/// already divided by the embedding dimension.
struct ViewTerms {
  double variance = 0.0;
  double covariance = 0.0;
  Eigen::MatrixXd grad_variance;
  Eigen::MatrixXd grad_covariance;
};

ViewTerms view_terms(const Eigen::MatrixXd& V, const LossConfig& cfg, bool with_grads) {
  const Eigen::Index n = V.rows();
  const Eigen::Index d = V.cols();
  const double dim = static_cast<double>(d);
  const double denom = static_cast<double>(n - 1);

  const Eigen::RowVectorXd mean = V.colwise().mean();
  const Eigen::MatrixXd centered = V.rowwise() - mean;

  ViewTerms terms;

  // Hinge on the regularized standard deviation per dimension; subgradient
  // zero when the standard deviation sits exactly at the target.
  const Eigen::VectorXd var =
      centered.array().square().colwise().sum().transpose() / denom;
  const Eigen::VectorXd stddev = (var.array() + cfg.var_eps).sqrt();
  Eigen::VectorXd coeff = Eigen::VectorXd::Zero(d);
  double hinge_sum = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (stddev[j] < cfg.gamma) {
      hinge_sum += cfg.gamma - stddev[j];
      coeff[j] = -1.0 / (denom * stddev[j] * dim);
    }
  }
  terms.variance = hinge_sum / dim;

  // Mean squared off-diagonal sample covariance.
  Eigen::MatrixXd cov = centered.transpose() * centered / denom;
  cov.diagonal().setZero();
  terms.covariance = cov.squaredNorm() / dim;

  if (with_grads) {
    terms.grad_variance = centered.array().rowwise() * coeff.transpose().array();
    terms.grad_covariance = centered * cov * (4.0 / (dim * denom));
  }
  return terms;
}

LossValue vicreg_impl(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& Zp, const LossConfig& cfg,
                      bool with_grads) {
  check_pair_shapes(Z, Zp);
  if (!(cfg.gamma > 0.0)) {
    throw invalid_parameter_error("variance target gamma must be positive");
  }
  const double n = static_cast<double>(Z.rows());

  const Eigen::MatrixXd diff = Z - Zp;
  const double invariance = diff.squaredNorm() / n;

  const ViewTerms z_terms = view_terms(Z, cfg, with_grads);
  const ViewTerms zp_terms = view_terms(Zp, cfg, with_grads);

  LossValue value;
  value.loss = cfg.lambda_sim * invariance + cfg.mu_var * (z_terms.variance + zp_terms.variance) +
               cfg.nu_cov * (z_terms.covariance + zp_terms.covariance);
  if (with_grads) {
    value.grad_z = cfg.lambda_sim * (2.0 / n) * diff + cfg.mu_var * z_terms.grad_variance +
                   cfg.nu_cov * z_terms.grad_covariance;
    value.grad_zp = cfg.lambda_sim * (-2.0 / n) * diff + cfg.mu_var * zp_terms.grad_variance +
                    cfg.nu_cov * zp_terms.grad_covariance;
  }
  return value;
}

}  // namespace

LossValue info_nce_loss(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& Zp, double tau) {
  return info_nce_impl(Z, Zp, tau, /*with_grads=*/true);
}

double info_nce_loss_value(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& Zp, double tau) {
  return info_nce_impl(Z, Zp, tau, /*with_grads=*/false).loss;
}

LossValue vicreg_loss(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& Zp,
                      const LossConfig& cfg) {
  return vicreg_impl(Z, Zp, cfg, /*with_grads=*/true);
}

double vicreg_loss_value(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& Zp,
                         const LossConfig& cfg) {
  return vicreg_impl(Z, Zp, cfg, /*with_grads=*/false).loss;
}

LossValue blended_loss(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& Zp, double alpha,
                       const LossConfig& cfg) {
  if (!(alpha >= 0.0) || !(alpha <= 1.0)) {
    throw invalid_parameter_error("alpha must lie in [0, 1]");
  }
  if (alpha == 1.0) return info_nce_loss(Z, Zp, cfg.tau);
  if (alpha == 0.0) return vicreg_loss(Z, Zp, cfg);

  const LossValue nce = info_nce_loss(Z, Zp, cfg.tau);
  const LossValue vic = vicreg_loss(Z, Zp, cfg);
  LossValue value;
  value.loss = alpha * nce.loss + (1.0 - alpha) * vic.loss;
  value.grad_z = alpha * nce.grad_z + (1.0 - alpha) * vic.grad_z;
  value.grad_zp = alpha * nce.grad_zp + (1.0 - alpha) * vic.grad_zp;
  return value;
}

}  // namespace repdyn
