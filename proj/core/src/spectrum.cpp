#include "repdyn/spectrum.hpp"

#include "repdyn/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace repdyn {

namespace {

constexpr double kEigenNoiseRel = 1e-10;
// Entropy terms with normalized mass below this are treated as exact zeros.
constexpr double kEntropyFloor = 1e-12;

Eigen::VectorXd singular_values(const Eigen::MatrixXd& M) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
  return svd.singularValues();
}

/// Shannon entropy in nats of the l1-normalized spectrum.
double spectral_entropy(const Spectrum& s) {
  const Spectrum p = s.l1_normalized();
  double entropy = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double pi = p.values()[i];
    if (pi > kEntropyFloor) entropy -= pi * std::log(pi);
  }
  return entropy;
}

/// Eigenvalues of a symmetric matrix, ascending, with sub-noise values
/// clamped to zero and a PSD check against the Gram tolerance.
Eigen::VectorXd psd_eigenvalues(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M, Eigen::EigenvaluesOnly);
  Eigen::VectorXd eigs = solver.eigenvalues();
  const double largest = eigs.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    if (std::abs(eigs[i]) < kEigenNoiseRel * largest) eigs[i] = 0.0;
  }
  if (eigs.size() > 0 && eigs.minCoeff() < -1e-8 * std::max(1.0, largest)) {
    throw invalid_matrix_error("matrix is not positive semidefinite within tolerance");
  }
  return eigs.cwiseMax(0.0);
}

double renyi_entropy_of_gram_values(const Eigen::MatrixXd& A, double alpha) {
  const double n = static_cast<double>(A.rows());
  if (alpha == 2.0) {
    // tr((A/n)^2) is the squared Frobenius norm of A/n; no eigensolve needed.
    return -std::log(A.squaredNorm() / (n * n));
  }
  const Eigen::VectorXd eigs = psd_eigenvalues(A / n);
  double trace_power = 0.0;
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    if (eigs[i] > 0.0) trace_power += std::pow(eigs[i], alpha);
  }
  if (trace_power <= 0.0) {
    throw degenerate_spectrum_error("Renyi entropy undefined for zero trace power");
  }
  return std::log(trace_power) / (1.0 - alpha);
}

void check_renyi_alpha(double alpha) {
  if (!(alpha > 0.0) || alpha == 1.0) {
    throw invalid_parameter_error("Renyi order alpha must be positive and not equal to 1");
  }
}

}  // namespace

Spectrum compute_spectrum(const FeatureMatrix& X, SpectrumMode mode) {
  const Eigen::Index n = X.rows();
  Eigen::VectorXd values;
  // Singular values below this come from cancellation noise, not data.
  const double sigma_floor = 1e-12 * static_cast<double>(std::max(X.rows(), X.cols())) *
                             X.values().cwiseAbs().maxCoeff();
  if (mode == SpectrumMode::covariance) {
    if (n < 2) {
      throw invalid_input_error("covariance spectrum requires at least two samples");
    }
    Eigen::MatrixXd centered = X.values().rowwise() - X.values().colwise().mean();
    Eigen::VectorXd sigma = singular_values(centered);
    values = sigma.unaryExpr([&](double s) {
      return s <= sigma_floor ? 0.0 : s * s / static_cast<double>(n - 1);
    });
  } else {
    values = singular_values(X.values());
    values = values.unaryExpr([&](double s) { return s <= sigma_floor ? 0.0 : s; });
  }
  const double largest = values.size() > 0 ? values[0] : 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] < kEigenNoiseRel * largest) values[i] = 0.0;
  }
  return Spectrum(values, SpectrumNormalization::raw);
}

double effective_rank(const Spectrum& s) {
  return std::exp(spectral_entropy(s));
}

double von_neumann_entropy(const Spectrum& s) {
  return spectral_entropy(s);
}

double renyi_matrix_entropy(const GramMatrix& A, double alpha) {
  check_renyi_alpha(alpha);
  return renyi_entropy_of_gram_values(A.values(), alpha);
}

double matrix_mutual_information(const FeatureMatrix& X, const FeatureMatrix& Y, double alpha) {
  check_renyi_alpha(alpha);
  if (X.rows() != Y.rows()) {
    throw shape_error("matrix mutual information requires equal sample counts");
  }
  if (X.rows() < 2) {
    throw invalid_input_error("matrix mutual information requires at least two samples");
  }
  const GramMatrix A = GramMatrix::from_features(X);
  const GramMatrix B = GramMatrix::from_features(Y);
  const GramMatrix AB = A.hadamard(B);
  return renyi_entropy_of_gram_values(A.values(), alpha) +
         renyi_entropy_of_gram_values(B.values(), alpha) -
         renyi_entropy_of_gram_values(AB.values(), alpha);
}

double matrix_entropy_me(const GramMatrix& A) {
  const Eigen::VectorXd eigs = psd_eigenvalues(A.values());
  double entropy = 0.0;
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    if (eigs[i] > kEntropyFloor) entropy -= eigs[i] * std::log(eigs[i]);
  }
  return entropy + eigs.sum();
}

double cumulative_explained_variance(const Spectrum& s, double p) {
  if (!(p > 0.0) || p > 1.0) {
    throw invalid_parameter_error("explained-variance fraction p must lie in (0, 1]");
  }
  const double total = s.values().sum();
  if (total <= 0.0) {
    throw degenerate_spectrum_error("explained variance undefined for an all-zero spectrum");
  }
  const auto count = static_cast<Eigen::Index>(
      std::ceil(p * static_cast<double>(s.size())));
  return s.values().head(count).sum() / total;
}

int count_above_threshold(const Spectrum& s, double tau) {
  if (!(tau > 0.0)) {
    throw invalid_parameter_error("threshold tau must be positive");
  }
  const Spectrum normalized = s.l1_normalized();
  int count = 0;
  for (Eigen::Index i = 0; i < normalized.size(); ++i) {
    if (normalized.values()[i] > tau) ++count;
  }
  return count;
}

double uniformity(const FeatureMatrix& X) {
  const Eigen::Index n = X.rows();
  if (n < 2) {
    throw invalid_input_error("uniformity requires at least two samples");
  }
  Eigen::MatrixXd rows = X.values();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = rows.row(i).norm();
    if (norm <= 0.0) {
      throw invalid_input_error("uniformity: row " + std::to_string(i) + " has zero norm");
    }
    rows.row(i) /= norm;
  }
  // ||xi - xj||^2 = 2 - 2 <xi, xj> for unit rows.
  const Eigen::MatrixXd gram = rows * rows.transpose();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double sq_dist = std::max(0.0, 2.0 - 2.0 * gram(i, j));
      sum += std::exp(-2.0 * sq_dist);
    }
  }
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return std::log(sum / pairs);
}

}  // namespace repdyn
