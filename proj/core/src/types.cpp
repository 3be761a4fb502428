#include "repdyn/types.hpp"

#include "repdyn/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace repdyn {

namespace {

constexpr double kSymmetryTol = 1e-9;
constexpr double kUnitDiagTol = 1e-9;
constexpr double kPsdTol = 1e-8;
// Eigenvalues this small relative to the largest one are treated as zero.
constexpr double kEigenNoiseRel = 1e-10;

}  // namespace

FeatureMatrix::FeatureMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw invalid_input_error("FeatureMatrix requires at least one row and one column");
  }
  if (!values_.allFinite()) {
    throw invalid_input_error("FeatureMatrix entries must be finite");
  }
}

Spectrum::Spectrum(Eigen::VectorXd values, SpectrumNormalization normalization)
    : values_(std::move(values)), normalization_(normalization) {
  if (values_.size() < 1) {
    throw invalid_input_error("Spectrum must hold at least one value");
  }
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] < 0.0) {
      throw invalid_input_error("Spectrum values must be finite and nonnegative");
    }
    if (i > 0 && values_[i] > values_[i - 1]) {
      throw invalid_input_error("Spectrum values must be sorted in descending order");
    }
  }
  if (normalization_ == SpectrumNormalization::l1 &&
      std::abs(values_.sum() - 1.0) > 1e-9) {
    throw invalid_input_error("l1-normalized Spectrum must sum to one");
  }
}

Spectrum Spectrum::l1_normalized() const {
  const double total = values_.sum();
  if (total <= 0.0) {
    throw degenerate_spectrum_error("cannot l1-normalize an all-zero spectrum");
  }
  Eigen::VectorXd scaled = values_ / total;
  // Guard against rounding pushing the sum outside the constructor tolerance.
  scaled /= scaled.sum();
  return Spectrum(scaled, SpectrumNormalization::l1);
}

GramMatrix GramMatrix::from_features(const FeatureMatrix& X) {
  Eigen::MatrixXd rows = X.values();
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double norm = rows.row(i).norm();
    if (norm <= 0.0) {
      throw invalid_input_error("cannot build Gram matrix: row " + std::to_string(i) +
                                " has zero norm");
    }
    rows.row(i) /= norm;
  }
  Eigen::MatrixXd gram = rows * rows.transpose();
  gram.diagonal().setOnes();  // exact unit diagonal despite rounding
  return GramMatrix(std::move(gram));
}

GramMatrix GramMatrix::from_matrix(Eigen::MatrixXd values) {
  if (values.rows() != values.cols() || values.rows() < 1) {
    throw invalid_matrix_error("Gram matrix must be square and nonempty");
  }
  if (!values.allFinite()) {
    throw invalid_matrix_error("Gram matrix entries must be finite");
  }
  if ((values - values.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
    throw invalid_matrix_error("Gram matrix must be symmetric within 1e-9");
  }
  if ((values.diagonal().array() - 1.0).abs().maxCoeff() > kUnitDiagTol) {
    throw invalid_matrix_error("Gram matrix diagonal must be one within 1e-9");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(values, Eigen::EigenvaluesOnly);
  Eigen::VectorXd eigs = solver.eigenvalues();
  const double largest = eigs.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    if (std::abs(eigs[i]) < kEigenNoiseRel * largest) eigs[i] = 0.0;
  }
  if (eigs.minCoeff() < -kPsdTol) {
    throw invalid_matrix_error("Gram matrix is not positive semidefinite within tolerance");
  }
  return GramMatrix(std::move(values));
}

GramMatrix GramMatrix::hadamard(const GramMatrix& other) const {
  if (other.size() != size()) {
    throw shape_error("Hadamard product requires Gram matrices of equal size");
  }
  return GramMatrix(values_.cwiseProduct(other.values_));
}

}  // namespace repdyn
