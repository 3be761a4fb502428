#pragma once

#include <Eigen/Core>

#include <utility>

namespace repdyn {

/**
 * A batch of n samples with d real-valued features, one sample per row.
 * Entries are validated to be finite on construction.
 */
class FeatureMatrix {
 public:
  explicit FeatureMatrix(Eigen::MatrixXd values);

  Eigen::Index rows() const { return values_.rows(); }
  Eigen::Index cols() const { return values_.cols(); }
  const Eigen::MatrixXd& values() const { return values_; }

 private:
  Eigen::MatrixXd values_;
};

enum class SpectrumNormalization { raw, l1 };

/**
 * An ordered eigen/singular value spectrum: nonnegative reals, descending,
 * with a tag recording whether the values have been scaled to sum to one.
 */
class Spectrum {
 public:
  Spectrum(Eigen::VectorXd values, SpectrumNormalization normalization);

  Eigen::Index size() const { return values_.size(); }
  const Eigen::VectorXd& values() const { return values_; }
  SpectrumNormalization normalization() const { return normalization_; }

  /// Sum-to-one rescaled copy of this spectrum.
  Spectrum l1_normalized() const;

 private:
  Eigen::VectorXd values_;
  SpectrumNormalization normalization_;
};

/**
 * Symmetric PSD n-by-n matrix with unit diagonal, as consumed by the
 * matrix-based entropy estimators. `from_features` builds the Gram matrix
 * of l2-normalized rows (PSD by construction, rows are not centered);
 * `from_matrix` accepts an explicit matrix and validates symmetry, the
 * unit diagonal, and positive semidefiniteness up to tolerance.
 */
class GramMatrix {
 public:
  static GramMatrix from_features(const FeatureMatrix& X);
  static GramMatrix from_matrix(Eigen::MatrixXd values);

  Eigen::Index size() const { return values_.rows(); }
  const Eigen::MatrixXd& values() const { return values_; }

  /// Entrywise (Hadamard) product; unit-diagonal PSD is closed under it.
  GramMatrix hadamard(const GramMatrix& other) const;

 private:
  explicit GramMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {}

  Eigen::MatrixXd values_;
};

}  // namespace repdyn
