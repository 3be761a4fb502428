#pragma once

#include "repdyn/types.hpp"

namespace repdyn {

enum class SpectrumMode {
  covariance,  ///< eigenvalues of the sample covariance of mean-centered columns
  singular,    ///< singular values of the matrix as given (no centering)
};

/// Descending nonnegative spectrum of a feature matrix (normalization tag: raw).
/// Values below 1e-10 times the largest value are clamped to zero.
Spectrum compute_spectrum(const FeatureMatrix& X, SpectrumMode mode);

/// exp of the Shannon entropy of the l1-normalized spectrum; a continuous
/// surrogate for rank, in [1, number of nonzero values].
double effective_rank(const Spectrum& s);

/// Shannon entropy of the l1-normalized spectrum in nats, zero terms skipped.
double von_neumann_entropy(const Spectrum& s);

/// alpha-Renyi matrix entropy (1/(1-alpha)) * ln tr((A/n)^alpha).
double renyi_matrix_entropy(const GramMatrix& A, double alpha);

/// Matrix-based mutual information estimate
/// I(A;B) = H_a(A) + H_a(B) - H_a(A.B) over the Gram matrices of the
/// row-l2-normalized inputs, with . the Hadamard product.
double matrix_mutual_information(const FeatureMatrix& X, const FeatureMatrix& Y, double alpha);

/// -sum_i l_i ln l_i + sum_i l_i over the eigenvalues of A.
double matrix_entropy_me(const GramMatrix& A);

/// Fraction of total spectrum mass held by the top ceil(p*N) values.
double cumulative_explained_variance(const Spectrum& s, double p);

/// Number of l1-normalized spectrum values strictly greater than tau.
int count_above_threshold(const Spectrum& s, double tau);

/// ln of the mean pairwise Gaussian potential exp(-2 ||xi - xj||^2) over
/// distinct unordered row pairs, rows scaled to unit l2 norm first.
/// More negative means more uniformly spread on the hypersphere.
double uniformity(const FeatureMatrix& X);

}  // namespace repdyn
