#pragma once

#include <stdexcept>
#include <string>

namespace repdyn {

/// Base class for all library errors.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Input data contains NaN/Inf or otherwise violates a data precondition.
class invalid_input_error : public error {
 public:
  using error::error;
};

/// A spectrum with no positive mass was passed to an entropy-style metric.
class degenerate_spectrum_error : public error {
 public:
  using error::error;
};

/// A matrix violates the structural requirements of the operation
/// (not symmetric, not PSD beyond tolerance, diagonal not as required).
class invalid_matrix_error : public error {
 public:
  using error::error;
};

/// Row/column counts of the operands do not line up.
class shape_error : public error {
 public:
  using error::error;
};

/// A scalar parameter is outside its admissible range.
class invalid_parameter_error : public error {
 public:
  using error::error;
};

/// A Gaussian model is singular: a conditional covariance collapsed to
/// (numerically) zero volume, which signals a deterministic map between
/// the two variable blocks.
class singular_model_error : public error {
 public:
  using error::error;
};

/// Batch too small for the loss to be defined.
class degenerate_batch_error : public error {
 public:
  using error::error;
};

/// Training produced a non-finite loss or gradient.
class training_divergence_error : public error {
 public:
  explicit training_divergence_error(const std::string& what, int last_good_epoch)
      : error(what), last_good_epoch_(last_good_epoch) {}

  int last_good_epoch() const { return last_good_epoch_; }

 private:
  int last_good_epoch_ = 0;
};

/// Configuration text could not be parsed or validated.
class parse_error : public error {
 public:
  using error::error;
};

}  // namespace repdyn
