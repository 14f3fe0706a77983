#pragma once

#include "bmot/linalg.hpp"

namespace bmot {

/// Paired samples (X_i, Y_i) with uniform weights 1/n. Rows of Y must be
/// pairwise distinct: the empirical stand-in for an atomless law of Y.
class SampleSet {
 public:
  SampleSet(Matrix x, Matrix y);

  Eigen::Index n() const { return x_.rows(); }
  Eigen::Index dx() const { return x_.cols(); }
  Eigen::Index dy() const { return y_.cols(); }
  const Matrix& x() const { return x_; }
  const Matrix& y() const { return y_; }

 private:
  Matrix x_, y_;
};

}  // namespace bmot
