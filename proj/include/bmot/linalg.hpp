#pragma once

#include <Eigen/Dense>

namespace bmot {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Relative eigenvalue threshold used to classify signatures and definiteness.
inline constexpr double kEigRelTol = 1e-10;

/// Smallest eigenvalue of the symmetric part (M + M^T)/2.
double min_sym_eigenvalue(const Matrix& m);

/// True iff the symmetric part of `m` has all eigenvalues above
/// kEigRelTol * max|eigenvalue|.
bool is_positive_definite(const Matrix& m);

/// Symmetric matrix power C^alpha for symmetric positive-definite C.
/// Throws ValidationError if C has an eigenvalue below the tolerance; no
/// clamping is applied.
Matrix spd_power(const Matrix& c, double alpha);

}  // namespace bmot
