#include "bmot/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "bmot/errors.hpp"

namespace bmot {

double min_sym_eigenvalue(const Matrix& m) {
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool is_positive_definite(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  const Vector& ev = es.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  return scale > 0.0 && ev.minCoeff() > kEigRelTol * scale;
}

Matrix spd_power(const Matrix& c, double alpha) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(c);
  if (es.info() != Eigen::Success) {
    throw NumericalError("spd_power: eigendecomposition failed");
  }
  const Vector& ev = es.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  if (!(scale > 0.0) || ev.minCoeff() <= kEigRelTol * scale) {
    throw ValidationError("spd_power: matrix is not positive-definite");
  }
  const Vector powered = ev.unaryExpr([alpha](double x) { return std::pow(x, alpha); });
  return es.eigenvectors() * powered.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace bmot
