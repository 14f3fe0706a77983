#pragma once

// Positive-definite solution of the non-symmetric algebraic Riccati equation
//   A Suu A + A Suv - Svu A = Svv,        Svu = Suv^T,
// and the symmetric special case Lambda Suu Lambda = Svv.

#include <vector>

#include "bmot/linalg.hpp"

namespace bmot {

/// Covariance of a centered non-degenerate Gaussian Y = (U, V) in blocks.
/// Svu is always derived as Suv^T.
class CovarianceBlocks {
 public:
  /// Requires suu, svv symmetric (to 1e-12 relative; then symmetrized exactly)
  /// and the assembled 2m x 2m covariance positive-definite.
  CovarianceBlocks(Matrix suu, Matrix suv, Matrix svv);

  int m() const { return static_cast<int>(suu_.rows()); }
  const Matrix& suu() const { return suu_; }
  const Matrix& suv() const { return suv_; }
  const Matrix& svv() const { return svv_; }
  Matrix svu() const { return suv_.transpose(); }
  /// [[Suu, Suv], [Svu, Svv]].
  Matrix full() const;

 private:
  Matrix suu_, suv_, svv_;
};

struct RiccatiSolution {
  Matrix a;
  double residual_norm = 0.0;
  int iterations = 0;
  /// Lambda Suv is symmetric, in which case A = Lambda.
  bool symmetric_case = false;
  /// Residual after each accepted Newton step, starting with the initial guess.
  std::vector<double> residual_trace;
};

struct NewtonOptions {
  int max_iter = 100;
  int max_halvings = 30;
  /// Residual target; negative means 1e-10 * (1 + ||Svv||_F).
  double tol = -1.0;
};

/// Default residual tolerance 1e-10 * (1 + ||Svv||_F).
double nare_tolerance(const CovarianceBlocks& blocks);

/// Lambda = Suu^{-1/2} (Suu^{1/2} Svv Suu^{1/2})^{1/2} Suu^{-1/2}.
Matrix lambda_symmetric(const CovarianceBlocks& blocks);

/// ||A Suu A + A Suv - Svu A - Svv||_F.
double nare_residual(const Matrix& a, const CovarianceBlocks& blocks);

/// Solves H M + N H = C through the dense m^2 x m^2 Kronecker system.
/// Throws NumericalError when the system is numerically singular.
Matrix sylvester_solve(const Matrix& m, const Matrix& n, const Matrix& c);

/// Damped Newton iteration started from Lambda. If it fails, the iteration is
/// restarted from the invariant-subspace solution.
RiccatiSolution solve_nare(const CovarianceBlocks& blocks, const NewtonOptions& opts = {});

/// Damped Newton from an arbitrary starting point whose symmetric part is
/// positive-definite. Throws NumericalError on failure, listing the residual
/// trace.
RiccatiSolution solve_nare_newton(const CovarianceBlocks& blocks, const Matrix& start,
                                  const NewtonOptions& opts = {});

/// Direct solution from the m-dimensional invariant subspace of Sigma * S
/// belonging to its positive eigenvalues (S the standard matrix): with
/// [V1; V2] spanning that subspace, A = V2 V1^{-1}.
Matrix solve_nare_invariant_subspace(const CovarianceBlocks& blocks);

struct SymmetricCaseReport {
  bool symmetric = false;
  /// ||Lambda Suv - (Lambda Suv)^T||_F / ||Lambda Suv||_F (0 when Suv = 0).
  double asymmetry = 0.0;
  Matrix lambda;
  double distance_to_lambda = 0.0;
};

SymmetricCaseReport check_symmetric_case(const CovarianceBlocks& blocks, const Matrix& a,
                                         double tol_sym = 1e-10);

}  // namespace bmot
