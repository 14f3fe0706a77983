#include "bmot/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "bmot/errors.hpp"

namespace bmot {

namespace {

void require_square(const Matrix& x, Eigen::Index m, const char* name) {
  if (x.rows() != m || x.cols() != m) {
    throw ValidationError(std::string("covariance blocks: ") + name + " must be " +
                          std::to_string(m) + "x" + std::to_string(m));
  }
  if (!x.allFinite()) throw ValidationError(std::string("covariance blocks: ") + name +
                                            " has non-finite entries");
}

void symmetrize_checked(Matrix& x, const char* name) {
  const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  if ((x - x.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ValidationError(std::string("covariance blocks: ") + name + " is not symmetric");
  }
  x = 0.5 * (x + x.transpose()).eval();
}

Matrix riccati_map(const Matrix& a, const CovarianceBlocks& b) {
  return a * b.suu() * a + a * b.suv() - b.suv().transpose() * a - b.svv();
}

std::string format_trace(const std::vector<double>& trace) {
  std::ostringstream os;
  os.precision(3);
  os << "[";
  for (std::size_t i = 0; i < trace.size(); ++i) os << (i ? ", " : "") << trace[i];
  os << "]";
  return os.str();
}

}  // namespace

CovarianceBlocks::CovarianceBlocks(Matrix suu, Matrix suv, Matrix svv)
    : suu_(std::move(suu)), suv_(std::move(suv)), svv_(std::move(svv)) {
  const Eigen::Index m = suu_.rows();
  if (m < 1) throw ValidationError("covariance blocks: m must be >= 1");
  require_square(suu_, m, "suu");
  require_square(suv_, m, "suv");
  require_square(svv_, m, "svv");
  symmetrize_checked(suu_, "suu");
  symmetrize_checked(svv_, "svv");
  if (!is_positive_definite(suu_)) throw ValidationError("covariance blocks: suu is not positive-definite");
  if (!is_positive_definite(svv_)) throw ValidationError("covariance blocks: svv is not positive-definite");
  if (!is_positive_definite(full())) {
    throw ValidationError("covariance blocks: joint covariance is not positive-definite");
  }
}

Matrix CovarianceBlocks::full() const {
  const Eigen::Index m = suu_.rows();
  Matrix f(2 * m, 2 * m);
  f << suu_, suv_, suv_.transpose(), svv_;
  return f;
}

double nare_tolerance(const CovarianceBlocks& blocks) {
  return 1e-10 * (1.0 + blocks.svv().norm());
}

Matrix lambda_symmetric(const CovarianceBlocks& blocks) {
  const Matrix half = spd_power(blocks.suu(), 0.5);
  const Matrix inv_half = spd_power(blocks.suu(), -0.5);
  Matrix inner = half * blocks.svv() * half;
  inner = 0.5 * (inner + inner.transpose()).eval();
  Matrix lambda = inv_half * spd_power(inner, 0.5) * inv_half;
  return 0.5 * (lambda + lambda.transpose());
}

double nare_residual(const Matrix& a, const CovarianceBlocks& blocks) {
  const Eigen::Index m = blocks.m();
  if (a.rows() != m || a.cols() != m) throw ValidationError("nare_residual: dimension mismatch");
  const Matrix& suu = blocks.suu();
  const Matrix& suv = blocks.suv();
  const Matrix& svv = blocks.svv();
  // Entry-wise evaluation, kept separate from the solver's matrix expressions.
  double sum_sq = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      double quad = 0.0;
      for (Eigen::Index k = 0; k < m; ++k) {
        double row = 0.0;
        for (Eigen::Index l = 0; l < m; ++l) row += suu(k, l) * a(l, j);
        quad += a(i, k) * row;
      }
      double cross = 0.0;
      for (Eigen::Index k = 0; k < m; ++k) {
        cross += a(i, k) * suv(k, j) - suv(k, i) * a(k, j);
      }
      const double e = quad + cross - svv(i, j);
      sum_sq += e * e;
    }
  }
  return std::sqrt(sum_sq);
}

Matrix sylvester_solve(const Matrix& m, const Matrix& n, const Matrix& c) {
  const Eigen::Index k = m.rows();
  if (m.cols() != k || n.rows() != k || n.cols() != k || c.rows() != k || c.cols() != k) {
    throw ValidationError("sylvester_solve: all operands must be square of equal size");
  }
  // vec(H M) = (M^T kron I) vec(H), vec(N H) = (I kron N) vec(H).
  const Eigen::Index kk = k * k;
  Matrix kron = Matrix::Zero(kk, kk);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index l = 0; l < k; ++l) {
      kron.block(j * k, l * k, k, k).diagonal().array() += m(l, j);
    }
    kron.block(j * k, j * k, k, k) += n;
  }
  Eigen::PartialPivLU<Matrix> lu(kron);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) {
    std::ostringstream os;
    os << "sylvester_solve: singular system (reciprocal condition estimate " << rcond << ")";
    throw NumericalError(os.str());
  }
  const Vector rhs = Eigen::Map<const Vector>(c.data(), kk);
  Vector h = lu.solve(rhs);
  // One step of iterative refinement.
  h += lu.solve(rhs - kron * h);
  Matrix out = Eigen::Map<Matrix>(h.data(), k, k);

  const double denom = c.norm() + (m.norm() + n.norm()) * out.norm();
  const double resid = (out * m + n * out - c).norm();
  if (denom > 0.0 && resid > 1e-12 * denom) {
    std::ostringstream os;
    os << "sylvester_solve: relative residual " << resid / denom
       << " exceeds 1e-12 (reciprocal condition estimate " << rcond << ")";
    throw NumericalError(os.str());
  }
  return out;
}

RiccatiSolution solve_nare_newton(const CovarianceBlocks& blocks, const Matrix& start,
                                  const NewtonOptions& opts) {
  const double tol = opts.tol >= 0.0 ? opts.tol : nare_tolerance(blocks);
  const Matrix& suu = blocks.suu();
  const Matrix& suv = blocks.suv();
  const Matrix svu = blocks.svu();

  if (!is_positive_definite(start)) {
    throw ValidationError("solve_nare: starting point must have a positive-definite symmetric part");
  }
  RiccatiSolution sol;
  sol.a = start;
  Matrix f = riccati_map(sol.a, blocks);
  double res = f.norm();
  sol.residual_trace.push_back(res);

  int polish = 0;
  for (int it = 0; it < opts.max_iter; ++it) {
    if (res <= tol) {
      // A couple of extra steps drive the residual to rounding level.
      if (polish++ >= 2) break;
    }
    Matrix h;
    try {
      h = sylvester_solve(suu * sol.a + suv, sol.a * suu - svu, -f);
    } catch (const NumericalError&) {
      if (res <= tol) break;
      throw;
    }
    bool accepted = false;
    double step = 1.0;
    for (int k = 0; k <= opts.max_halvings; ++k, step *= 0.5) {
      Matrix trial = sol.a + step * h;
      if (!is_positive_definite(trial)) continue;
      Matrix f_trial = riccati_map(trial, blocks);
      const double r_trial = f_trial.norm();
      if (r_trial < res) {
        sol.a = std::move(trial);
        f = std::move(f_trial);
        res = r_trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (res <= tol) break;
      throw NumericalError("solve_nare: no damped step decreased the residual while keeping "
                           "A + A^T positive-definite; residual trace " +
                           format_trace(sol.residual_trace));
    }
    ++sol.iterations;
    sol.residual_trace.push_back(res);
  }
  if (!(res <= tol)) {
    throw NumericalError("solve_nare: no convergence in " + std::to_string(opts.max_iter) +
                         " iterations; residual trace " + format_trace(sol.residual_trace));
  }
  sol.residual_norm = res;
  sol.symmetric_case = check_symmetric_case(blocks, sol.a).symmetric;
  return sol;
}

Matrix solve_nare_invariant_subspace(const CovarianceBlocks& blocks) {
  const Eigen::Index m = blocks.m();
  const Matrix sigma = blocks.full();
  const Matrix half = spd_power(sigma, 0.5);
  Matrix s = Matrix::Zero(2 * m, 2 * m);
  s.topRightCorner(m, m).setIdentity();
  s.bottomLeftCorner(m, m).setIdentity();
  // Sigma S is similar to the symmetric Sigma^{1/2} S Sigma^{1/2}, which has
  // exactly m positive eigenvalues; eigenvectors map back through Sigma^{1/2}.
  Matrix k = half * s * half;
  k = 0.5 * (k + k.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(k);
  if (es.info() != Eigen::Success) throw NumericalError("invariant subspace: eigensolver failed");
  // Eigenvalues ascend; the last m are the positive ones.
  const Matrix basis = half * es.eigenvectors().rightCols(m);
  const Matrix v1 = basis.topRows(m);
  const Matrix v2 = basis.bottomRows(m);
  Eigen::FullPivLU<Matrix> lu(v1);
  if (!lu.isInvertible()) throw NumericalError("invariant subspace: basis is not a graph over U");
  return v2 * lu.inverse();
}

RiccatiSolution solve_nare(const CovarianceBlocks& blocks, const NewtonOptions& opts) {
  try {
    return solve_nare_newton(blocks, lambda_symmetric(blocks), opts);
  } catch (const NumericalError& first) {
    Matrix start;
    try {
      start = solve_nare_invariant_subspace(blocks);
    } catch (const NumericalError&) {
      throw first;
    }
    if (!is_positive_definite(start)) throw first;
    return solve_nare_newton(blocks, start, opts);
  }
}

SymmetricCaseReport check_symmetric_case(const CovarianceBlocks& blocks, const Matrix& a,
                                         double tol_sym) {
  SymmetricCaseReport rep;
  rep.lambda = lambda_symmetric(blocks);
  const Matrix prod = rep.lambda * blocks.suv();
  const double scale = prod.norm();
  rep.asymmetry = scale > 0.0 ? (prod - prod.transpose()).norm() / scale : 0.0;
  rep.symmetric = rep.asymmetry <= tol_sym;
  rep.distance_to_lambda = (a - rep.lambda).norm();
  return rep;
}

}  // namespace bmot
