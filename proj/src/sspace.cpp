#include "bmot/sspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bmot/errors.hpp"

namespace bmot {

ScalarProductMatrix::ScalarProductMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
    throw ValidationError("scalar product matrix must be square and nonempty");
  }
  if (entries_ != entries_.transpose()) {
    throw ValidationError("scalar product matrix must be exactly symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(entries_, Eigen::EigenvaluesOnly);
  const Vector& ev = es.eigenvalues();
  norm_ = ev.cwiseAbs().maxCoeff();
  const double tol = kEigRelTol * norm_;
  for (double lambda : ev) {
    if (std::abs(lambda) <= tol) {
      throw ValidationError("scalar product matrix is singular");
    }
    if (lambda > 0.0) ++index_;
  }
}

bool ScalarProductMatrix::is_standard() const {
  if (dim() % 2 != 0) return false;
  return entries_ == standard_matrix(dim() / 2).entries();
}

ScalarProductMatrix standard_matrix(int m) {
  if (m < 1) throw ValidationError("standard_matrix: m must be >= 1");
  Matrix s = Matrix::Zero(2 * m, 2 * m);
  s.topRightCorner(m, m).setIdentity();
  s.bottomLeftCorner(m, m).setIdentity();
  return ScalarProductMatrix(std::move(s));
}

double s_product(const ScalarProductMatrix& s, const ConstVecRef& x, const ConstVecRef& y) {
  if (x.size() != s.dim() || y.size() != s.dim()) {
    throw ValidationError("s_product: dimension mismatch (S is " + std::to_string(s.dim()) +
                          "-dimensional)");
  }
  return x.dot(s.entries() * y);
}

bool is_s_monotone(const ScalarProductMatrix& s, const Matrix& points, double tol) {
  if (points.rows() > 0 && points.cols() != s.dim()) {
    throw ValidationError("is_s_monotone: point dimension mismatch");
  }
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < points.rows(); ++j) {
      const Vector delta = (points.row(i) - points.row(j)).transpose();
      if (s_product(s, delta, delta) < -tol) return false;
    }
  }
  return true;
}

LinearMonotoneGraph::LinearMonotoneGraph(Matrix a) : a_(std::move(a)) {
  if (a_.rows() == 0 || a_.rows() != a_.cols()) {
    throw ValidationError("linear monotone graph: A must be square and nonempty");
  }
  if (!is_positive_definite(a_)) {
    throw ValidationError("linear monotone graph: A + A^T must be positive-definite");
  }
  sym_llt_.compute(a_ + a_.transpose());
  if (sym_llt_.info() != Eigen::Success) {
    throw ValidationError("linear monotone graph: Cholesky of A + A^T failed");
  }
}

Vector LinearMonotoneGraph::tangency_coordinate(const ConstVecRef& y) const {
  const int k = m();
  if (y.size() != 2 * k) throw ValidationError("linear graph: y must have dimension 2m");
  return sym_llt_.solve(a_.transpose() * y.head(k) + y.tail(k));
}

double fitzpatrick_linear(const LinearMonotoneGraph& g, const ConstVecRef& y) {
  const Vector r = g.tangency_coordinate(y);
  // psi = <r, (A + A^T) r> / 2 at the maximizer.
  return r.dot(g.a() * r);
}

Vector project_linear(const LinearMonotoneGraph& g, const ConstVecRef& y) {
  const Vector r = g.tangency_coordinate(y);
  Vector x(2 * g.m());
  x << r, g.a() * r;
  return x;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double adjacent_slope(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const double dr = b.x() - a.x();
  const double dv = b.y() - a.y();
  return dr == 0.0 ? kInf : dv / dr;
}

void check_slope(double s, const char* which) {
  if (std::isnan(s) || s < 0.0) {
    throw ValidationError(std::string("piecewise graph: ") + which +
                          " slope must lie in [0, +inf]");
  }
}

// Standard S in two dimensions: S(a, b) = a_r b_v + a_v b_r.
double s2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() + a.y() * b.x();
}

double supremand(const Eigen::Vector2d& x, const Eigen::Vector2d& y) {
  return s2(x, y) - 0.5 * s2(x, x);
}

}  // namespace

PiecewiseMonotoneGraph::PiecewiseMonotoneGraph(std::vector<Eigen::Vector2d> breakpoints,
                                               std::optional<double> left_slope,
                                               std::optional<double> right_slope)
    : points_(std::move(breakpoints)) {
  if (points_.empty()) throw ValidationError("piecewise graph: no breakpoints");
  for (const auto& p : points_) {
    if (!p.allFinite()) throw ValidationError("piecewise graph: non-finite breakpoint");
  }
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const Eigen::Vector2d d = points_[i] - points_[i - 1];
    if (d.x() < 0.0 || d.y() < 0.0 || (d.x() == 0.0 && d.y() == 0.0)) {
      throw ValidationError("piecewise graph: breakpoints must be distinct and nondecreasing "
                            "in both coordinates (violated at index " +
                            std::to_string(i) + ")");
    }
  }
  if (points_.size() == 1 && (!left_slope || !right_slope)) {
    throw ValidationError("piecewise graph: a single breakpoint needs both extension slopes");
  }
  left_slope_ = left_slope ? *left_slope : adjacent_slope(points_[0], points_[1]);
  right_slope_ = right_slope ? *right_slope
                             : adjacent_slope(points_[points_.size() - 2], points_.back());
  check_slope(left_slope_, "left");
  check_slope(right_slope_, "right");
}

Eigen::Vector2d PiecewiseMonotoneGraph::left_direction() const {
  return std::isinf(left_slope_) ? Eigen::Vector2d(0.0, -1.0)
                                 : Eigen::Vector2d(-1.0, -left_slope_);
}

Eigen::Vector2d PiecewiseMonotoneGraph::right_direction() const {
  return std::isinf(right_slope_) ? Eigen::Vector2d(0.0, 1.0)
                                  : Eigen::Vector2d(1.0, right_slope_);
}

PwlProjection project_pwl(const PiecewiseMonotoneGraph& g, const Eigen::Vector2d& y,
                          std::optional<double> tol) {
  const auto& pts = g.breakpoints();
  std::vector<Eigen::Vector2d> candidates(pts.begin(), pts.end());

  // Maximize phi(t) = base + lin t - quad t^2 / 2 along p + t q, t in [0, t_max].
  // quad = S(q, q) = 2 q_r q_v >= 0 for monotone directions.
  auto scan = [&](const Eigen::Vector2d& p, const Eigen::Vector2d& q, bool ray) -> bool {
    const double lin = s2(q, y) - s2(p, q);
    const double quad = s2(q, q);
    const double t_max = ray ? kInf : 1.0;
    if (quad <= 0.0) {
      return !(ray && lin > 0.0);
    }
    const double t = lin / quad;
    if (t > 0.0 && t < t_max) candidates.emplace_back(p + t * q);
    return true;
  };

  PwlProjection out;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    scan(pts[i - 1], pts[i] - pts[i - 1], false);
  }
  const bool left_ok = scan(pts.front(), g.left_direction(), true);
  const bool right_ok = scan(pts.back(), g.right_direction(), true);
  if (!left_ok || !right_ok) return out;

  double best = -kInf;
  std::vector<double> values;
  values.reserve(candidates.size());
  for (const auto& c : candidates) {
    values.push_back(supremand(c, y));
    best = std::max(best, values.back());
  }
  const double band = tol ? *tol : 1e-9 * (1.0 + std::abs(best));
  out.value = best;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (values[i] < best - band) continue;
    const auto& c = candidates[i];
    const bool duplicate = std::any_of(out.maximizers.begin(), out.maximizers.end(),
                                       [&](const Eigen::Vector2d& m) {
                                         return (m - c).norm() <= 1e-12 * (1.0 + c.norm());
                                       });
    if (!duplicate) out.maximizers.push_back(c);
  }
  return out;
}

std::optional<double> fitzpatrick_pwl(const PiecewiseMonotoneGraph& g, const Eigen::Vector2d& y) {
  return project_pwl(g, y).value;
}

}  // namespace bmot
