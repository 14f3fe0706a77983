#pragma once

// Pseudo-Euclidean geometry: the bilinear form S(x, y) = <x, S y>,
// S-monotone sets, Fitzpatrick functions and S-projections.

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "bmot/linalg.hpp"

namespace bmot {

using ConstVecRef = Eigen::Ref<const Vector>;

/// Symmetric invertible d x d matrix with `index` positive eigenvalues.
class ScalarProductMatrix {
 public:
  /// Validates exact symmetry and invertibility; the index is read off the
  /// eigenvalue signs with threshold 1e-10 * max|eigenvalue|.
  explicit ScalarProductMatrix(Matrix entries);

  int dim() const { return static_cast<int>(entries_.rows()); }
  int index() const { return index_; }
  const Matrix& entries() const { return entries_; }
  /// Operator 2-norm, max |eigenvalue|.
  double norm() const { return norm_; }
  /// True when this is the standard matrix [[0, I], [I, 0]].
  bool is_standard() const;

 private:
  Matrix entries_;
  int index_ = 0;
  double norm_ = 0.0;
};

/// The 2m x 2m matrix with S(x, y) = sum_i x^i y^{m+i} + x^{m+i} y^i.
ScalarProductMatrix standard_matrix(int m);

double s_product(const ScalarProductMatrix& s, const ConstVecRef& x, const ConstVecRef& y);

/// True iff S(p - q, p - q) >= -tol for every pair of rows p, q of `points`.
bool is_s_monotone(const ScalarProductMatrix& s, const Matrix& points, double tol);

/// Graph {(r, A r)} of a linear map with A + A^T positive-definite. Under the
/// standard S this is a maximal strictly S-monotone subspace.
class LinearMonotoneGraph {
 public:
  explicit LinearMonotoneGraph(Matrix a);

  int m() const { return static_cast<int>(a_.rows()); }
  const Matrix& a() const { return a_; }
  /// r = (A + A^T)^{-1} (A^T u + v) for y = (u, v).
  Vector tangency_coordinate(const ConstVecRef& y) const;

 private:
  Matrix a_;
  Eigen::LLT<Matrix> sym_llt_;
};

/// psi(y) = sup_{x in G} S(x, y) - S(x, x) / 2 for the standard S.
double fitzpatrick_linear(const LinearMonotoneGraph& g, const ConstVecRef& y);

/// The unique S-projection (r, A r) of y onto G.
Vector project_linear(const LinearMonotoneGraph& g, const ConstVecRef& y);

/// Monotone polygonal curve in R^2 (m = 1, standard S), extended to infinity
/// at both ends by rays.
///
/// Consecutive breakpoints must be distinct with both coordinates
/// nondecreasing. Equal r-values encode a vertical jump. Extension slopes lie in
/// [0, +inf]; +inf is a vertical ray. When omitted, each end inherits the
/// slope of its adjacent segment.
class PiecewiseMonotoneGraph {
 public:
  PiecewiseMonotoneGraph(std::vector<Eigen::Vector2d> breakpoints,
                         std::optional<double> left_slope = std::nullopt,
                         std::optional<double> right_slope = std::nullopt);

  const std::vector<Eigen::Vector2d>& breakpoints() const { return points_; }
  double left_slope() const { return left_slope_; }
  double right_slope() const { return right_slope_; }

  /// Unit-free direction of the left ray (pointing away from the first
  /// breakpoint) and of the right ray.
  Eigen::Vector2d left_direction() const;
  Eigen::Vector2d right_direction() const;

 private:
  std::vector<Eigen::Vector2d> points_;
  double left_slope_ = 0.0;
  double right_slope_ = 0.0;
};

struct PwlProjection {
  /// Supremum value; empty when the supremum is +infinity.
  std::optional<double> value;
  /// All maximizers within the tie band. Empty iff unbounded.
  std::vector<Eigen::Vector2d> maximizers;

  bool bounded() const { return value.has_value(); }
  /// Multiple maximizers: y lies in the singular set of the projection.
  bool singular() const { return maximizers.size() > 1; }
};

/// Default tie band 1e-9 * (1 + |max value|).
PwlProjection project_pwl(const PiecewiseMonotoneGraph& g, const Eigen::Vector2d& y,
                          std::optional<double> tol = std::nullopt);

/// Fitzpatrick value; std::nullopt encodes +infinity.
std::optional<double> fitzpatrick_pwl(const PiecewiseMonotoneGraph& g, const Eigen::Vector2d& y);

}  // namespace bmot
