#pragma once

// Backward martingale plans for finitely supported nu on a fixed x-grid:
// grid-restricted LP, partition lower bound, Fitzpatrick dual upper bound and
// projection certificates.

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "bmot/linalg.hpp"
#include "bmot/samples.hpp"
#include "bmot/sspace.hpp"

namespace bmot {

inline constexpr double kTolLp = 1e-9;

/// Finitely supported probability measure: rows of `points` with `weights`.
class DiscreteMeasure {
 public:
  /// Weights nonnegative summing to 1 within 1e-12; points pairwise distinct.
  DiscreteMeasure(Matrix points, Vector weights);

  Eigen::Index size() const { return points_.rows(); }
  Eigen::Index dim() const { return points_.cols(); }
  const Matrix& points() const { return points_; }
  const Vector& weights() const { return weights_; }
  Vector barycenter() const { return points_.transpose() * weights_; }

 private:
  Matrix points_;
  Vector weights_;
};

/// Coupling gamma (K x n) between grid rows x_k and support points y_j.
struct PlanMatrix {
  Matrix x_grid;
  Matrix gamma;
  /// (1/2) sum_kj gamma_kj S(x_k, y_j).
  double value = 0.0;
  /// Support of the second marginal, row j matching column j of gamma.
  Matrix y_points;
};

struct PlanResiduals {
  /// max_j |sum_k gamma_kj - w_j|.
  double marginal = 0.0;
  /// max_k |sum_j gamma_kj (y_j - x_k)|_inf.
  double barycenter = 0.0;
  double min_entry = 0.0;
};

PlanResiduals plan_residuals(const PlanMatrix& plan, const DiscreteMeasure& nu);

/// (1/2) sum_k m_k S(x_k, x_k) with row masses m_k; equals the plan value for
/// a martingale plan.
double barycentric_value(const PlanMatrix& plan, const ScalarProductMatrix& s);

/// Support points, pairwise midpoints and weighted k-means barycenters for
/// k = 1..n (k-means++ initialisation from `seed`). Exact duplicates removed.
Matrix default_grid(const DiscreteMeasure& nu, std::uint64_t seed = 0);

/// Weighted barycenters of every nonempty subset with positive mass
/// (2^n - 1 candidates; n <= 16).
Matrix subset_barycenter_grid(const DiscreteMeasure& nu);

/// Row-wise union with exact duplicates removed, first occurrence kept.
Matrix merge_grids(const Matrix& a, const Matrix& b);

/// Maximizes (1/2) sum gamma_kj S(x_k, y_j) over couplings with second
/// marginal nu and barycenter x_k in every row. Throws ValidationError if the
/// grid admits no such plan, NumericalError on solver failure or if the
/// solution violates a constraint by more than kTolLp.
PlanMatrix solve_plan_lp(const DiscreteMeasure& nu, const Matrix& x_grid, const ScalarProductMatrix& s);

struct PartitionResult {
  double value = 0.0;
  /// Block label of every support point in the best partition.
  std::vector<int> blocks;
  std::int64_t partitions = 0;
};

/// Exhaustive maximum over set partitions of (1/2) sum m_B S(xbar_B, xbar_B).
PartitionResult partition_oracle(const DiscreteMeasure& nu, const ScalarProductMatrix& s, int max_n = 10);

using MonotoneGraph = std::variant<LinearMonotoneGraph, PiecewiseMonotoneGraph>;

/// Ambient dimension 2m of the graph.
int graph_dim(const MonotoneGraph& g);

/// Fitzpatrick function of either graph kind; nullopt = +infinity.
std::optional<double> fitzpatrick(const MonotoneGraph& g, const ConstVecRef& y);

/// sum_j w_j psi_G(y_j); nullopt if psi_G is infinite at a weighted point.
std::optional<double> dual_value(const DiscreteMeasure& nu, const MonotoneGraph& g);

struct CertificateReport {
  /// max over checked pairs of psi(y) - S(x, y) + S(x, x)/2 (+inf if psi is).
  double max_gap = 0.0;
  Eigen::Index worst_x = -1;
  Eigen::Index worst_y = -1;
  Eigen::Index pairs_checked = 0;
  bool certified = false;
};

/// Pairs with gamma_kj > kTolLp are checked.
CertificateReport certify_optimality(const PlanMatrix& plan, const MonotoneGraph& g, double tol);
/// Every (X_i, Y_i) pair is checked.
CertificateReport certify_optimality(const SampleSet& samples, const MonotoneGraph& g, double tol);

enum class MapStatus { mapped, randomized, no_mass };

struct MapEntry {
  MapStatus status = MapStatus::no_mass;
  /// Grid row receiving the mass, when mapped.
  Eigen::Index row = -1;
  Vector target;
  /// Grid rows carrying mass of this point.
  std::vector<Eigen::Index> rows;
};

/// For each support point: the unique grid row holding its mass, or a
/// randomized flag when the mass is split between rows.
std::vector<MapEntry> conditional_map_from_plan(const PlanMatrix& plan);

}  // namespace bmot
