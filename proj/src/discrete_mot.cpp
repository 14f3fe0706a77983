#include "bmot/discrete_mot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "bmot/errors.hpp"
#include "bmot/simplex.hpp"

namespace bmot {

namespace {

bool rows_equal(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j) {
  return (a.row(i).array() == b.row(j).array()).all();
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(Matrix points, Vector weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.rows() == 0 || points_.cols() == 0) throw ValidationError("discrete measure: empty support");
  if (weights_.size() != points_.rows()) throw ValidationError("discrete measure: weights/points size mismatch");
  if (!points_.allFinite() || !weights_.allFinite()) throw ValidationError("discrete measure: non-finite input");
  if (weights_.minCoeff() < 0.0) throw ValidationError("discrete measure: negative weight");
  if (std::abs(weights_.sum() - 1.0) > 1e-12) throw ValidationError("discrete measure: weights must sum to 1");
  for (Eigen::Index i = 0; i < points_.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < points_.rows(); ++j) {
      if (rows_equal(points_, i, points_, j)) {
        throw ValidationError("discrete measure: duplicate support points " + std::to_string(i) + " and " +
                              std::to_string(j));
      }
    }
  }
}

PlanResiduals plan_residuals(const PlanMatrix& plan, const DiscreteMeasure& nu) {
  PlanResiduals r;
  const Vector col = plan.gamma.colwise().sum().transpose();
  r.marginal = (col - nu.weights()).cwiseAbs().maxCoeff();
  const Matrix& y = nu.points();
  for (Eigen::Index k = 0; k < plan.x_grid.rows(); ++k) {
    const Vector moment = y.transpose() * plan.gamma.row(k).transpose() -
                          plan.gamma.row(k).sum() * plan.x_grid.row(k).transpose();
    r.barycenter = std::max(r.barycenter, moment.cwiseAbs().maxCoeff());
  }
  r.min_entry = plan.gamma.minCoeff();
  return r;
}

double barycentric_value(const PlanMatrix& plan, const ScalarProductMatrix& s) {
  double v = 0.0;
  for (Eigen::Index k = 0; k < plan.x_grid.rows(); ++k) {
    const Vector x = plan.x_grid.row(k).transpose();
    v += plan.gamma.row(k).sum() * s_product(s, x, x);
  }
  return 0.5 * v;
}

Matrix merge_grids(const Matrix& a, const Matrix& b) {
  if (a.rows() > 0 && b.rows() > 0 && a.cols() != b.cols()) throw ValidationError("merge_grids: dimension mismatch");
  const Eigen::Index d = a.rows() > 0 ? a.cols() : b.cols();
  std::vector<Vector> rows;
  auto push = [&](const Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const Vector r = m.row(i).transpose();
      const bool dup = std::any_of(rows.begin(), rows.end(), [&](const Vector& o) { return (o.array() == r.array()).all(); });
      if (!dup) rows.push_back(r);
    }
  };
  push(a);
  push(b);
  Matrix out(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return out;
}

namespace {

// Weighted Lloyd iterations from a k-means++ start; returns cluster
// barycenters of clusters with positive mass.
std::vector<Vector> kmeans_barycenters(const DiscreteMeasure& nu, int k, std::mt19937_64& rng) {
  const Matrix& y = nu.points();
  const Vector& w = nu.weights();
  const Eigen::Index n = y.rows();
  std::vector<Vector> centers;
  std::vector<double> d2(static_cast<std::size_t>(n), 1.0);
  for (int c = 0; c < k; ++c) {
    std::vector<double> prob(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) prob[i] = w(i) * d2[i];
    double total = 0.0;
    for (double p : prob) total += p;
    if (total <= 0.0) break;
    std::discrete_distribution<Eigen::Index> pick(prob.begin(), prob.end());
    centers.emplace_back(y.row(pick(rng)).transpose());
    for (Eigen::Index i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& ctr : centers) best = std::min(best, (y.row(i).transpose() - ctr).squaredNorm());
      d2[i] = best;
    }
  }
  std::vector<int> label(static_cast<std::size_t>(n), 0);
  for (int it = 0; it < 100; ++it) {
    bool changed = it == 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best_c = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < centers.size(); ++c) {
        const double dist = (y.row(i).transpose() - centers[c]).squaredNorm();
        if (dist < best) { best = dist; best_c = static_cast<int>(c); }
      }
      if (label[i] != best_c) { label[i] = best_c; changed = true; }
    }
    if (!changed) break;
    for (std::size_t c = 0; c < centers.size(); ++c) {
      Vector sum = Vector::Zero(y.cols());
      double mass = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (label[i] == static_cast<int>(c)) { sum += w(i) * y.row(i).transpose(); mass += w(i); }
      }
      if (mass > 0.0) centers[c] = sum / mass;
    }
  }
  std::vector<Vector> out;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    Vector sum = Vector::Zero(y.cols());
    double mass = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (label[i] == static_cast<int>(c)) { sum += w(i) * y.row(i).transpose(); mass += w(i); }
    }
    if (mass > 0.0) out.emplace_back(sum / mass);
  }
  return out;
}

Matrix stack(const std::vector<Vector>& rows, Eigen::Index d) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return m;
}

}  // namespace

Matrix default_grid(const DiscreteMeasure& nu, std::uint64_t seed) {
  const Matrix& y = nu.points();
  const Eigen::Index n = y.rows();
  std::vector<Vector> rows;
  for (Eigen::Index i = 0; i < n; ++i) rows.emplace_back(y.row(i).transpose());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) rows.emplace_back(0.5 * (y.row(i) + y.row(j)).transpose());
  for (int k = 1; k <= n; ++k) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(k)};
    std::mt19937_64 rng(seq);
    for (auto& b : kmeans_barycenters(nu, k, rng)) rows.push_back(std::move(b));
  }
  return merge_grids(stack(rows, nu.dim()), Matrix(0, nu.dim()));
}

Matrix subset_barycenter_grid(const DiscreteMeasure& nu) {
  const Eigen::Index n = nu.size();
  if (n > 16) throw ValidationError("subset_barycenter_grid: support too large (n > 16)");
  std::vector<Vector> rows;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    Vector sum = Vector::Zero(nu.dim());
    double mass = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (mask & (1u << i)) { sum += nu.weights()(i) * nu.points().row(i).transpose(); mass += nu.weights()(i); }
    }
    if (mass > 0.0) rows.emplace_back(sum / mass);
  }
  return merge_grids(stack(rows, nu.dim()), Matrix(0, nu.dim()));
}

PlanMatrix solve_plan_lp(const DiscreteMeasure& nu, const Matrix& x_grid, const ScalarProductMatrix& s) {
  const Eigen::Index n = nu.size();
  const Eigen::Index d = nu.dim();
  const Eigen::Index k_rows = x_grid.rows();
  if (k_rows == 0) throw ValidationError("solve_plan_lp: empty grid");
  if (x_grid.cols() != d || s.dim() != d) throw ValidationError("solve_plan_lp: dimension mismatch");
  const Matrix& y = nu.points();

  // Variable (k, j) at column k * n + j.
  const Eigen::Index vars = k_rows * n;
  Matrix a = Matrix::Zero(n + k_rows * d, vars);
  Vector b = Vector::Zero(n + k_rows * d);
  Vector c(vars);
  for (Eigen::Index j = 0; j < n; ++j) b(j) = nu.weights()(j);
  for (Eigen::Index k = 0; k < k_rows; ++k) {
    const Vector xk = x_grid.row(k).transpose();
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::Index col = k * n + j;
      a(j, col) = 1.0;
      for (Eigen::Index i = 0; i < d; ++i) a(n + k * d + i, col) = y(j, i) - xk(i);
      c(col) = 0.5 * s_product(s, xk, y.row(j).transpose());
    }
  }

  const lp::Result res = lp::maximize(a, b, c);
  if (res.status == lp::Status::infeasible) {
    throw ValidationError("solve_plan_lp: grid admits no martingale plan (no grid point set can carry "
                          "nu as barycenters)");
  }
  if (res.status != lp::Status::optimal) {
    throw NumericalError(std::string("solve_plan_lp: simplex stopped: ") + lp::to_string(res.status));
  }

  PlanMatrix plan;
  plan.x_grid = x_grid;
  plan.y_points = y;
  plan.gamma = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      res.x.data(), k_rows, n);
  plan.gamma = plan.gamma.unaryExpr([](double g) { return g < 1e-14 ? 0.0 : g; });
  double v = 0.0;
  for (Eigen::Index k = 0; k < k_rows; ++k)
    for (Eigen::Index j = 0; j < n; ++j)
      if (plan.gamma(k, j) != 0.0) v += plan.gamma(k, j) * s_product(s, x_grid.row(k).transpose(), y.row(j).transpose());
  plan.value = 0.5 * v;

  const PlanResiduals r = plan_residuals(plan, nu);
  if (r.marginal > kTolLp || r.barycenter > kTolLp) {
    throw NumericalError("solve_plan_lp: solution violates constraints (marginal " + std::to_string(r.marginal) +
                         ", barycenter " + std::to_string(r.barycenter) + ")");
  }
  return plan;
}

PartitionResult partition_oracle(const DiscreteMeasure& nu, const ScalarProductMatrix& s, int max_n) {
  const Eigen::Index n = nu.size();
  if (n > max_n) {
    throw ValidationError("partition_oracle: support size " + std::to_string(n) + " exceeds max_n " +
                          std::to_string(max_n));
  }
  if (s.dim() != nu.dim()) throw ValidationError("partition_oracle: dimension mismatch");
  const Matrix& y = nu.points();
  const Vector& w = nu.weights();

  PartitionResult best;
  best.value = -std::numeric_limits<double>::infinity();
  std::vector<int> label(static_cast<std::size_t>(n), 0);
  std::vector<Vector> sums;  // weighted sums per block
  std::vector<double> mass;

  // Restricted growth strings: point i joins an existing block or opens one.
  auto recurse = [&](auto&& self, Eigen::Index i) -> void {
    if (i == n) {
      double v = 0.0;
      for (std::size_t bl = 0; bl < sums.size(); ++bl) {
        if (mass[bl] > 0.0) v += s_product(s, sums[bl], sums[bl]) / mass[bl];
      }
      v *= 0.5;
      ++best.partitions;
      if (v > best.value) {
        best.value = v;
        best.blocks = label;
      }
      return;
    }
    const Vector yi = w(i) * y.row(i).transpose();
    for (std::size_t bl = 0; bl <= sums.size(); ++bl) {
      const bool fresh = bl == sums.size();
      if (fresh) {
        sums.push_back(Vector::Zero(y.cols()));
        mass.push_back(0.0);
      }
      sums[bl] += yi;
      mass[bl] += w(i);
      label[i] = static_cast<int>(bl);
      self(self, i + 1);
      sums[bl] -= yi;
      mass[bl] -= w(i);
      if (fresh) {
        sums.pop_back();
        mass.pop_back();
        break;
      }
    }
  };
  recurse(recurse, 0);
  return best;
}

int graph_dim(const MonotoneGraph& g) {
  return std::visit([](const auto& gr) -> int {
    if constexpr (std::is_same_v<std::decay_t<decltype(gr)>, LinearMonotoneGraph>) return 2 * gr.m();
    else return 2;
  }, g);
}

std::optional<double> fitzpatrick(const MonotoneGraph& g, const ConstVecRef& y) {
  if (y.size() != graph_dim(g)) throw ValidationError("fitzpatrick: dimension mismatch");
  return std::visit([&](const auto& gr) -> std::optional<double> {
    if constexpr (std::is_same_v<std::decay_t<decltype(gr)>, LinearMonotoneGraph>) {
      return fitzpatrick_linear(gr, y);
    } else {
      return fitzpatrick_pwl(gr, Eigen::Vector2d(y(0), y(1)));
    }
  }, g);
}

std::optional<double> dual_value(const DiscreteMeasure& nu, const MonotoneGraph& g) {
  if (nu.dim() != graph_dim(g)) throw ValidationError("dual_value: dimension mismatch");
  double total = 0.0;
  for (Eigen::Index j = 0; j < nu.size(); ++j) {
    const double w = nu.weights()(j);
    if (w == 0.0) continue;
    const auto psi = fitzpatrick(g, nu.points().row(j).transpose());
    if (!psi) return std::nullopt;
    total += w * *psi;
  }
  return total;
}

namespace {

struct GapScanner {
  const MonotoneGraph& g;
  ScalarProductMatrix s;
  CertificateReport rep;

  explicit GapScanner(const MonotoneGraph& graph) : g(graph), s(standard_matrix(graph_dim(graph) / 2)) {
    rep.max_gap = -std::numeric_limits<double>::infinity();
  }

  void check(const Vector& x, const Vector& y, Eigen::Index ix, Eigen::Index iy) {
    const auto psi = fitzpatrick(g, y);
    const double gap = psi ? *psi - (s_product(s, x, y) - 0.5 * s_product(s, x, x))
                           : std::numeric_limits<double>::infinity();
    ++rep.pairs_checked;
    if (gap > rep.max_gap) {
      rep.max_gap = gap;
      rep.worst_x = ix;
      rep.worst_y = iy;
    }
  }

  CertificateReport finish(double tol) {
    if (rep.pairs_checked == 0) rep.max_gap = 0.0;
    rep.certified = rep.max_gap <= tol;
    return rep;
  }
};

}  // namespace

CertificateReport certify_optimality(const PlanMatrix& plan, const MonotoneGraph& g, double tol) {
  const int d = graph_dim(g);
  if (plan.x_grid.cols() != d || plan.y_points.cols() != d) throw ValidationError("certify_optimality: dimension mismatch");
  if (plan.gamma.rows() != plan.x_grid.rows() || plan.gamma.cols() != plan.y_points.rows()) {
    throw ValidationError("certify_optimality: gamma shape does not match grid and support");
  }
  GapScanner scan(g);
  for (Eigen::Index k = 0; k < plan.gamma.rows(); ++k)
    for (Eigen::Index j = 0; j < plan.gamma.cols(); ++j)
      if (plan.gamma(k, j) > kTolLp) scan.check(plan.x_grid.row(k).transpose(), plan.y_points.row(j).transpose(), k, j);
  return scan.finish(tol);
}

CertificateReport certify_optimality(const SampleSet& samples, const MonotoneGraph& g, double tol) {
  const int d = graph_dim(g);
  if (samples.dx() != d || samples.dy() != d) throw ValidationError("certify_optimality: dimension mismatch");
  GapScanner scan(g);
  for (Eigen::Index i = 0; i < samples.n(); ++i) scan.check(samples.x().row(i).transpose(), samples.y().row(i).transpose(), i, i);
  return scan.finish(tol);
}

std::vector<MapEntry> conditional_map_from_plan(const PlanMatrix& plan) {
  std::vector<MapEntry> out(static_cast<std::size_t>(plan.gamma.cols()));
  for (Eigen::Index j = 0; j < plan.gamma.cols(); ++j) {
    MapEntry& e = out[static_cast<std::size_t>(j)];
    for (Eigen::Index k = 0; k < plan.gamma.rows(); ++k)
      if (plan.gamma(k, j) > kTolLp) e.rows.push_back(k);
    if (e.rows.empty()) {
      e.status = MapStatus::no_mass;
    } else if (e.rows.size() == 1) {
      e.status = MapStatus::mapped;
      e.row = e.rows.front();
      e.target = plan.x_grid.row(e.row).transpose();
    } else {
      e.status = MapStatus::randomized;
    }
  }
  return out;
}

}  // namespace bmot
