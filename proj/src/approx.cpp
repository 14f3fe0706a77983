#include "bmot/approx.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bmot/errors.hpp"

namespace bmot {

namespace {

bool row_less(const Matrix& m, Eigen::Index a, Eigen::Index b) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    if (m(a, c) != m(b, c)) return m(a, c) < m(b, c);
  }
  return false;
}

bool rows_equal(const Matrix& m, Eigen::Index a, const Matrix& w, Eigen::Index b) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    if (m(a, c) != w(b, c)) return false;
  }
  return true;
}

// Runs of equal rows of m, in lexicographic order.
std::vector<std::vector<Eigen::Index>> equal_row_groups(const Matrix& m) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return row_less(m, a, b); });
  std::vector<std::vector<Eigen::Index>> groups;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k == 0 || !rows_equal(m, order[k - 1], m, order[k])) groups.emplace_back();
    groups.back().push_back(order[k]);
  }
  return groups;
}

}  // namespace

Matrix Rearrangement::z(const SampleSet& s) const {
  Matrix out(s.n(), s.dy());
  for (Eigen::Index i = 0; i < s.n(); ++i) out.row(i) = s.y().row(perm[static_cast<std::size_t>(i)]);
  return out;
}

Rearrangement uniform_approximation(const SampleSet& samples, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ValidationError("epsilon must be positive and finite");
  const Matrix& x = samples.x();
  const Matrix& y = samples.y();
  const Eigen::Index n = samples.n();

  Rearrangement r;
  r.epsilon = epsilon;
  r.perm.assign(static_cast<std::size_t>(n), 0);
  std::vector<char> covered(static_cast<std::size_t>(n), 0);
  const double radius = epsilon / 2.0;

  for (Eigen::Index c = 0; c < n; ++c) {
    if (covered[c]) continue;
    std::vector<Eigen::Index> cell;
    for (Eigen::Index j = c; j < n; ++j) {
      if (!covered[j] && (y.row(j) - y.row(c)).norm() <= radius) {
        covered[j] = 1;
        cell.push_back(j);
      }
    }
    std::vector<Eigen::Index> by_x = cell, by_y = cell;
    // cell is in index order, so a stable sort on X breaks ties by index
    std::stable_sort(by_x.begin(), by_x.end(), [&](Eigen::Index a, Eigen::Index b) { return row_less(x, a, b); });
    std::sort(by_y.begin(), by_y.end(), [&](Eigen::Index a, Eigen::Index b) { return row_less(y, a, b); });
    for (std::size_t k = 0; k < cell.size(); ++k) r.perm[by_x[k]] = by_y[k];
    r.cells.push_back(std::move(cell));
  }
  return r;
}

RearrangementReport verify_rearrangement(const SampleSet& samples, const Rearrangement& r) {
  RearrangementReport rep;
  const Eigen::Index n = samples.n();
  const Matrix& y = samples.y();
  if (static_cast<Eigen::Index>(r.perm.size()) != n) {
    rep.permutation = rep.multiset_equal = false;
    return rep;
  }
  std::vector<char> hit(static_cast<std::size_t>(n), 0);
  for (Eigen::Index p : r.perm) {
    if (p < 0 || p >= n || hit[p]) {
      rep.permutation = false;
      return rep;
    }
    hit[p] = 1;
  }
  const Matrix z = r.z(samples);

  // Multiset equality by sorting both row sets and comparing bitwise.
  std::vector<Eigen::Index> oy(static_cast<std::size_t>(n)), oz(static_cast<std::size_t>(n));
  std::iota(oy.begin(), oy.end(), Eigen::Index{0});
  std::iota(oz.begin(), oz.end(), Eigen::Index{0});
  std::sort(oy.begin(), oy.end(), [&](Eigen::Index a, Eigen::Index b) { return row_less(y, a, b); });
  std::sort(oz.begin(), oz.end(), [&](Eigen::Index a, Eigen::Index b) { return row_less(z, a, b); });
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!rows_equal(z, oz[k], y, oy[k])) {
      rep.multiset_equal = false;
      rep.multiset_offenders.push_back(oz[k]);
    }
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = (z.row(i) - y.row(i)).norm();
    rep.max_displacement = std::max(rep.max_displacement, d);
    if (d > r.epsilon) rep.displacement_offenders.push_back(i);
  }
  rep.displacement_ok = rep.displacement_offenders.empty();

  for (const auto& g : equal_row_groups(z)) {
    for (std::size_t k = 1; k < g.size(); ++k) {
      if (!rows_equal(samples.x(), g[0], samples.x(), g[k])) rep.dependence_offenders.emplace_back(g[0], g[k]);
    }
  }
  rep.functional = rep.dependence_offenders.empty();
  return rep;
}

MapFromPlan map_from_plan(const SampleSet& samples, double epsilon, const ScalarProductMatrix& s) {
  const Matrix& x = samples.x();
  const Matrix& y = samples.y();
  if (x.cols() != y.cols() || s.dim() != y.cols()) throw ValidationError("map_from_plan: dimension mismatch");
  const Eigen::Index n = samples.n();

  MapFromPlan out;
  out.rearrangement = uniform_approximation(samples, epsilon);
  const Matrix z = out.rearrangement.z(samples);

  // V = empirical E[Z | X] and the martingale residual |E[Y | X] - X|.
  Matrix v(n, y.cols());
  for (const auto& g : equal_row_groups(x)) {
    Vector zbar = Vector::Zero(y.cols()), ybar = Vector::Zero(y.cols());
    for (Eigen::Index i : g) {
      zbar += z.row(i).transpose();
      ybar += y.row(i).transpose();
    }
    zbar /= static_cast<double>(g.size());
    ybar /= static_cast<double>(g.size());
    out.martingale_residual = std::max(out.martingale_residual, (ybar - x.row(g[0]).transpose()).norm());
    for (Eigen::Index i : g) v.row(i) = zbar.transpose();
  }
  const double ymax = y.rowwise().norm().maxCoeff();
  out.martingale_warning = out.martingale_residual > kMartingaleWarnTol * (1.0 + ymax);

  // Y_i = Z_k for k = perm^{-1}(i), so U_i = f(Y_i) = V_k.
  out.u.resize(n, y.cols());
  for (Eigen::Index k = 0; k < n; ++k) out.u.row(out.rearrangement.perm[k]) = v.row(k);

  double plan = 0.0, map = 0.0, ynorm = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    plan += 0.5 * s_product(s, x.row(i).transpose(), y.row(i).transpose());
    map += 0.5 * s_product(s, out.u.row(i).transpose(), y.row(i).transpose());
    ynorm += y.row(i).norm();
  }
  const double nn = static_cast<double>(n);
  out.value_gap = std::abs(plan / nn - map / nn);
  out.bound = epsilon * s.norm() * (2.0 * ynorm / nn + epsilon) / 2.0;
  return out;
}

}  // namespace bmot
