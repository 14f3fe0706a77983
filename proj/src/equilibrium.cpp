#include "bmot/equilibrium.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "bmot/errors.hpp"
#include "bmot/parallel.hpp"

namespace bmot {

Matrix GaussianEquilibrium::order_map() const {
  Matrix t(m(), 2 * m());
  t << rmap_u, rmap_v;
  return t;
}

Matrix GaussianEquilibrium::optimal_map() const {
  const Matrix t = order_map();
  Matrix out(2 * m(), 2 * m());
  out << t, a * t;
  return out;
}

GaussianEquilibrium equilibrium_for_pricing(const CovarianceBlocks& blocks, const Matrix& a) {
  if (a.rows() != blocks.m() || a.cols() != blocks.m()) {
    throw ValidationError("equilibrium: pricing matrix has wrong dimension");
  }
  if (!is_positive_definite(a)) throw ValidationError("equilibrium: A + A^T must be positive-definite");
  const Matrix sym_inv = (a + a.transpose()).llt().solve(Matrix::Identity(a.rows(), a.cols()));
  RiccatiSolution sol;
  sol.a = a;
  sol.residual_norm = nare_residual(a, blocks);
  return GaussianEquilibrium{blocks, std::move(sol), a, sym_inv * a.transpose(), sym_inv};
}

GaussianEquilibrium solve_gaussian(const CovarianceBlocks& blocks) {
  RiccatiSolution sol = solve_nare(blocks);
  GaussianEquilibrium eq = equilibrium_for_pricing(blocks, sol.a);
  eq.solution = std::move(sol);
  return eq;
}

PrimalDual primal_dual_values(const GaussianEquilibrium& eq) {
  const int m = eq.m();
  const Matrix sigma = eq.blocks.full();
  Matrix s = Matrix::Zero(2 * m, 2 * m);
  s.topRightCorner(m, m).setIdentity();
  s.bottomLeftCorner(m, m).setIdentity();
  const Matrix t = eq.optimal_map();
  const Matrix r = eq.order_map();
  const Matrix cov_r = r * sigma * r.transpose();
  PrimalDual pd;
  pd.primal = 0.5 * (s * sigma * t.transpose()).trace();
  pd.dual = 0.5 * ((eq.a + eq.a.transpose()) * cov_r).trace();
  return pd;
}

namespace {

std::mt19937_64 shard_rng(std::uint64_t seed, std::uint64_t shard) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(shard), static_cast<std::uint32_t>(shard >> 32)};
  return std::mt19937_64(seq);
}

// Rows are samples of Y = L z.
Matrix draw_shard(const Matrix& chol_l, std::int64_t count, std::uint64_t seed, std::uint64_t shard) {
  auto rng = shard_rng(seed, shard);
  std::normal_distribution<double> normal;
  const Eigen::Index d = chol_l.rows();
  Matrix z(d, count);
  for (std::int64_t j = 0; j < count; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) z(i, j) = normal(rng);
  }
  return (chol_l * z).transpose();
}

Matrix cholesky_factor(const CovarianceBlocks& blocks) {
  Eigen::LLT<Matrix> llt(blocks.full());
  if (llt.info() != Eigen::Success) throw ValidationError("simulate: covariance is not positive-definite");
  return llt.matrixL();
}

std::int64_t shard_count(std::int64_t n) { return (n + kShardSize - 1) / kShardSize; }

std::int64_t shard_rows(std::int64_t n, std::int64_t s) {
  return std::min(kShardSize, n - s * kShardSize);
}

// Sums for the sample covariance of a pair of vectors and the variance of
// each product entry.
struct CrossMoments {
  Vector sum_a, sum_b;
  Matrix sum_ab, sum_ab_sq;

  explicit CrossMoments(Eigen::Index m = 0)
      : sum_a(Vector::Zero(m)), sum_b(Vector::Zero(m)), sum_ab(Matrix::Zero(m, m)),
        sum_ab_sq(Matrix::Zero(m, m)) {}

  void add(const Vector& a, const Vector& b) {
    sum_a += a;
    sum_b += b;
    const Matrix prod = a * b.transpose();
    sum_ab += prod;
    sum_ab_sq += prod.cwiseProduct(prod);
  }
  void merge(const CrossMoments& o) {
    sum_a += o.sum_a;
    sum_b += o.sum_b;
    sum_ab += o.sum_ab;
    sum_ab_sq += o.sum_ab_sq;
  }
  // ||sample covariance||_F and sqrt(sum of squared entry standard errors).
  std::pair<double, double> gap(double n) const {
    const Matrix cov = (sum_ab - sum_a * sum_b.transpose() / n) / std::max(1.0, n - 1.0);
    const Matrix mean_prod = sum_ab / n;
    const Matrix var_prod = (sum_ab_sq / n - mean_prod.cwiseProduct(mean_prod)).cwiseMax(0.0);
    return {cov.norm(), std::sqrt(var_prod.sum() / n)};
  }
};

struct ScalarMoments {
  double sum = 0.0, sum_sq = 0.0;
  void add(double x) { sum += x; sum_sq += x * x; }
  void merge(const ScalarMoments& o) { sum += o.sum; sum_sq += o.sum_sq; }
  double mean(double n) const { return sum / n; }
  double se(double n) const {
    const double mu = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mu * mu) / std::max(1.0, n - 1.0));
    return std::sqrt(var / n);
  }
};

struct ShardMoments {
  CrossMoments efficiency, independence;
  ScalarMoments half_sxy, psi, martingale, profit;
};

}  // namespace

SampleSet draw_samples(const GaussianEquilibrium& eq, std::int64_t n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("draw_samples: n must be >= 1");
  const Matrix l = cholesky_factor(eq.blocks);
  const Matrix t = eq.optimal_map();
  const int d = 2 * eq.m();
  Matrix y(n, d);
  const auto shards = static_cast<std::size_t>(shard_count(n));
  parallel_for(shards, [&](std::size_t s) {
    const auto si = static_cast<std::int64_t>(s);
    y.middleRows(si * kShardSize, shard_rows(n, si)) = draw_shard(l, shard_rows(n, si), seed, s);
  });
  Matrix x = y * t.transpose();
  return SampleSet(std::move(x), std::move(y));
}

SimulationReport simulate(const GaussianEquilibrium& eq, std::int64_t n, std::uint64_t seed) {
  if (n < 2) throw ValidationError("simulate: n must be >= 2");
  const int m = eq.m();
  const Matrix l = cholesky_factor(eq.blocks);
  const Matrix& a = eq.a;
  const Matrix at = a.transpose();
  const Matrix r_map = eq.order_map();
  const Matrix sym = a + at;

  const auto shards = static_cast<std::size_t>(shard_count(n));
  std::vector<ShardMoments> parts(shards);
  parallel_for(shards, [&](std::size_t s) {
    const auto si = static_cast<std::int64_t>(s);
    const Matrix y = draw_shard(l, shard_rows(n, si), seed, s);
    ShardMoments acc{CrossMoments(m), CrossMoments(m), {}, {}, {}, {}};
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      const Vector yi = y.row(i).transpose();
      const Vector u = yi.head(m);
      const Vector v = yi.tail(m);
      const Vector r = r_map * yi;
      const Vector ar = a * r;
      acc.efficiency.add(v - ar, r);
      acc.independence.add(at * u + v, a * u - v);
      // Standard S: S((r, s), (u, v)) = <r, v> + <s, u>.
      const double sxy = r.dot(v) + ar.dot(u);
      acc.half_sxy.add(0.5 * sxy);
      acc.psi.add(0.5 * r.dot(sym * r));
      acc.martingale.add(sxy - 2.0 * r.dot(ar));
      acc.profit.add((r - u).dot(v - ar));
    }
    parts[s] = std::move(acc);
  });

  ShardMoments total{CrossMoments(m), CrossMoments(m), {}, {}, {}, {}};
  for (const auto& p : parts) {
    total.efficiency.merge(p.efficiency);
    total.independence.merge(p.independence);
    total.half_sxy.merge(p.half_sxy);
    total.psi.merge(p.psi);
    total.martingale.merge(p.martingale);
    total.profit.merge(p.profit);
  }

  const auto nd = static_cast<double>(n);
  SimulationReport rep;
  rep.n_samples = n;
  rep.seed = seed;
  std::tie(rep.efficiency_gap, rep.efficiency_se) = total.efficiency.gap(nd);
  std::tie(rep.independence_gap, rep.independence_se) = total.independence.gap(nd);
  rep.mean_profit = total.profit.mean(nd);
  rep.primal_mc = total.half_sxy.mean(nd);
  rep.primal_mc_se = total.half_sxy.se(nd);
  rep.dual_mc = total.psi.mean(nd);
  rep.dual_mc_se = total.psi.se(nd);
  rep.martingale_mc = total.martingale.mean(nd);
  rep.martingale_se = total.martingale.se(nd);
  const PrimalDual pd = primal_dual_values(eq);
  rep.primal_exact = pd.primal;
  rep.dual_exact = pd.dual;
  return rep;
}

double profit_check(const GaussianEquilibrium& eq, const SampleSet& samples, int n_perturb,
                    double radius, std::uint64_t seed) {
  const int m = eq.m();
  if (samples.dy() != 2 * m) throw ValidationError("profit_check: samples must carry Y = (U, V)");
  if (radius < 0.0) throw ValidationError("profit_check: radius must be nonnegative");
  const Matrix r_map = eq.order_map();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  double worst = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < samples.n(); ++i) {
    const Vector y = samples.y().row(i).transpose();
    const Vector u = y.head(m);
    const Vector v = y.tail(m);
    const Vector r = r_map * y;
    auto profit = [&](const Vector& q) { return (q - u).dot(v - eq.a * q); };
    const double base = profit(r);
    for (int k = 0; k < n_perturb; ++k) {
      Vector dir(m);
      for (int c = 0; c < m; ++c) dir(c) = normal(rng);
      const double len = radius * std::pow(unit(rng), 1.0 / m);
      const double norm = dir.norm();
      const Vector delta = norm > 0.0 ? Vector(dir * (len / norm)) : Vector(Vector::Zero(m));
      worst = std::max(worst, profit(r + delta) - base);
    }
  }
  return n_perturb > 0 ? worst : 0.0;
}

Matrix efficiency_regression(const SampleSet& samples, const GaussianEquilibrium& eq) {
  const int m = eq.m();
  if (samples.dx() < m || samples.dy() != 2 * m) {
    throw ValidationError("efficiency_regression: samples must carry X = (R, .) and Y = (U, V)");
  }
  if (samples.n() < m + 1) throw ValidationError("efficiency_regression: need n >= m + 1");
  const Matrix r = samples.x().leftCols(m);
  const Matrix v = samples.y().rightCols(m);
  const Matrix gram = r.transpose() * r;
  Eigen::LDLT<Matrix> ldlt(gram);
  const Vector diag = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || diag.minCoeff() <= 1e-12 * std::max(1.0, diag.maxCoeff())) {
    throw NumericalError("efficiency_regression: rank-deficient design");
  }
  // B R^T R = V^T R.
  return ldlt.solve(r.transpose() * v).transpose();
}

}  // namespace bmot
