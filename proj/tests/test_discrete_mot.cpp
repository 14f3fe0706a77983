#include <cmath>

#include "bmot/discrete_mot.hpp"
#include "bmot/equilibrium.hpp"
#include "bmot/errors.hpp"
#include "bmot/generators.hpp"
#include "doctest.h"

using namespace bmot;
using Eigen::Vector2d;

namespace {

DiscreteMeasure two_point() {
  Matrix p(2, 2);
  p << 1, 0, 0, 1;
  return DiscreteMeasure(p, Vector::Constant(2, 0.5));
}

Matrix row(double a, double b) {
  Matrix m(1, 2);
  m << a, b;
  return m;
}

MonotoneGraph scalar_graph(double a) { return LinearMonotoneGraph(Matrix::Constant(1, 1, a)); }

}  // namespace

TEST_CASE("DiscreteMeasure validation") {
  Matrix p(2, 2);
  p << 1, 0, 1, 0;
  CHECK_THROWS_AS(DiscreteMeasure(p, Vector::Constant(2, 0.5)), ValidationError);
  CHECK_THROWS_AS(DiscreteMeasure(row(0, 0), Vector::Constant(1, 0.9)), ValidationError);
  Vector w(2);
  w << 1.5, -0.5;
  CHECK_THROWS_AS(DiscreteMeasure(two_point().points(), w), ValidationError);
  CHECK(two_point().barycenter().isApprox(Vector2d(0.5, 0.5)));
}

TEST_CASE("solve_plan_lp worked examples") {
  const auto s = standard_matrix(1);
  // Single atom: the martingale constraint forces X = Y.
  const DiscreteMeasure one(row(1.5, 2.0), Vector::Ones(1));
  const auto p1 = solve_plan_lp(one, merge_grids(row(1.5, 2.0), row(0, 0)), s);
  CHECK(p1.gamma(0, 0) == doctest::Approx(1.0));
  CHECK(p1.value == doctest::Approx(0.5 * 2 * 1.5 * 2.0));

  const auto nu = two_point();
  // (1/2) S((1/2, 1/2), (1/2, 1/2)) = (1/2) * 2 * 1/4.
  const auto pooled = solve_plan_lp(nu, row(0.5, 0.5), s);
  CHECK(std::abs(pooled.value - 0.25) <= 1e-12);
  CHECK(partition_oracle(nu, s).value == doctest::Approx(0.25));

  const auto identity = solve_plan_lp(nu, nu.points(), s);
  CHECK(std::abs(identity.value) <= 1e-12);

  const auto full = solve_plan_lp(nu, default_grid(nu), s);
  CHECK(std::abs(full.value - 0.25) <= 1e-10);
}

TEST_CASE("solve_plan_lp rejects grids without a martingale plan") {
  const auto s = standard_matrix(1);
  CHECK_THROWS_AS(solve_plan_lp(two_point(), row(3, 3), s), ValidationError);
  CHECK_THROWS_AS(solve_plan_lp(two_point(), Matrix(0, 2), s), ValidationError);
  CHECK_THROWS_AS(solve_plan_lp(two_point(), Matrix::Zero(1, 3), s), ValidationError);
}

TEST_CASE("partition_oracle") {
  const auto s = standard_matrix(1);
  auto r = partition_oracle(two_point(), s);
  CHECK(r.partitions == 2);
  CHECK(r.blocks[0] == r.blocks[1]);

  // Support on the S-isotropic line v = 0: every block has S(xbar, xbar) = 0.
  Matrix line(4, 2);
  line << -1, 0, 0.5, 0, 2, 0, 3, 0;
  const DiscreteMeasure iso(line, Vector::Constant(4, 0.25));
  r = partition_oracle(iso, s);
  CHECK(r.value == 0.0);
  CHECK(r.partitions == 15);  // Bell(4)

  CHECK(partition_oracle(DiscreteMeasure(row(1, 3), Vector::Ones(1)), s).value == doctest::Approx(3.0));
  gen::Rng rng(1);
  CHECK_THROWS_AS(partition_oracle(gen::discrete_measure(6, 2, rng), s, 5), ValidationError);
}

TEST_CASE("dual_value") {
  // psi(u, v) = (u + v)^2 / 4 for A = 1.
  const auto nu = two_point();
  CHECK(*dual_value(nu, scalar_graph(1.0)) == doctest::Approx(0.25));

  // Support on the graph: dual = E[S(Y, Y)] / 2.
  Matrix on(3, 2);
  on << -1, -2, 0.5, 1, 2, 4;
  const DiscreteMeasure nu_on(on, Vector::Constant(3, 1.0 / 3.0));
  const auto s = standard_matrix(1);
  double half_sq = 0.0;
  for (int j = 0; j < 3; ++j) half_sq += 0.5 * s_product(s, on.row(j).transpose(), on.row(j).transpose()) / 3.0;
  CHECK(*dual_value(nu_on, scalar_graph(2.0)) == doctest::Approx(half_sq).epsilon(1e-12));

  const double primal = solve_plan_lp(nu, default_grid(nu), s).value;
  for (double a : {10.0, 100.0, 1e4}) CHECK(*dual_value(nu, scalar_graph(a)) >= primal);
  CHECK(*dual_value(nu, scalar_graph(100.0)) > 10.0);

  // Piecewise graph with a horizontal right ray: psi = +inf above it.
  const MonotoneGraph flat = PiecewiseMonotoneGraph({Vector2d(0, 0)}, 1.0, 0.0);
  CHECK_FALSE(dual_value(nu, flat).has_value());
  CHECK_THROWS_AS(dual_value(nu, MonotoneGraph(LinearMonotoneGraph(Matrix::Identity(2, 2)))), ValidationError);
}

TEST_CASE("certify_optimality") {
  const auto nu = two_point();
  const auto s = standard_matrix(1);
  const auto pooled = solve_plan_lp(nu, row(0.5, 0.5), s);
  auto rep = certify_optimality(pooled, scalar_graph(1.0), 1e-12);
  CHECK(rep.certified);
  CHECK(std::abs(rep.max_gap) <= 1e-15);
  CHECK(rep.pairs_checked == 2);

  // Identity plan on the support: psi(1, 0) = 1/4 but S(y, y) = 0.
  const auto ident = solve_plan_lp(nu, nu.points(), s);
  rep = certify_optimality(ident, scalar_graph(1.0), 1e-9);
  CHECK_FALSE(rep.certified);
  CHECK(rep.max_gap == doctest::Approx(0.25));

  gen::Rng rng(3);
  const auto eq = solve_gaussian(gen::covariance_blocks(2, rng));
  const auto samples = draw_samples(eq, 5000, 8);
  rep = certify_optimality(samples, MonotoneGraph(LinearMonotoneGraph(eq.a)), 1e-10);
  CHECK(rep.certified);
  CHECK(rep.max_gap <= 1e-10);
  CHECK(rep.pairs_checked == 5000);

  // Piecewise graph equal to the identity line certifies the pooled plan too.
  const MonotoneGraph diag = PiecewiseMonotoneGraph({Vector2d(0, 0), Vector2d(1, 1)});
  CHECK(certify_optimality(pooled, diag, 1e-12).certified);
}

TEST_CASE("conditional_map_from_plan") {
  const auto nu = two_point();
  const auto s = standard_matrix(1);
  auto map = conditional_map_from_plan(solve_plan_lp(nu, row(0.5, 0.5), s));
  for (const auto& e : map) {
    CHECK(e.status == MapStatus::mapped);
    CHECK(e.target.isApprox(Vector2d(0.5, 0.5)));
  }

  map = conditional_map_from_plan(solve_plan_lp(nu, nu.points(), s));
  CHECK(map[0].target.isApprox(Vector2d(1, 0)));
  CHECK(map[1].target.isApprox(Vector2d(0, 1)));

  // Half of y_0 pooled with y_1, half left in place.
  PlanMatrix split;
  split.x_grid = Matrix(2, 2);
  split.x_grid << 1, 0, 0.25, 0.75;
  split.y_points = nu.points();
  split.gamma = Matrix(2, 2);
  split.gamma << 0.25, 0, 0.25, 0.5;
  const auto r = plan_residuals(split, DiscreteMeasure(nu.points(), Vector::Constant(2, 0.5)));
  CHECK(r.marginal <= 1e-15);
  map = conditional_map_from_plan(split);
  CHECK(map[0].status == MapStatus::randomized);
  CHECK(map[0].rows.size() == 2);
  CHECK(map[1].status == MapStatus::mapped);
}

TEST_CASE("grids") {
  const auto nu = two_point();
  const Matrix g = default_grid(nu);
  CHECK(g.rows() == 3);  // two points, one midpoint = barycenter
  gen::Rng rng(12);
  const auto nu5 = gen::discrete_measure(5, 2, rng);
  CHECK(subset_barycenter_grid(nu5).rows() == 31);
  CHECK(default_grid(nu5, 3) == default_grid(nu5, 3));
  CHECK(merge_grids(g, g).rows() == g.rows());
}

TEST_CASE("random instances: duality, dominance, refinement, feasibility") {
  gen::Rng rng(2718);
  const auto s = standard_matrix(1);
  for (int t = 0; t < 12; ++t) {
    const int n = 3 + t % 4;
    const auto nu = gen::discrete_measure(n, 2, rng);
    const Matrix small = default_grid(nu, static_cast<std::uint64_t>(t));
    const Matrix big = merge_grids(small, subset_barycenter_grid(nu));
    const auto p_small = solve_plan_lp(nu, small, s);
    const auto p_big = solve_plan_lp(nu, big, s);

    CHECK(p_big.value >= p_small.value - 1e-12);
    CHECK(p_big.value >= partition_oracle(nu, s).value - 1e-9);

    for (const auto* p : {&p_small, &p_big}) {
      const auto r = plan_residuals(*p, nu);
      CHECK(r.marginal <= kTolLp);
      CHECK(r.barycenter <= kTolLp);
      CHECK(r.min_entry >= 0.0);
      CHECK(std::abs(p->value - barycentric_value(*p, s)) <= 1e-10);
    }
    for (int k = 0; k < 5; ++k) {
      const double a = std::exp(gen::uniform(rng, -2.0, 2.0));
      CHECK(p_big.value <= *dual_value(nu, scalar_graph(a)) + 1e-9);
    }
  }
}
