#include <cmath>
#include <cstdlib>

#include "bmot/equilibrium.hpp"
#include "bmot/errors.hpp"
#include "bmot/generators.hpp"
#include "bmot/sspace.hpp"
#include "doctest.h"

using namespace bmot;

namespace {

CovarianceBlocks identity_blocks(int m) {
  const Matrix i = Matrix::Identity(m, m);
  return CovarianceBlocks(i, Matrix::Zero(m, m), i);
}

CovarianceBlocks scalar_blocks(double su, double sv, double rho) {
  return CovarianceBlocks(Matrix::Constant(1, 1, su * su), Matrix::Constant(1, 1, rho * su * sv),
                          Matrix::Constant(1, 1, sv * sv));
}

// Blocks whose Lambda * Suv is symmetric: Suv = Lambda^{-1} K with K symmetric.
CovarianceBlocks symmetric_case_blocks(gen::Rng& rng, int m) {
  const Matrix suu = gen::spd_matrix(m, rng, 0.5);
  const Matrix svv = gen::spd_matrix(m, rng, 0.5);
  const Matrix lambda = lambda_symmetric(CovarianceBlocks(suu, Matrix::Zero(m, m), svv));
  Matrix k = gen::normal_matrix(m, m, rng);
  k = 0.5 * (k + k.transpose()).eval();
  for (double scale = 0.3;; scale *= 0.5) {
    try {
      return CovarianceBlocks(suu, lambda.inverse() * (scale * k), svv);
    } catch (const ValidationError&) {
    }
  }
}

}  // namespace

TEST_CASE("solve_gaussian maps") {
  const auto eq = solve_gaussian(identity_blocks(2));
  CHECK(eq.a.isApprox(Matrix::Identity(2, 2), 1e-12));
  CHECK(eq.rmap_u.isApprox(0.5 * Matrix::Identity(2, 2), 1e-12));
  CHECK(eq.rmap_v.isApprox(0.5 * Matrix::Identity(2, 2), 1e-12));

  // a = 3, rmap_u = a / (2a), rmap_v = 1 / (2a).
  const auto sc = solve_gaussian(scalar_blocks(2, 6, 0.0));
  CHECK(sc.a(0, 0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(sc.rmap_u(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(sc.rmap_v(0, 0) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

  gen::Rng rng(17);
  for (int t = 0; t < 10; ++t) {
    const int m = 1 + t % 3;
    const auto b = symmetric_case_blocks(rng, m);
    const auto e = solve_gaussian(b);
    const Matrix lambda = lambda_symmetric(b);
    CHECK((e.rmap_u - 0.5 * Matrix::Identity(m, m)).norm() <= 1e-9);
    CHECK((e.rmap_v - 0.5 * lambda.inverse()).norm() <= 1e-9);
  }
}

TEST_CASE("primal_dual_values") {
  auto pd = primal_dual_values(solve_gaussian(identity_blocks(1)));
  CHECK(pd.primal == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(pd.dual == doctest::Approx(0.5).epsilon(1e-14));
  // Var(U/2 + V/6) = 4/4 + 36/36 = 2, primal = 3 * 2.
  pd = primal_dual_values(solve_gaussian(scalar_blocks(2, 6, 0.0)));
  CHECK(pd.primal == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(pd.dual == doctest::Approx(6.0).epsilon(1e-14));
  CHECK_THROWS_AS(CovarianceBlocks(Matrix::Identity(1, 1), Matrix::Zero(1, 1), Matrix::Zero(1, 1)),
                  ValidationError);

  gen::Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const auto eq = solve_gaussian(gen::covariance_blocks(1 + t % 5, rng));
    const auto v = primal_dual_values(eq);
    CHECK(std::abs(v.primal - v.dual) <= 1e-12 * std::abs(v.dual));
  }

  // The value identity holds for any projection onto a linear graph; what
  // singles out the Riccati solution is Cov(Y - X, X) = (I - T) Sigma T^T = 0.
  const auto b = gen::covariance_blocks(2, rng);
  const auto good = solve_gaussian(b);
  const auto wrong = equilibrium_for_pricing(b, 2.0 * good.a);
  auto martingale_defect = [&](const GaussianEquilibrium& e) {
    const Matrix t = e.optimal_map();
    return ((Matrix::Identity(4, 4) - t) * b.full() * t.transpose()).norm();
  };
  CHECK(martingale_defect(good) <= 1e-12);
  CHECK(martingale_defect(wrong) > 1e-3);
  const auto w = primal_dual_values(wrong);
  CHECK(std::abs(w.primal - w.dual) <= 1e-12 * std::abs(w.dual));
}

TEST_CASE("simulate identity case at n = 1e5") {
  const auto eq = solve_gaussian(identity_blocks(1));
  const auto rep = simulate(eq, 100000, 42);
  CHECK(rep.n_samples == 100000);
  CHECK(rep.efficiency_gap <= 0.05);
  CHECK(rep.independence_gap <= 0.05);
  CHECK(rep.efficiency_gap <= 5.0 * rep.efficiency_se);
  CHECK(rep.independence_gap <= 5.0 * rep.independence_se);
  CHECK(std::abs(rep.primal_mc - rep.primal_exact) <= 5.0 * rep.primal_mc_se);
  CHECK(std::abs(rep.dual_mc - rep.dual_exact) <= 5.0 * rep.dual_mc_se);
  // S(X, Y - X) vanishes sample by sample for a linear projection.
  CHECK(std::abs(rep.martingale_mc) <= 5.0 * rep.martingale_se + 1e-12);
  CHECK(rep.primal_exact == doctest::Approx(0.5));
}

TEST_CASE("simulate smoke and determinism") {
  const auto eq = solve_gaussian(scalar_blocks(1.3, 0.4, -0.2));
  const auto tiny = simulate(eq, 2, 1);
  CHECK(std::isfinite(tiny.efficiency_gap));
  CHECK(std::isfinite(tiny.independence_gap));
  CHECK_THROWS_AS(simulate(eq, 1, 1), ValidationError);

  gen::Rng rng(8);
  const auto eq2 = solve_gaussian(gen::covariance_blocks(3, rng));
  setenv("BMOT_THREADS", "1", 1);
  const auto one = simulate(eq2, 50000, 99);
  setenv("BMOT_THREADS", "3", 1);
  const auto three = simulate(eq2, 50000, 99);
  unsetenv("BMOT_THREADS");
  CHECK(one == three);
  CHECK(simulate(eq2, 50000, 99) == one);
  CHECK_FALSE(simulate(eq2, 50000, 100) == one);
  CHECK(std::abs(one.martingale_mc) <= 5.0 * one.martingale_se + 1e-12);
}

TEST_CASE("draw_samples matches simulate's stream") {
  const auto eq = solve_gaussian(identity_blocks(1));
  const auto s = draw_samples(eq, 20000, 3);
  CHECK(s.n() == 20000);
  CHECK(s.dx() == 2);
  // X = (R, A R) with R = (U + V) / 2.
  CHECK((s.x().col(0) - 0.5 * (s.y().col(0) + s.y().col(1))).cwiseAbs().maxCoeff() <= 1e-14);
  const auto rep = simulate(eq, 20000, 3);
  double half_sxy = 0.0;
  for (Eigen::Index i = 0; i < s.n(); ++i) {
    half_sxy += 0.5 * (s.x()(i, 0) * s.y()(i, 1) + s.x()(i, 1) * s.y()(i, 0));
  }
  CHECK(half_sxy / 20000.0 == doctest::Approx(rep.primal_mc).epsilon(1e-12));
}

TEST_CASE("profit_check") {
  // m = 1, A = 1, (u, v) = (0, 2): R = 1, profit(r) = r (2 - r) <= 1.
  const auto eq = solve_gaussian(identity_blocks(1));
  Matrix y(1, 2);
  y << 0, 2;
  const SampleSet one(Matrix::Constant(1, 2, 1.0), y);
  CHECK(profit_check(eq, one, 500, 3.0, 1) <= 0.0);
  CHECK(profit_check(eq, one, 50, 0.0, 1) == 0.0);

  const auto eq2 = solve_gaussian(identity_blocks(2));
  const auto samples = draw_samples(eq2, 200, 4);
  CHECK(profit_check(eq2, samples, 100, 1.0, 5) <= 1e-12);

  gen::Rng rng(31);
  const auto eq3 = solve_gaussian(gen::covariance_blocks(3, rng));
  CHECK(profit_check(eq3, draw_samples(eq3, 300, 6), 100, 2.0, 7) <= 1e-10);
}

TEST_CASE("efficiency_regression") {
  const auto eq = solve_gaussian(identity_blocks(1));
  const auto s = draw_samples(eq, 100000, 11);
  CHECK((efficiency_regression(s, eq) - eq.a).norm() <= 0.05);

  // Mispriced samples: the population coefficient Cov(V, R') Cov(R')^{-1}
  // differs from the pricing matrix that generated R'.
  gen::Rng rng(2);
  const auto blocks = gen::covariance_blocks(2, rng);
  const auto good = solve_gaussian(blocks);
  const auto wrong = equilibrium_for_pricing(blocks, 2.0 * good.a);
  const Matrix t = wrong.order_map();
  const Matrix sigma = blocks.full();
  const Matrix cov_r = t * sigma * t.transpose();
  const Matrix cov_vr = sigma.bottomRows(2) * t.transpose();
  const Matrix b_pop = cov_vr * cov_r.inverse();
  REQUIRE((b_pop - wrong.a).norm() > 0.1);
  const Matrix b_hat = efficiency_regression(draw_samples(wrong, 200000, 12), wrong);
  CHECK((b_hat - b_pop).norm() <= 0.05);
  CHECK((b_hat - wrong.a).norm() > 0.05);

  CHECK_THROWS_AS(efficiency_regression(SampleSet(Matrix::Zero(5, 2), gen::normal_matrix(5, 2, rng)), eq),
                  NumericalError);
  CHECK_THROWS_AS(efficiency_regression(SampleSet(Matrix::Ones(1, 2), Matrix::Ones(1, 2)), eq),
                  ValidationError);
}

TEST_CASE("projected samples satisfy the projection certificate") {
  gen::Rng rng(19);
  const auto eq = solve_gaussian(gen::covariance_blocks(2, rng));
  const auto s = draw_samples(eq, 1000, 1);
  const LinearMonotoneGraph g(eq.a);
  const auto sm = standard_matrix(2);
  for (Eigen::Index i = 0; i < s.n(); ++i) {
    const Vector y = s.y().row(i).transpose();
    const Vector x = s.x().row(i).transpose();
    CHECK((project_linear(g, y) - x).norm() <= 1e-10 * (1.0 + x.norm()));
  }
  (void)sm;
}
