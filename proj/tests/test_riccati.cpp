#include <cmath>

#include "bmot/errors.hpp"
#include "bmot/generators.hpp"
#include "bmot/riccati.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bmot;
using Eigen::Vector2d;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

CovarianceBlocks scalar_blocks(double su, double sv, double rho) {
  return CovarianceBlocks(Matrix::Constant(1, 1, su * su), Matrix::Constant(1, 1, rho * su * sv),
                          Matrix::Constant(1, 1, sv * sv));
}

// Residual written with matrix expressions, independent of nare_residual.
double residual_oracle(const Matrix& a, const CovarianceBlocks& b) {
  return (a * b.suu() * a + a * b.suv() - b.suv().transpose() * a - b.svv()).norm();
}

CovarianceBlocks example_m2() {
  return CovarianceBlocks(mat2(2, 0.3, 0.3, 1), mat2(0.5, -0.2, 0.1, 0.3), mat2(5, 1, 1, 4));
}

}  // namespace

TEST_CASE("CovarianceBlocks validation") {
  const Matrix i2 = Matrix::Identity(2, 2);
  CHECK_NOTHROW(CovarianceBlocks(i2, Matrix::Zero(2, 2), i2));
  CHECK_THROWS_AS(CovarianceBlocks(-i2, Matrix::Zero(2, 2), i2), ValidationError);
  CHECK_THROWS_AS(CovarianceBlocks(i2, Matrix::Zero(2, 2), Matrix::Zero(2, 2)), ValidationError);
  CHECK_THROWS_AS(CovarianceBlocks(mat2(1, 0.5, 0, 1), Matrix::Zero(2, 2), i2), ValidationError);
  // Perfect correlation: blocks PD but joint covariance singular.
  CHECK_THROWS_AS(CovarianceBlocks(i2, i2, i2), ValidationError);
  CHECK_THROWS_AS(CovarianceBlocks(i2, Matrix::Zero(3, 3), i2), ValidationError);
  const auto b = example_m2();
  CHECK(b.svu() == b.suv().transpose());
  CHECK(b.full().topRightCorner(2, 2) == b.suv());
}

TEST_CASE("lambda_symmetric") {
  const Matrix i2 = Matrix::Identity(2, 2);
  Matrix expect = Vector2d(2, 3).asDiagonal();
  CHECK(lambda_symmetric(CovarianceBlocks(i2, Matrix::Zero(2, 2), Matrix(Vector2d(4, 9).asDiagonal())))
            .isApprox(expect, 1e-12));
  CHECK(lambda_symmetric(scalar_blocks(2, 6, 0))(0, 0) == doctest::Approx(3.0).epsilon(1e-14));

  gen::Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const auto b = gen::covariance_blocks(3, rng);
    const Matrix l = lambda_symmetric(b);
    CHECK((l * b.suu() * l - b.svv()).norm() <= 1e-10);
    CHECK(l == l.transpose());
    CHECK(is_positive_definite(l));
  }
}

TEST_CASE("nare_residual") {
  const Matrix i2 = Matrix::Identity(2, 2);
  const CovarianceBlocks id(i2, Matrix::Zero(2, 2), i2);
  CHECK(nare_residual(i2, id) == 0.0);
  const auto b = example_m2();
  CHECK(nare_residual(Matrix::Zero(2, 2), b) == doctest::Approx(b.svv().norm()));
  const Matrix l = lambda_symmetric(b);
  const Matrix prod = l * b.suv();
  REQUIRE((prod - prod.transpose()).norm() > 1e-3);
  CHECK(nare_residual(l, b) > 1e-3);
  CHECK(nare_residual(l, b) == doctest::Approx(residual_oracle(l, b)).epsilon(1e-12));
  CHECK_THROWS_AS(nare_residual(Matrix::Identity(3, 3), b), ValidationError);
}

TEST_CASE("sylvester_solve") {
  const Matrix i2 = Matrix::Identity(2, 2);
  CHECK(sylvester_solve(i2, i2, 2 * i2).isApprox(i2, 1e-14));

  const Matrix m = Vector2d(1, 2).asDiagonal();
  const Matrix n = Vector2d(3, 4).asDiagonal();
  const Matrix h = sylvester_solve(m, n, Matrix::Ones(2, 2));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(h(i, j) == doctest::Approx(1.0 / (m(j, j) + n(i, i))).epsilon(1e-14));

  gen::Rng rng(9);
  for (int t = 0; t < 20; ++t) {
    const int k = 1 + t % 5;
    const Matrix mm = gen::pd_matrix(k, rng);
    const Matrix nn = gen::pd_matrix(k, rng);
    CHECK(sylvester_solve(mm, nn, Matrix::Zero(k, k)).norm() == 0.0);
    const Matrix c = gen::normal_matrix(k, k, rng);
    const Matrix x = sylvester_solve(mm, nn, c);
    CHECK((x * mm + nn * x - c).norm() <= 1e-12 * (c.norm() + (mm.norm() + nn.norm()) * x.norm()));
  }
  // Spectra of M and -N overlap: singular.
  CHECK_THROWS_AS(sylvester_solve(i2, -i2, i2), NumericalError);
}

TEST_CASE("solve_nare scalar Kyle lambda") {
  for (double rho : {-0.9, -0.3, 0.0, 0.5, 0.95}) {
    const auto sol = solve_nare(scalar_blocks(2, 6, rho));
    CHECK(std::abs(sol.a(0, 0) - 3.0) <= 1e-12);
    CHECK(sol.symmetric_case);
  }
}

TEST_CASE("solve_nare with uncorrelated blocks returns Svv^{1/2}") {
  gen::Rng rng(4);
  for (int m = 1; m <= 4; ++m) {
    const Matrix svv = gen::spd_matrix(m, rng);
    const CovarianceBlocks b(Matrix::Identity(m, m), Matrix::Zero(m, m), svv);
    const auto sol = solve_nare(b);
    CHECK((sol.a - oracle::denman_beavers_sqrt(svv)).norm() <= 1e-10);
  }
}

TEST_CASE("solve_nare on the non-symmetric m=2 example") {
  const auto b = example_m2();
  const auto sol = solve_nare(b);
  CHECK(residual_oracle(sol.a, b) <= 1e-10);
  CHECK(sol.residual_norm <= nare_tolerance(b));
  CHECK(is_positive_definite(sol.a));
  CHECK_FALSE(sol.symmetric_case);
  CHECK((sol.a - sol.a.transpose()).norm() > 1e-4);
  CHECK(sol.residual_trace.size() == static_cast<std::size_t>(sol.iterations) + 1);
  // Independent route: invariant subspace of Sigma * S.
  CHECK((solve_nare_invariant_subspace(b) - sol.a).norm() <= 1e-9);
}

TEST_CASE("check_symmetric_case") {
  const Matrix i2 = Matrix::Identity(2, 2);
  const CovarianceBlocks zero(Matrix(Vector2d(2, 1).asDiagonal()), Matrix::Zero(2, 2), Matrix(Vector2d(3, 5).asDiagonal()));
  auto sol = solve_nare(zero);
  auto rep = check_symmetric_case(zero, sol.a);
  CHECK(rep.symmetric);
  CHECK(rep.asymmetry == 0.0);
  CHECK(rep.distance_to_lambda <= 1e-10);

  rep = check_symmetric_case(scalar_blocks(1.5, 0.7, 0.4), solve_nare(scalar_blocks(1.5, 0.7, 0.4)).a);
  CHECK(rep.symmetric);

  const auto b = example_m2();
  sol = solve_nare(b);
  rep = check_symmetric_case(b, sol.a);
  CHECK_FALSE(rep.symmetric);
  CHECK(rep.distance_to_lambda > 1e-4);
  (void)i2;
}

TEST_CASE("solve_nare properties on random blocks") {
  gen::Rng rng(77);
  for (int t = 0; t < 100; ++t) {
    const int m = 1 + t % 5;
    const auto b = gen::covariance_blocks(m, rng);
    const auto sol = solve_nare(b);
    CHECK(nare_residual(sol.a, b) <= nare_tolerance(b));
    CHECK(min_sym_eigenvalue(sol.a) > 0.0);
    // The transpose solves the sign-flipped equation.
    const Matrix at = sol.a.transpose();
    const Matrix flipped = at * b.suu() * at - (at * b.suv() - b.svu() * at) - b.svv();
    CHECK(flipped.norm() <= nare_tolerance(b));
  }
}

TEST_CASE("multi-start Newton converges to a single positive solution") {
  gen::Rng rng(123);
  for (int t = 0; t < 5; ++t) {
    const int m = 2 + t % 3;
    const auto b = gen::covariance_blocks(m, rng);
    const Matrix reference = solve_nare(b).a;
    int converged = 0;
    for (int s = 0; s < 20; ++s) {
      const Matrix start = gen::pd_matrix(m, rng);
      try {
        const auto sol = solve_nare_newton(b, start);
        CHECK((sol.a - reference).norm() <= 1e-8);
        ++converged;
      } catch (const NumericalError&) {
      }
    }
    CHECK(converged > 0);
  }
}

TEST_CASE("solve_nare failure carries the residual trace") {
  NewtonOptions opts;
  opts.max_iter = 1;
  try {
    solve_nare_newton(example_m2(), 50.0 * Matrix::Identity(2, 2), opts);
    FAIL("expected failure");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("residual trace") != std::string::npos);
  }
  CHECK_THROWS_AS(solve_nare_newton(example_m2(), -Matrix::Identity(2, 2)), ValidationError);
}
