#include <algorithm>
#include <cmath>

#include "bmot/approx.hpp"
#include "bmot/errors.hpp"
#include "bmot/generators.hpp"
#include "doctest.h"

using namespace bmot;

namespace {

SampleSet scalar_samples(std::initializer_list<double> xs, std::initializer_list<double> ys) {
  Matrix x(static_cast<Eigen::Index>(xs.size()), 1), y(static_cast<Eigen::Index>(ys.size()), 1);
  Eigen::Index i = 0;
  for (double v : xs) x(i++, 0) = v;
  i = 0;
  for (double v : ys) y(i++, 0) = v;
  return SampleSet(x, y);
}

std::vector<Eigen::Index> identity(Eigen::Index n) {
  std::vector<Eigen::Index> p(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) p[i] = i;
  return p;
}

}  // namespace

TEST_CASE("uniform_approximation examples") {
  // One cell: Y = 1,2,3 handed out in the order of X = 30,10,20.
  auto s = scalar_samples({30, 10, 20}, {1, 2, 3});
  auto r = uniform_approximation(s, 10.0);
  CHECK(r.cells.size() == 1);
  const Matrix z = r.z(s);
  CHECK(z(0, 0) == 3.0);
  CHECK(z(1, 0) == 1.0);
  CHECK(z(2, 0) == 2.0);

  // Constant X: ties broken by index keep Z = Y.
  s = scalar_samples({5, 5, 5, 5}, {0.4, -1, 2, 0.1});
  r = uniform_approximation(s, 100.0);
  // Y sorted is -1, 0.1, 0.4, 2 and goes to samples 0..3 in order
  CHECK(r.perm == std::vector<Eigen::Index>{1, 3, 0, 2});

  // Epsilon below the minimal spacing: singleton cells.
  s = scalar_samples({3, 1, 2}, {0, 1, 2});
  r = uniform_approximation(s, 0.5);
  CHECK(r.cells.size() == 3);
  CHECK(r.perm == identity(3));

  CHECK_THROWS_AS(uniform_approximation(s, 0.0), ValidationError);
  CHECK_THROWS_AS(uniform_approximation(s, -1.0), ValidationError);
}

TEST_CASE("greedy cells follow index order") {
  // Centers: y0 = 0 covers 0.4 (|.| <= 0.5), then y2 = 0.9 covers 1.3.
  auto s = scalar_samples({0, 0, 0, 0}, {0, 0.4, 0.9, 1.3});
  const auto r = uniform_approximation(s, 1.0);
  REQUIRE(r.cells.size() == 2);
  CHECK(r.cells[0] == std::vector<Eigen::Index>{0, 1});
  CHECK(r.cells[1] == std::vector<Eigen::Index>{2, 3});
}

TEST_CASE("verify_rearrangement detects violations") {
  auto s = scalar_samples({1, 2, 3}, {0, 5, 10});
  Rearrangement r;
  r.epsilon = 1e-3;
  r.perm = {2, 1, 0};
  r.cells = {{0, 1, 2}};
  auto rep = verify_rearrangement(s, r);
  CHECK(rep.multiset_equal);
  CHECK_FALSE(rep.displacement_ok);
  CHECK(rep.displacement_offenders == std::vector<Eigen::Index>{0, 2});
  CHECK(rep.max_displacement == 10.0);
  CHECK_FALSE(rep.ok());

  r.perm = {0, 0, 2};
  rep = verify_rearrangement(s, r);
  CHECK_FALSE(rep.permutation);
  CHECK_FALSE(rep.ok());

  r.perm = {0, 1};
  CHECK_FALSE(verify_rearrangement(s, r).ok());

  r = uniform_approximation(s, 1e-3);
  CHECK(verify_rearrangement(s, r).ok());
}

TEST_CASE("random sample sets: law, displacement, dependence") {
  gen::Rng rng(99);
  const double eps[] = {1e-3, 1e-2, 1e-1, 1.0, 10.0};
  int violations = 0;
  for (int t = 0; t < 100; ++t) {
    const int n = 20 + 7 * t;
    const auto s = gen::random_samples(n, 1 + t % 3, 1 + (t / 3) % 3, 1 + t % 11, rng);
    const double e = eps[t % 5];
    const auto r = uniform_approximation(s, e);
    const auto rep = verify_rearrangement(s, r);
    if (!rep.ok()) ++violations;
    CHECK(rep.max_displacement <= e);

    // each cell is mapped onto itself
    for (const auto& cell : r.cells) {
      std::vector<Eigen::Index> img;
      for (Eigen::Index i : cell) img.push_back(r.perm[i]);
      std::sort(img.begin(), img.end());
      CHECK(img == cell);
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("map_from_plan on a pooled two-point plan") {
  Matrix y(4, 2), x(4, 2);
  y << 1, 0, 1, 0.5, 0, 1, 0, 0.5;
  x.rowwise() = Eigen::RowVector2d(0.5, 0.5);
  const SampleSet s(x, y);
  for (double e : {1e-3, 0.6, 5.0}) {
    const auto out = map_from_plan(s, e, standard_matrix(1));
    CHECK_FALSE(out.martingale_warning);
    for (Eigen::Index i = 0; i < 4; ++i) CHECK((out.u.row(i) - x.row(i)).norm() <= 1e-15);
    CHECK(out.value_gap <= 1e-15);
  }
}

TEST_CASE("map_from_plan reproduces X when cells are singletons") {
  gen::Rng rng(4);
  const auto s = gen::martingale_samples(200, 2, 30, rng);
  const auto out = map_from_plan(s, 1e-9, standard_matrix(1));
  CHECK(out.rearrangement.cells.size() == 200);
  CHECK((out.u - s.x()).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(out.value_gap <= 1e-15);
  CHECK(out.martingale_residual <= 1e-14);
}

TEST_CASE("map_from_plan value bound") {
  gen::Rng rng(8);
  for (int t = 0; t < 30; ++t) {
    const int m = 1 + t % 2;
    const auto s = gen::martingale_samples(100 + 10 * t, 2 * m, 5 + t, rng);
    const auto sm = standard_matrix(m);
    double prev_bound = 0.0;
    for (double e : {1.0, 0.5, 0.1, 0.01}) {
      const auto out = map_from_plan(s, e, sm);
      CHECK_FALSE(out.martingale_warning);
      CHECK(out.value_gap <= out.bound + 1e-9);
      if (prev_bound > 0.0) CHECK(out.bound < prev_bound);
      prev_bound = out.bound;
    }
    // halving epsilon: bound(e/2) / bound(e) = (2 mu + e/2) / (2 (2 mu + e))
    double mu = s.y().rowwise().norm().mean();
    const double b1 = map_from_plan(s, 0.2, sm).bound;
    const double b2 = map_from_plan(s, 0.1, sm).bound;
    CHECK(b2 / b1 == doctest::Approx((2 * mu + 0.1) / (2 * (2 * mu + 0.2))).epsilon(1e-12));
  }
}

TEST_CASE("map_from_plan flags non-martingale samples") {
  gen::Rng rng(5);
  const auto s = gen::random_samples(50, 2, 2, 4, rng);
  const auto out = map_from_plan(s, 0.1, standard_matrix(1));
  CHECK(out.martingale_warning);
  CHECK_THROWS_AS(map_from_plan(s, 0.1, standard_matrix(2)), ValidationError);
}
