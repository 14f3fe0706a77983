#include "bmot/generators.hpp"

#include <vector>

namespace bmot::gen {

Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal;
  Matrix out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = normal(rng);
  }
  return out;
}

Matrix spd_matrix(Eigen::Index m, Rng& rng, double floor) {
  const Matrix b = normal_matrix(m, m, rng);
  Matrix s = b * b.transpose() / static_cast<double>(m);
  s.diagonal().array() += floor;
  return 0.5 * (s + s.transpose());
}

Matrix pd_matrix(Eigen::Index m, Rng& rng) {
  const Matrix w = normal_matrix(m, m, rng);
  return spd_matrix(m, rng, 0.2) + 0.5 * (w - w.transpose());
}

CovarianceBlocks covariance_blocks(int m, Rng& rng) {
  const Matrix b = normal_matrix(2 * m, 2 * m, rng);
  Matrix sigma = b * b.transpose() / static_cast<double>(2 * m);
  sigma.diagonal().array() += 0.2;
  return CovarianceBlocks(sigma.topLeftCorner(m, m), sigma.topRightCorner(m, m),
                          sigma.bottomRightCorner(m, m));
}

DiscreteMeasure discrete_measure(int n, int d, Rng& rng) {
  Matrix pts(n, d);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c) pts(i, c) = uniform(rng, -2.0, 2.0);
  Vector w(n);
  for (int i = 0; i < n; ++i) w(i) = uniform(rng, 0.2, 1.0);
  w /= w.sum();
  return DiscreteMeasure(std::move(pts), std::move(w));
}

SampleSet random_samples(int n, int dx, int dy, int x_levels, Rng& rng) {
  Matrix levels(x_levels, dx);
  for (int l = 0; l < x_levels; ++l)
    for (int c = 0; c < dx; ++c) levels(l, c) = uniform(rng, -2.0, 2.0);
  Matrix x(n, dx), y(n, dy);
  std::uniform_int_distribution<int> pick(0, x_levels - 1);
  for (int i = 0; i < n; ++i) {
    x.row(i) = levels.row(pick(rng));
    for (int c = 0; c < dy; ++c) y(i, c) = uniform(rng, -2.0, 2.0);
  }
  return SampleSet(std::move(x), std::move(y));
}

SampleSet martingale_samples(int n, int d, int groups, Rng& rng) {
  Matrix y(n, d);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c) y(i, c) = uniform(rng, -2.0, 2.0);
  std::vector<int> label(static_cast<std::size_t>(n));
  std::uniform_int_distribution<int> pick(0, groups - 1);
  for (int i = 0; i < n; ++i) label[i] = i < groups ? i : pick(rng);
  Matrix sums = Matrix::Zero(groups, d);
  Vector counts = Vector::Zero(groups);
  for (int i = 0; i < n; ++i) {
    sums.row(label[i]) += y.row(i);
    counts(label[i]) += 1.0;
  }
  Matrix x(n, d);
  for (int i = 0; i < n; ++i) x.row(i) = sums.row(label[i]) / counts(label[i]);
  return SampleSet(std::move(x), std::move(y));
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace bmot::gen
