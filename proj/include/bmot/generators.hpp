#pragma once

// Seeded random instances shared by the test suites and `bmot paper-check`.

#include <cstdint>
#include <random>

#include "bmot/linalg.hpp"
#include "bmot/discrete_mot.hpp"
#include "bmot/riccati.hpp"
#include "bmot/samples.hpp"

namespace bmot::gen {

using Rng = std::mt19937_64;

Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);

/// Symmetric positive-definite with eigenvalues bounded below by `floor`.
Matrix spd_matrix(Eigen::Index m, Rng& rng, double floor = 0.1);

/// Non-symmetric matrix whose symmetric part is positive-definite.
Matrix pd_matrix(Eigen::Index m, Rng& rng);

/// Blocks of a random well-conditioned 2m x 2m covariance.
CovarianceBlocks covariance_blocks(int m, Rng& rng);

/// n distinct points, coordinates uniform in [-2, 2), random positive
/// weights normalized to sum exactly to 1 within rounding.
DiscreteMeasure discrete_measure(int n, int d, Rng& rng);

/// Y uniform in [-2, 2)^dy; X drawn from `x_levels` distinct rows so that
/// X has ties.
SampleSet random_samples(int n, int dx, int dy, int x_levels, Rng& rng);

/// Exact empirical martingale: Y uniform in [-2, 2)^d split into `groups`
/// random-size groups, X the group mean of Y.
SampleSet martingale_samples(int n, int d, int groups, Rng& rng);

/// Uniform in [lo, hi).
double uniform(Rng& rng, double lo, double hi);

}  // namespace bmot::gen
