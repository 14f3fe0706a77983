#pragma once

// Gaussian insider equilibrium: pricing rule f(r) = A r with A the positive
// solution of the Riccati equation, and total order
//   R = (A + A^T)^{-1} (A^T U + V).

#include <cstdint>

#include "bmot/riccati.hpp"
#include "bmot/samples.hpp"

namespace bmot {

struct GaussianEquilibrium {
  CovarianceBlocks blocks;
  RiccatiSolution solution;
  /// Pricing matrix (Kyle's lambda).
  Matrix a;
  /// R = rmap_u U + rmap_v V.
  Matrix rmap_u;
  Matrix rmap_v;

  int m() const { return blocks.m(); }
  /// [rmap_u, rmap_v], the m x 2m map Y -> R.
  Matrix order_map() const;
  /// Y -> X = (R, A R), a 2m x 2m map.
  Matrix optimal_map() const;
};

GaussianEquilibrium solve_gaussian(const CovarianceBlocks& blocks);

/// Equilibrium built from an arbitrary pricing matrix (A + A^T positive
/// definite), e.g. to generate mispriced samples. No Riccati check is made.
GaussianEquilibrium equilibrium_for_pricing(const CovarianceBlocks& blocks, const Matrix& a);

struct PrimalDual {
  double primal = 0.0;
  double dual = 0.0;
};

/// primal = E[S(X, Y)] / 2 = tr(S Sigma T^T) / 2 for X = T Y;
/// dual = E[psi(Y)] = tr((A + A^T) Cov(R)) / 2. They agree iff X = E[Y | X].
PrimalDual primal_dual_values(const GaussianEquilibrium& eq);

struct SimulationReport {
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
  /// ||sample Cov(V - A R, R)||_F and its estimated standard error.
  double efficiency_gap = 0.0;
  double efficiency_se = 0.0;
  /// ||sample Cov(A^T U + V, A U - V)||_F and its estimated standard error.
  double independence_gap = 0.0;
  double independence_se = 0.0;
  double mean_profit = 0.0;
  double primal_mc = 0.0;
  double primal_mc_se = 0.0;
  double dual_mc = 0.0;
  double dual_mc_se = 0.0;
  double primal_exact = 0.0;
  double dual_exact = 0.0;
  /// Sample mean of S(X, Y - X); zero in the population.
  double martingale_mc = 0.0;
  double martingale_se = 0.0;

  bool operator==(const SimulationReport&) const = default;
};

/// Samples per shard. Shard s draws from a generator seeded with
/// (seed, s), so results do not depend on the number of workers.
inline constexpr std::int64_t kShardSize = 8192;

/// Draws n samples Y = (U, V) by Cholesky of the joint covariance, paired with
/// X = (R, A R).
SampleSet draw_samples(const GaussianEquilibrium& eq, std::int64_t n, std::uint64_t seed);

/// Streams n samples through moment accumulators (no storage).
SimulationReport simulate(const GaussianEquilibrium& eq, std::int64_t n, std::uint64_t seed);

/// Largest profit(R + delta) - profit(R) over all samples and n_perturb random
/// delta with |delta| <= radius, where profit(r) = <r - U, V - A r>.
/// Y = (U, V) is read from the samples; R is recomputed from the equilibrium.
double profit_check(const GaussianEquilibrium& eq, const SampleSet& samples, int n_perturb,
                    double radius, std::uint64_t seed = 0);

/// Least-squares coefficient B of V on R (no intercept), where R is the first
/// m columns of X and V the last m columns of Y.
Matrix efficiency_regression(const SampleSet& samples, const GaussianEquilibrium& eq);

}  // namespace bmot
