#pragma once

// Uniform approximation of a plan by a map: rearrange Y within small cells so
// that X becomes a function of the rearranged variable Z.

#include <utility>
#include <vector>

#include "bmot/linalg.hpp"
#include "bmot/samples.hpp"
#include "bmot/sspace.hpp"

namespace bmot {

/// Z_i = Y_{perm[i]}. perm maps every cell onto itself.
struct Rearrangement {
  std::vector<Eigen::Index> perm;
  std::vector<std::vector<Eigen::Index>> cells;
  double epsilon = 0.0;

  Matrix z(const SampleSet& s) const;
};

/// Greedy covering of the Y rows by balls of radius epsilon / 2 centered at
/// the still-uncovered rows in index order. Inside a cell the lexicographically
/// i-th smallest Y goes to the sample of i-th smallest (X, index).
Rearrangement uniform_approximation(const SampleSet& samples, double epsilon);

struct RearrangementReport {
  bool permutation = true;
  bool multiset_equal = true;
  double max_displacement = 0.0;
  bool displacement_ok = true;
  bool functional = true;
  std::vector<Eigen::Index> displacement_offenders;
  /// Pairs with Z_i == Z_j but X_i != X_j.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> dependence_offenders;
  /// Rows whose Z is not matched in the Y multiset.
  std::vector<Eigen::Index> multiset_offenders;

  bool ok() const { return permutation && multiset_equal && displacement_ok && functional; }
};

RearrangementReport verify_rearrangement(const SampleSet& samples, const Rearrangement& r);

struct MapFromPlan {
  Rearrangement rearrangement;
  /// U_i = f(Y_i), one row per sample.
  Matrix u;
  double value_gap = 0.0;
  /// epsilon ||S|| (2 mean|Y| + epsilon) / 2.
  double bound = 0.0;
  /// max over X-groups of |mean Y - X|.
  double martingale_residual = 0.0;
  bool martingale_warning = false;
};

/// Martingale residual above this (times 1 + max|Y|) sets the warning flag.
inline constexpr double kMartingaleWarnTol = 1e-9;

MapFromPlan map_from_plan(const SampleSet& samples, double epsilon, const ScalarProductMatrix& s);

}  // namespace bmot
