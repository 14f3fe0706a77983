#pragma once

// Dense two-phase tableau simplex for
//   maximize c^T x  subject to  A x = b,  x >= 0.

#include <vector>

#include "bmot/linalg.hpp"

namespace bmot::lp {

enum class Status { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(Status s);

struct Options {
  /// Reduced-cost threshold for entering columns.
  double optimality_tol = 1e-10;
  /// Smallest pivot magnitude accepted by the ratio test.
  double pivot_tol = 1e-9;
  /// Phase-one objective above this means infeasible.
  double feasibility_tol = 1e-9;
  long max_pivots = 200000;
  /// Consecutive degenerate pivots after which pricing switches from
  /// Dantzig's rule to Bland's rule (until progress resumes).
  int degenerate_switch = 20;
};

struct Result {
  Status status = Status::iteration_limit;
  Vector x;
  double objective = 0.0;
  long pivots = 0;
};

Result maximize(const Matrix& a, const Vector& b, const Vector& c, const Options& opts = {});

}  // namespace bmot::lp
