#include "bmot/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bmot/errors.hpp"

namespace bmot::lp {

const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::iteration_limit: return "iteration limit";
  }
  return "unknown";
}

namespace {

// Row-major tableau. Row `rows` is the objective row holding reduced costs
// (c_j - z_j, entering when positive); the last column is the right-hand side.
class Tableau {
 public:
  Tableau(long rows, long cols) : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0) {}

  double& at(long i, long j) { return data_[static_cast<std::size_t>(i * (cols_ + 1) + j)]; }
  double at(long i, long j) const { return data_[static_cast<std::size_t>(i * (cols_ + 1) + j)]; }
  double& rhs(long i) { return at(i, cols_); }
  double& cost(long j) { return at(rows_, j); }
  long rows() const { return rows_; }
  long cols() const { return cols_; }

  void pivot(long p, long q) {
    const double inv = 1.0 / at(p, q);
    nz_.clear();
    for (long j = 0; j <= cols_; ++j) {
      double& v = at(p, j);
      if (v != 0.0) {
        v *= inv;
        nz_.push_back(j);
      }
    }
    at(p, q) = 1.0;
    for (long i = 0; i <= rows_; ++i) {
      if (i == p) continue;
      const double f = at(i, q);
      if (f == 0.0) continue;
      double* row = &at(i, 0);
      const double* prow = &at(p, 0);
      for (long j : nz_) row[j] -= f * prow[j];
      row[q] = 0.0;
    }
  }

 private:
  long rows_, cols_;
  std::vector<double> data_;
  std::vector<long> nz_;
};

struct Runner {
  Tableau& t;
  std::vector<long>& basis;
  const Options& opts;
  long pivots = 0;

  // Columns >= allowed_cols never enter.
  Status run(long allowed_cols) {
    int degenerate_streak = 0;
    while (true) {
      if (pivots >= opts.max_pivots) return Status::iteration_limit;
      const bool bland = degenerate_streak >= opts.degenerate_switch;
      long q = -1;
      double best = opts.optimality_tol;
      for (long j = 0; j < allowed_cols; ++j) {
        const double rc = t.cost(j);
        if (rc > best) {
          q = j;
          if (bland) break;
          best = rc;
        }
      }
      if (q < 0) return Status::optimal;

      long p = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (long i = 0; i < t.rows(); ++i) {
        const double a = t.at(i, q);
        if (a <= opts.pivot_tol) continue;
        const double r = t.rhs(i) / a;
        if (p < 0 || r < ratio - 1e-12) {
          p = i;
          ratio = r;
        } else if (r <= ratio + 1e-12 && basis[i] < basis[p]) {
          p = i;
          ratio = std::min(ratio, r);
        }
      }
      if (p < 0) return Status::unbounded;
      degenerate_streak = ratio <= 1e-12 ? degenerate_streak + 1 : 0;
      t.pivot(p, q);
      basis[p] = q;
      ++pivots;
      for (long i = 0; i < t.rows(); ++i) {
        if (t.rhs(i) < 0.0) t.rhs(i) = 0.0;
      }
    }
  }
};

}  // namespace

Result maximize(const Matrix& a, const Vector& b, const Vector& c, const Options& opts) {
  const long m = a.rows();
  const long n = a.cols();
  if (b.size() != m || c.size() != n) throw ValidationError("lp::maximize: dimension mismatch");

  // Columns: n structural, then m artificial.
  Tableau t(m, n + m);
  std::vector<long> basis(static_cast<std::size_t>(m));
  for (long i = 0; i < m; ++i) {
    const double sign = b(i) < 0.0 ? -1.0 : 1.0;
    for (long j = 0; j < n; ++j) t.at(i, j) = sign * a(i, j);
    t.at(i, n + i) = 1.0;
    t.rhs(i) = sign * b(i);
    basis[i] = n + i;
  }
  // Phase one: maximize -sum(artificials). Reduced cost of column j is the
  // column sum over rows. The objective row's rhs always holds minus the
  // current objective, here -(-sum b).
  for (long j = 0; j < n; ++j) {
    double s = 0.0;
    for (long i = 0; i < m; ++i) s += t.at(i, j);
    t.cost(j) = s;
  }
  {
    double s = 0.0;
    for (long i = 0; i < m; ++i) s += t.rhs(i);
    t.rhs(m) = s;
  }

  Result res;
  Runner runner{t, basis, opts};
  Status st = runner.run(n);
  if (st == Status::iteration_limit) {
    res.status = st;
    res.pivots = runner.pivots;
    return res;
  }
  if (t.rhs(m) > opts.feasibility_tol) {
    res.status = Status::infeasible;
    res.pivots = runner.pivots;
    return res;
  }

  // Drive remaining artificials out of the basis; rows where that is
  // impossible are redundant and are zeroed.
  for (long i = 0; i < m; ++i) {
    if (basis[i] < n) continue;
    long q = -1;
    for (long j = 0; j < n; ++j) {
      if (std::abs(t.at(i, j)) > opts.pivot_tol) { q = j; break; }
    }
    if (q >= 0) {
      t.pivot(i, q);
      basis[i] = q;
      ++runner.pivots;
    } else {
      for (long j = 0; j <= n + m; ++j) t.at(i, j) = 0.0;
    }
  }

  // Phase two objective row: c_j - c_B^T B^{-1} a_j.
  for (long j = 0; j < n + m; ++j) t.cost(j) = j < n ? c(j) : 0.0;
  t.rhs(m) = 0.0;
  for (long i = 0; i < m; ++i) {
    const long bj = basis[i];
    if (bj >= n) continue;
    const double cb = c(bj);
    if (cb == 0.0) continue;
    for (long j = 0; j <= n + m; ++j) t.at(m, j) -= cb * t.at(i, j);
  }

  st = runner.run(n);
  res.status = st;
  res.pivots = runner.pivots;
  if (st != Status::optimal) return res;
  res.x = Vector::Zero(n);
  for (long i = 0; i < m; ++i) {
    if (basis[i] < n) res.x(basis[i]) = t.rhs(i);
  }
  res.objective = c.dot(res.x);
  return res;
}

}  // namespace bmot::lp
