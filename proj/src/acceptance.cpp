#include "bmot/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "bmot/approx.hpp"
#include "bmot/discrete_mot.hpp"
#include "bmot/equilibrium.hpp"
#include "bmot/generators.hpp"
#include "bmot/riccati.hpp"
#include "bmot/version.hpp"

namespace bmot::acceptance {

namespace {

using io::Json;
using io::sig12;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Matrix pricing(const CovarianceBlocks& b, const Options& o) {
  if (!o.inject_nare_sign_fault) return solve_nare(b).a;
  return solve_nare(CovarianceBlocks(b.suu(), -b.suv(), b.svv())).a;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

CriterionResult riccati_correctness(const Options& o) {
  const auto t0 = Clock::now();
  gen::Rng rng(1001);
  double worst_ratio = 0.0, min_eig = std::numeric_limits<double>::infinity();
  int failures = 0;
  for (int i = 0; i < 100; ++i) {
    const auto blocks = gen::covariance_blocks(1 + i % 5, rng);
    const Matrix a = pricing(blocks, o);
    const double ratio = nare_residual(a, blocks) / nare_tolerance(blocks);
    const double eig = min_sym_eigenvalue(0.5 * (a + a.transpose()));
    worst_ratio = std::max(worst_ratio, ratio);
    min_eig = std::min(min_eig, eig);
    if (!(ratio <= 1.0) || !(eig > 0.0)) ++failures;
  }
  const double secs = seconds_since(t0);
  CriterionResult r;
  r.pass = failures == 0 && secs < 10.0;
  r.metrics = {{"instances", 100}, {"failures", failures}, {"max_residual_over_tol", sig12(worst_ratio)},
               {"min_eig_sym_part", sig12(min_eig)}, {"runtime_under_10s", secs < 10.0}};
  r.detail = fmt("%.0f/100 within tolerance, max residual/tol %.3g, min eig %.3g", 100.0 - failures, worst_ratio, min_eig);
  return r;
}

CriterionResult kyle_lambda(const Options& o) {
  gen::Rng rng(1002);
  double worst = 0.0;
  int failures = 0;
  for (int i = 0; i < 50; ++i) {
    const double su = gen::uniform(rng, 0.2, 5.0);
    const double sv = gen::uniform(rng, 0.2, 5.0);
    const double rho = gen::uniform(rng, -0.95, 0.95);
    const CovarianceBlocks b(Matrix::Constant(1, 1, su * su), Matrix::Constant(1, 1, rho * su * sv),
                             Matrix::Constant(1, 1, sv * sv));
    const double err = std::abs(pricing(b, o)(0, 0) - sv / su);
    worst = std::max(worst, err);
    if (!(err <= 1e-12)) ++failures;
  }
  CriterionResult r;
  r.pass = failures == 0;
  r.metrics = {{"instances", 50}, {"failures", failures}, {"max_abs_error", sig12(worst)}};
  r.detail = fmt("max |a - sigma_v/sigma_u| = %.3g", worst);
  return r;
}

// Suv = t Lambda^{-1} (K + N) / ||Lambda^{-1} (K + N)|| with K symmetric and
// N antisymmetric (zero when `symmetric`); the scale keeps Sigma PD.
CovarianceBlocks lambda_blocks(int m, bool symmetric, gen::Rng& rng) {
  const Matrix suu = gen::spd_matrix(m, rng);
  const Matrix svv = gen::spd_matrix(m, rng);
  const Matrix lambda = lambda_symmetric(CovarianceBlocks(suu, Matrix::Zero(m, m), svv));
  const Matrix g = gen::normal_matrix(m, m, rng);
  Matrix k = 0.5 * (g + g.transpose());
  if (!symmetric) {
    const Matrix h = gen::normal_matrix(m, m, rng);
    k += 1.5 * (h - h.transpose());
  }
  Matrix suv = lambda.inverse() * k;
  const double t = 0.5 * std::sqrt(min_sym_eigenvalue(suu) * min_sym_eigenvalue(svv));
  suv *= t / suv.operatorNorm();
  return CovarianceBlocks(suu, suv, svv);
}

CriterionResult symmetric_case(const Options& o) {
  gen::Rng rng(1003);
  double worst_sym = 0.0, best_asym = std::numeric_limits<double>::infinity();
  int failures = 0;
  for (int i = 0; i < 20; ++i) {
    const auto b = lambda_blocks(1 + i % 5, true, rng);
    const double d = (pricing(b, o) - lambda_symmetric(b)).norm();
    worst_sym = std::max(worst_sym, d);
    if (!(d <= 1e-8)) ++failures;
  }
  for (int i = 0; i < 20; ++i) {
    const auto b = lambda_blocks(2 + i % 4, false, rng);
    const double d = (pricing(b, o) - lambda_symmetric(b)).norm();
    best_asym = std::min(best_asym, d);
    if (!(d > 1e-4)) ++failures;
  }
  CriterionResult r;
  r.pass = failures == 0;
  r.metrics = {{"instances", 40}, {"failures", failures}, {"max_dist_symmetric", sig12(worst_sym)},
               {"min_dist_nonsymmetric", sig12(best_asym)}};
  r.detail = fmt("symmetric: max ||A - Lambda|| %.3g; non-symmetric: min %.3g", worst_sym, best_asym);
  return r;
}

CriterionResult gaussian_duality(const Options& o) {
  gen::Rng rng(1004);
  double worst_rel = 0.0, worst_gap = -std::numeric_limits<double>::infinity();
  int failures = 0;
  for (int i = 0; i < 100; ++i) {
    const auto b = gen::covariance_blocks(1 + i % 5, rng);
    const auto eq = equilibrium_for_pricing(b, pricing(b, o));
    const auto pd = primal_dual_values(eq);
    const double rel = std::abs(pd.primal - pd.dual) / std::max(std::abs(pd.primal), std::abs(pd.dual));
    worst_rel = std::max(worst_rel, rel);
    if (!(rel <= 1e-12)) ++failures;
    if (i < 10) {
      const auto samples = draw_samples(eq, 10000, 4000 + static_cast<std::uint64_t>(i));
      const auto cert = certify_optimality(samples, MonotoneGraph(LinearMonotoneGraph(eq.a)), 1e-10);
      worst_gap = std::max(worst_gap, cert.max_gap);
      if (!cert.certified) ++failures;
    }
  }
  CriterionResult r;
  r.pass = failures == 0;
  r.metrics = {{"instances", 100}, {"certified_instances", 10}, {"samples_per_certificate", 10000},
               {"failures", failures}, {"max_relative_gap", sig12(worst_rel)}, {"max_certificate_gap", sig12(worst_gap)}};
  r.detail = fmt("max |primal - dual|/|dual| %.3g, max certificate gap %.3g", worst_rel, worst_gap);
  return r;
}

CriterionResult equilibrium_statistics(const Options& o) {
  gen::Rng rng(1005);
  Json inst = Json::array();
  int failures = 0;
  double worst_profit = -std::numeric_limits<double>::infinity();
  for (int m = 1; m <= 3; ++m) {
    const auto b = gen::covariance_blocks(m, rng);
    const auto eq = equilibrium_for_pricing(b, pricing(b, o));
    const std::uint64_t seed = 5000 + static_cast<std::uint64_t>(m);
    const auto s5 = simulate(eq, 100000, seed);
    const auto s6 = simulate(eq, 1000000, seed);
    const double profit = profit_check(eq, draw_samples(eq, 1000, seed), 100, 1.0, seed);
    worst_profit = std::max(worst_profit, profit);
    const bool ok = s5.efficiency_gap <= 5.0 * s5.efficiency_se && s5.independence_gap <= 5.0 * s5.independence_se &&
                    s6.efficiency_gap <= s5.efficiency_gap && s6.independence_gap <= s5.independence_gap &&
                    profit <= 1e-10;
    if (!ok) ++failures;
    inst.push_back({{"m", m},
                    {"efficiency_gap_se_units", sig12(s5.efficiency_gap / s5.efficiency_se)},
                    {"independence_gap_se_units", sig12(s5.independence_gap / s5.independence_se)},
                    {"efficiency_shrink", sig12(s5.efficiency_gap / s6.efficiency_gap)},
                    {"independence_shrink", sig12(s5.independence_gap / s6.independence_gap)},
                    {"profit_check", sig12(profit)}});
  }
  CriterionResult r;
  r.pass = failures == 0;
  r.metrics = {{"failures", failures}, {"instances", inst}};
  double worst_se = 0.0;
  for (const auto& i : inst)
    worst_se = std::max({worst_se, i["efficiency_gap_se_units"].get<double>(), i["independence_gap_se_units"].get<double>()});
  r.detail = fmt("max gap %.3g SE at n=1e5, max profit gain %.3g", worst_se, worst_profit);
  return r;
}

struct DiscreteInstance {
  DiscreteMeasure nu;
  Matrix grid;
};

std::vector<DiscreteInstance> discrete_instances() {
  gen::Rng rng(1006);
  std::vector<DiscreteInstance> out;
  for (int i = 0; i < 50; ++i) {
    auto nu = gen::discrete_measure(2 + i % 7, 2, rng);
    Matrix grid = merge_grids(default_grid(nu, static_cast<std::uint64_t>(i)), subset_barycenter_grid(nu));
    out.push_back({std::move(nu), std::move(grid)});
  }
  return out;
}

std::vector<MonotoneGraph> test_graphs(gen::Rng& rng) {
  std::vector<MonotoneGraph> gs;
  gs.emplace_back(LinearMonotoneGraph(Matrix::Identity(1, 1)));
  for (int k = 0; k < 4; ++k) gs.emplace_back(LinearMonotoneGraph(Matrix::Constant(1, 1, std::exp(gen::uniform(rng, -2.0, 2.0)))));
  for (int k = 0; k < 3; ++k) {
    std::vector<Eigen::Vector2d> pts;
    double r = gen::uniform(rng, -2.0, 0.0), v = gen::uniform(rng, -2.0, 0.0);
    for (int p = 0; p < 2 + k; ++p) {
      pts.emplace_back(r, v);
      r += gen::uniform(rng, 0.2, 1.5);
      v += gen::uniform(rng, 0.2, 1.5);
    }
    gs.emplace_back(PiecewiseMonotoneGraph(std::move(pts)));
  }
  return gs;
}

CriterionResult weak_duality() {
  const auto s = standard_matrix(1);
  gen::Rng rng(1016);
  double worst = -std::numeric_limits<double>::infinity();
  int failures = 0, duals = 0;
  for (const auto& inst : discrete_instances()) {
    const double primal = solve_plan_lp(inst.nu, inst.grid, s).value;
    for (const auto& g : test_graphs(rng)) {
      const auto d = dual_value(inst.nu, g);
      ++duals;
      if (!d) continue;  // +inf dominates trivially
      worst = std::max(worst, primal - *d);
      if (!(*d - primal >= -1e-9)) ++failures;
    }
  }
  Matrix p(2, 2);
  p << 1, 0, 0, 1;
  const DiscreteMeasure two(p, Vector::Constant(2, 0.5));
  const double primal2 = solve_plan_lp(two, default_grid(two), s).value;
  const double dual2 = *dual_value(two, LinearMonotoneGraph(Matrix::Identity(1, 1)));
  if (!(std::abs(primal2 - 0.25) <= 1e-10) || !(std::abs(dual2 - 0.25) <= 1e-10)) ++failures;

  CriterionResult r;
  r.pass = failures == 0;
  r.metrics = {{"instances", 50}, {"dual_evaluations", duals}, {"failures", failures},
               {"max_primal_minus_dual", sig12(worst)}, {"two_point_primal", sig12(primal2)}, {"two_point_dual", sig12(dual2)}};
  r.detail = fmt("max primal - dual %.3g; two-point primal %.12g dual %.12g", worst, primal2, dual2);
  return r;
}

CriterionResult oracle_dominance() {
  const auto s = standard_matrix(1);
  double worst = -std::numeric_limits<double>::infinity();
  int failures = 0;
  for (const auto& inst : discrete_instances()) {
    const double lp = solve_plan_lp(inst.nu, inst.grid, s).value;
    const double oracle = partition_oracle(inst.nu, s).value;
    worst = std::max(worst, oracle - lp);
    if (!(lp >= oracle - 1e-9)) ++failures;
  }
  CriterionResult r;
  r.pass = failures == 0;
  r.metrics = {{"instances", 50}, {"failures", failures}, {"max_oracle_minus_lp", sig12(worst)}};
  r.detail = fmt("max oracle - LP %.3g", worst);
  return r;
}

CriterionResult uniform_approx() {
  gen::Rng rng(1008);
  const double eps[] = {1e-3, 1e-2, 1e-1, 1.0, 10.0};
  int multiset = 0, displacement = 0, dependence = 0;
  for (int t = 0; t < 100; ++t) {
    const auto s = gen::random_samples(20 + 7 * t, 1 + t % 3, 1 + (t / 3) % 3, 1 + t % 11, rng);
    const auto rep = verify_rearrangement(s, uniform_approximation(s, eps[t % 5]));
    multiset += !(rep.permutation && rep.multiset_equal);
    displacement += !rep.displacement_ok;
    dependence += !rep.functional;
  }
  CriterionResult r;
  r.pass = multiset + displacement + dependence == 0;
  r.metrics = {{"instances", 100}, {"multiset_violations", multiset}, {"displacement_violations", displacement},
               {"dependence_violations", dependence}};
  r.detail = fmt("violations: law %.0f, displacement %.0f, dependence %.0f", multiset, displacement, dependence);
  return r;
}

CriterionResult map_bound() {
  gen::Rng rng(1009);
  int failures = 0, warnings = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < 50; ++t) {
    const int m = 1 + t % 2;
    const auto s = gen::martingale_samples(100 + 10 * t, 2 * m, 3 + t, rng);
    for (double e : {0.01, 0.1, 1.0}) {
      const auto out = map_from_plan(s, e, standard_matrix(m));
      warnings += out.martingale_warning;
      worst = std::max(worst, out.value_gap - out.bound);
      if (!(out.value_gap <= out.bound + 1e-9)) ++failures;
    }
  }
  CriterionResult r;
  r.pass = failures == 0 && warnings == 0;
  r.metrics = {{"instances", 50}, {"epsilons", Json::array({0.01, 0.1, 1.0})}, {"failures", failures},
               {"martingale_warnings", warnings}, {"max_gap_minus_bound", sig12(worst)}};
  r.detail = fmt("max value_gap - bound %.3g", worst);
  return r;
}

const char* const kTitles[kCriteria] = {
    "Riccati correctness",       "scalar Kyle lambda",           "symmetric case iff",
    "Gaussian strong duality",   "equilibrium statistics",       "discrete weak duality",
    "partition-oracle dominance", "uniform approximation",       "plan-to-map value bound",
    "determinism and runtime",
};

CriterionResult run_one(int id, const Options& o) {
  const auto t0 = Clock::now();
  CriterionResult r;
  switch (id) {
    case 1: r = riccati_correctness(o); break;
    case 2: r = kyle_lambda(o); break;
    case 3: r = symmetric_case(o); break;
    case 4: r = gaussian_duality(o); break;
    case 5: r = equilibrium_statistics(o); break;
    case 6: r = weak_duality(); break;
    case 7: r = oracle_dominance(); break;
    case 8: r = uniform_approx(); break;
    case 9: r = map_bound(); break;
    default: break;
  }
  r.id = id;
  r.title = kTitles[id - 1];
  r.seconds = seconds_since(t0);
  return r;
}

// A criterion that throws fails; the message goes into the detail line.
CriterionResult guarded(int id, const Options& o) {
  try {
    return run_one(id, o);
  } catch (const std::exception& e) {
    CriterionResult r;
    r.id = id;
    r.title = kTitles[id - 1];
    r.pass = false;
    r.metrics = {{"error", e.what()}};
    r.detail = std::string("error: ") + e.what();
    return r;
  }
}

Json results_json(const std::vector<CriterionResult>& rs) {
  Json arr = Json::array();
  for (const auto& r : rs) arr.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"metrics", r.metrics}});
  return arr;
}

}  // namespace

bool Run::pass() const {
  return !results.empty() && std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.pass; });
}

Json Run::report() const {
  return {{"version", kVersion}, {"pass", pass()}, {"criteria", results_json(results)}};
}

Run run(const Options& opts, const std::function<void(const CriterionResult&)>& on_result) {
  const auto t0 = Clock::now();
  std::vector<int> ids = opts.criteria;
  if (ids.empty())
    for (int i = 1; i <= kCriteria; ++i) ids.push_back(i);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  const bool determinism = std::find(ids.begin(), ids.end(), kCriteria) != ids.end();
  std::vector<int> body(ids.begin(), ids.end());
  std::erase_if(body, [](int i) { return i < 1 || i >= kCriteria; });
  // Determinism alone still needs something to repeat.
  std::vector<int> repeat = body;
  if (repeat.empty())
    for (int i = 1; i < kCriteria; ++i) repeat.push_back(i);

  Run out;
  std::vector<CriterionResult> first;
  for (int id : repeat) {
    auto r = guarded(id, opts);
    if (std::find(body.begin(), body.end(), id) != body.end()) {
      if (on_result) on_result(r);
      out.results.push_back(r);
    }
    first.push_back(std::move(r));
  }

  if (determinism) {
    std::vector<CriterionResult> second;
    for (int id : repeat) second.push_back(guarded(id, opts));
    const bool identical = io::dump(results_json(first)) == io::dump(results_json(second));
    const double secs = seconds_since(t0);
    CriterionResult r;
    r.id = kCriteria;
    r.title = kTitles[kCriteria - 1];
    r.pass = identical && secs < 300.0;
    r.metrics = {{"repeated_criteria", repeat}, {"identical", identical}, {"runtime_under_5min", secs < 300.0}};
    r.detail = std::string(identical ? "two runs byte-identical" : "runs differ") + fmt(", total %.1f s", secs);
    r.seconds = secs;
    if (on_result) on_result(r);
    out.results.push_back(std::move(r));
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s %2d  %-28s %s  (%.2f s)", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str(),
                r.detail.c_str(), r.seconds);
  return buf;
}

}  // namespace bmot::acceptance
