#include "bmot/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "bmot/errors.hpp"
#include "bmot/version.hpp"

namespace bmot {

namespace {

using io::Json;

const std::map<std::string, double> kDefaultTolerances = {
    {"residual", -1.0},  // -1: 1e-10 (1 + ||Svv||_F)
    {"duality_rel", 1e-12},
    {"gap_se", 5.0},
    {"profit", 1e-10},
    {"lp", kTolLp},
    {"weak_duality", 1e-9},
    {"oracle", 1e-9},
    {"bound", 1e-9},
};

struct Context {
  std::uint64_t seed = 0;
  std::map<std::string, double> tol = kDefaultTolerances;
  std::vector<Contract> contracts;

  void check(std::string name, double value, double limit) {
    contracts.push_back({std::move(name), value, limit, value <= limit});
  }
};

const Json& need(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("scenario: missing \"") + key + "\"");
  return j[key];
}

std::int64_t integer(const Json& j, const char* what) {
  if (!j.is_number_integer()) throw ParseError(std::string(what) + ": expected an integer");
  return j.get<std::int64_t>();
}

double real(const Json& j, const char* what) {
  if (!j.is_number()) throw ParseError(std::string(what) + ": expected a number");
  return j.get<double>();
}

Json run_gaussian(const Json& payload, Context& ctx) {
  const auto blocks = io::blocks_from(need(payload, "blocks"));
  const auto eq = solve_gaussian(blocks);
  Json result = io::equilibrium_json(eq);
  result.erase("version");

  const double tol = ctx.tol["residual"] < 0 ? nare_tolerance(blocks) : ctx.tol["residual"];
  ctx.check("riccati_residual", eq.solution.residual_norm, tol);
  ctx.check("neg_min_eig_sym_part", -min_sym_eigenvalue(0.5 * (eq.a + eq.a.transpose())), 0.0);
  const auto pd = primal_dual_values(eq);
  ctx.check("primal_dual_relative_gap", std::abs(pd.primal - pd.dual) / std::max({std::abs(pd.primal), std::abs(pd.dual), 1e-300}),
            ctx.tol["duality_rel"]);

  if (payload.contains("n")) {
    const auto n = integer(payload["n"], "n");
    if (n < 2) throw ValidationError("n must be at least 2");
    const auto sim = simulate(eq, n, ctx.seed);
    Json sj = io::simulation_json(sim);
    sj.erase("version");
    result["simulation"] = sj;
    ctx.check("efficiency_gap_in_se", sim.efficiency_gap / sim.efficiency_se, ctx.tol["gap_se"]);
    ctx.check("independence_gap_in_se", sim.independence_gap / sim.independence_se, ctx.tol["gap_se"]);
    const auto samples = draw_samples(eq, std::min<std::int64_t>(n, 1000), ctx.seed);
    const double gain = profit_check(eq, samples, 100, 1.0, ctx.seed);
    result["profit_check"] = io::sig12(gain);
    ctx.check("profit_improvement", gain, ctx.tol["profit"]);
  }
  return result;
}

Json run_discrete(const Json& payload, Context& ctx) {
  const auto nu = io::measure_from(need(payload, "nu"));
  if (nu.dim() % 2 != 0) throw ValidationError("nu must live in even dimension 2m");
  const auto s = payload.contains("S") ? io::scalar_product_from(need(payload, "S").get<std::string>())
                                       : standard_matrix(static_cast<int>(nu.dim() / 2));
  if (s.dim() != nu.dim()) throw ValidationError("S and nu differ in dimension");
  Matrix grid;
  if (payload.contains("grid")) {
    grid = io::grid_from(payload["grid"]);
  } else {
    grid = default_grid(nu, ctx.seed);
    if (nu.size() <= 12) grid = merge_grids(grid, subset_barycenter_grid(nu));
  }
  const auto plan = solve_plan_lp(nu, grid, s);
  const auto res = plan_residuals(plan, nu);
  Json result = io::plan_json(plan, nu, s);
  result.erase("version");
  result["primal"] = io::sig12(plan.value);
  ctx.check("marginal_residual", res.marginal, ctx.tol["lp"]);
  ctx.check("barycenter_residual", res.barycenter, ctx.tol["lp"]);

  if (payload.contains("graph")) {
    const auto g = io::graph_from(payload["graph"]);
    if (graph_dim(g) != nu.dim()) throw ValidationError("graph and nu differ in dimension");
    const auto dual = dual_value(nu, g);
    result["dual"] = dual ? Json(io::sig12(*dual)) : Json("inf");
    if (dual) ctx.check("weak_duality_violation", plan.value - *dual, ctx.tol["weak_duality"]);
    const auto cert = certify_optimality(plan, g, ctx.tol["weak_duality"]);
    Json cj = io::certificate_json(cert);
    cj.erase("version");
    result["certificate"] = cj;
  }

  const bool want_oracle = payload.contains("oracle") ? payload["oracle"].get<bool>() : nu.size() <= 10;
  if (want_oracle) {
    const auto oracle = partition_oracle(nu, s);
    result["oracle"] = io::sig12(oracle.value);
    // Dominance is only guaranteed when the grid holds every block barycenter.
    bool covered = true;
    const int nblocks = *std::max_element(oracle.blocks.begin(), oracle.blocks.end()) + 1;
    for (int b = 0; b < nblocks && covered; ++b) {
      Vector bar = Vector::Zero(nu.dim());
      double mass = 0.0;
      for (Eigen::Index j = 0; j < nu.size(); ++j) {
        if (oracle.blocks[j] != b) continue;
        bar += nu.weights()(j) * nu.points().row(j).transpose();
        mass += nu.weights()(j);
      }
      if (mass <= 0.0) continue;
      bar /= mass;
      covered = ((grid.rowwise() - bar.transpose()).rowwise().norm().minCoeff() <= 1e-12 * (1.0 + bar.norm()));
    }
    result["oracle_grid_covered"] = covered;
    if (covered) ctx.check("oracle_dominance_violation", oracle.value - plan.value, ctx.tol["oracle"]);
  }
  return result;
}

Json run_approx(const Json& payload, const std::filesystem::path& base, Context& ctx) {
  const Json& src = need(payload, "samples");
  SampleSet samples = src.is_string()
                          ? io::read_samples_csv(base / src.get<std::string>())
                          : SampleSet(io::matrix_from(need(src, "x"), "x"), io::matrix_from(need(src, "y"), "y"));
  const double eps = real(need(payload, "epsilon"), "epsilon");
  const auto r = uniform_approximation(samples, eps);
  const auto rep = verify_rearrangement(samples, r);
  Json result = io::rearrangement_json(r, rep);
  result.erase("version");
  ctx.check("rearrangement_violations", rep.ok() ? 0.0 : 1.0, 0.0);

  const bool square = samples.dx() == samples.dy() && samples.dy() % 2 == 0;
  const bool want_map = payload.contains("map") ? payload["map"].get<bool>() : square;
  if (want_map) {
    if (!square) throw ValidationError("map_from_plan needs dx == dy == 2m");
    const auto s = payload.contains("S") ? io::scalar_product_from(payload["S"].get<std::string>())
                                         : standard_matrix(static_cast<int>(samples.dy() / 2));
    const auto out = map_from_plan(samples, eps, s);
    result["map"] = io::map_from_plan_json(out);
    ctx.check("value_gap_over_bound", out.value_gap - out.bound, ctx.tol["bound"]);
  }
  return result;
}

}  // namespace

bool ScenarioOutcome::pass() const {
  return std::all_of(contracts.begin(), contracts.end(), [](const Contract& c) { return c.pass; });
}

ScenarioOutcome run_scenario(const Json& doc, const std::filesystem::path& base_dir) {
  Context ctx;
  std::string kind;
  Json result;
  try {
    const Json& k = need(doc, "kind");
    if (!k.is_string()) throw ParseError("kind: expected a string");
    kind = k.get<std::string>();
    if (doc.contains("seed")) {
      const Json& sd = doc["seed"];
      if (!sd.is_number_unsigned() && !(sd.is_number_integer() && sd.get<std::int64_t>() >= 0))
        throw ParseError("seed: expected a nonnegative integer");
      ctx.seed = sd.get<std::uint64_t>();
    }
    if (doc.contains("tolerances")) {
      const Json& t = doc["tolerances"];
      if (!t.is_object()) throw ParseError("tolerances: expected an object");
      for (const auto& [key, val] : t.items()) {
        if (!ctx.tol.count(key)) throw ParseError("tolerances: unknown key \"" + key + "\"");
        ctx.tol[key] = real(val, key.c_str());
      }
    }
    const Json& payload = need(doc, "payload");
    if (kind == "gaussian") {
      result = run_gaussian(payload, ctx);
    } else if (kind == "discrete") {
      result = run_discrete(payload, ctx);
    } else if (kind == "approx") {
      result = run_approx(payload, base_dir, ctx);
    } else {
      throw ParseError("kind: expected gaussian, discrete or approx");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }

  ScenarioOutcome out;
  out.contracts = ctx.contracts;
  Json contracts = Json::array();
  std::ostringstream summary;
  summary << kVersion << "  scenario kind=" << kind << " seed=" << ctx.seed << "\n";
  for (const auto& c : out.contracts) {
    contracts.push_back(Json{{"name", c.name}, {"value", io::sig12(c.value)}, {"limit", io::sig12(c.limit)}, {"pass", c.pass}});
    char line[200];
    std::snprintf(line, sizeof line, "  %-4s %-32s %.6g <= %.6g\n", c.pass ? "ok" : "FAIL", c.name.c_str(), c.value, c.limit);
    summary << line;
  }
  summary << (out.pass() ? "all contracts pass\n" : "contract violation\n");
  out.summary = summary.str();
  out.report = Json{{"version", kVersion}, {"kind", kind}, {"seed", ctx.seed}, {"pass", out.pass()},
                    {"contracts", contracts}, {"result", result}};
  return out;
}

ScenarioOutcome run_scenario_file(const std::filesystem::path& path) {
  return run_scenario(io::read_json(path), path.parent_path());
}

}  // namespace bmot
