// bmot: command-line front end.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bmot/acceptance.hpp"
#include "bmot/approx.hpp"
#include "bmot/discrete_mot.hpp"
#include "bmot/equilibrium.hpp"
#include "bmot/errors.hpp"
#include "bmot/io.hpp"
#include "bmot/scenario.hpp"
#include "bmot/version.hpp"

using namespace bmot;
using io::Json;

namespace {

void emit(const Json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << io::dump(j);
  } else {
    io::write_json(out, j);
  }
}

struct Args {
  std::string blocks, out, dump_samples, nu, grid, s = "standard:1", plan, graph, samples, scenario, method = "auto";
  std::int64_t n = 100000;
  std::uint64_t seed = 42;
  int max_n = 8;
  double epsilon = 0.1, tol = 1e-9;
  bool subsets = false, map = false;
  std::vector<int> criteria;
  std::string fault;
};

int cmd_riccati(const Args& a) {
  const auto blocks = io::blocks_from(io::read_json(a.blocks));
  RiccatiSolution sol;
  if (a.method == "subspace") {
    sol = solve_nare_newton(blocks, solve_nare_invariant_subspace(blocks));
  } else if (a.method == "newton") {
    sol = solve_nare_newton(blocks, lambda_symmetric(blocks));
  } else {
    sol = solve_nare(blocks);
  }
  emit(io::riccati_json(sol, blocks), a.out);
  return sol.residual_norm <= nare_tolerance(blocks) ? kExitOk : kExitContract;
}

int cmd_equilibrium_solve(const Args& a) {
  const auto eq = solve_gaussian(io::blocks_from(io::read_json(a.blocks)));
  emit(io::equilibrium_json(eq), a.out);
  return kExitOk;
}

int cmd_equilibrium_simulate(const Args& a) {
  if (a.n < 2) throw ValidationError("--n must be at least 2");
  const auto eq = solve_gaussian(io::blocks_from(io::read_json(a.blocks)));
  const auto rep = simulate(eq, a.n, a.seed);
  emit(io::simulation_json(rep), a.out);
  if (!a.dump_samples.empty()) io::write_samples_csv(a.dump_samples, draw_samples(eq, a.n, a.seed));
  return kExitOk;
}

int cmd_mot_solve(const Args& a) {
  const auto nu = io::measure_from(io::read_json(a.nu));
  const auto s = io::scalar_product_from(a.s);
  if (s.dim() != nu.dim()) throw ValidationError("--S and nu differ in dimension");
  Matrix grid = a.grid.empty() ? default_grid(nu, a.seed) : io::grid_from(io::read_json(a.grid));
  if (a.subsets) grid = merge_grids(grid, subset_barycenter_grid(nu));
  const auto plan = solve_plan_lp(nu, grid, s);
  emit(io::plan_json(plan, nu, s), a.out);
  return kExitOk;
}

int cmd_mot_certify(const Args& a) {
  const auto plan = io::plan_from(io::read_json(a.plan));
  const auto g = io::graph_from(io::read_json(a.graph));
  if (graph_dim(g) != plan.x_grid.cols()) throw ValidationError("graph and plan differ in dimension");
  const auto rep = certify_optimality(plan, g, a.tol);
  Json j = io::certificate_json(rep);
  j["tol"] = io::sig12(a.tol);
  emit(j, a.out);
  return rep.certified ? kExitOk : kExitContract;
}

int cmd_mot_oracle(const Args& a) {
  const auto nu = io::measure_from(io::read_json(a.nu));
  const auto s = io::scalar_product_from(a.s);
  if (s.dim() != nu.dim()) throw ValidationError("--S and nu differ in dimension");
  emit(io::partition_json(partition_oracle(nu, s, a.max_n)), a.out);
  return kExitOk;
}

int cmd_approx(const Args& a) {
  const auto samples = io::read_samples_csv(a.samples);
  const auto r = uniform_approximation(samples, a.epsilon);
  const auto rep = verify_rearrangement(samples, r);
  Json j = io::rearrangement_json(r, rep);
  bool ok = rep.ok();
  if (a.map) {
    const auto s = io::scalar_product_from(a.s);
    const auto out = map_from_plan(samples, a.epsilon, s);
    j["map"] = io::map_from_plan_json(out);
    if (out.martingale_warning) std::cerr << "warning: samples are not an empirical martingale\n";
    ok = ok && out.value_gap <= out.bound + 1e-9;
  }
  emit(j, a.out);
  return ok ? kExitOk : kExitContract;
}

int cmd_run(const Args& a) {
  const auto outcome = run_scenario_file(a.scenario);
  if (a.out.empty()) {
    std::cout << io::dump(outcome.report);
    std::cerr << outcome.summary;
  } else {
    io::write_json(a.out, outcome.report);
    std::cout << outcome.summary;
  }
  return outcome.pass() ? kExitOk : kExitContract;
}

int cmd_paper_check(const Args& a) {
  acceptance::Options opts;
  opts.criteria = a.criteria;
  if (!a.fault.empty() && a.fault != "nare-sign") throw ValidationError("unknown fault: " + a.fault);
  opts.inject_nare_sign_fault = a.fault == "nare-sign";
  const auto run = acceptance::run(opts, [](const acceptance::CriterionResult& r) {
    std::cout << acceptance::format_line(r) << std::endl;
  });
  if (!a.out.empty()) io::write_json(a.out, run.report());
  std::cout << (run.pass() ? "paper-check: all criteria pass" : "paper-check: FAILED") << std::endl;
  return run.pass() ? kExitOk : kExitContract;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Backward martingale transport and Gaussian insider equilibria"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Args a;
  int (*action)(const Args&) = nullptr;

  auto* ric = app.add_subcommand("riccati", "Solve the Riccati equation for covariance blocks");
  ric->add_option("--blocks", a.blocks, "blocks JSON")->required()->check(CLI::ExistingFile);
  ric->add_option("--method", a.method, "auto | newton | subspace")->check(CLI::IsMember({"auto", "newton", "subspace"}));
  ric->add_option("--out", a.out, "output JSON (default stdout)");
  ric->callback([&] { action = cmd_riccati; });

  auto* eq = app.add_subcommand("equilibrium", "Gaussian insider equilibrium");
  eq->require_subcommand(1);
  auto* eq_solve = eq->add_subcommand("solve", "Pricing matrix, order map and values");
  eq_solve->add_option("--blocks", a.blocks, "blocks JSON")->required()->check(CLI::ExistingFile);
  eq_solve->add_option("--out", a.out, "output JSON (default stdout)");
  eq_solve->callback([&] { action = cmd_equilibrium_solve; });
  auto* eq_sim = eq->add_subcommand("simulate", "Monte Carlo equilibrium statistics");
  eq_sim->add_option("--blocks", a.blocks, "blocks JSON")->required()->check(CLI::ExistingFile);
  eq_sim->add_option("--n", a.n, "number of samples")->capture_default_str();
  eq_sim->add_option("--seed", a.seed, "random seed")->capture_default_str();
  eq_sim->add_option("--out", a.out, "report JSON (default stdout)");
  eq_sim->add_option("--dump-samples", a.dump_samples, "write the samples as CSV");
  eq_sim->callback([&] { action = cmd_equilibrium_simulate; });

  auto* mot = app.add_subcommand("mot", "Discrete backward martingale plans");
  mot->require_subcommand(1);
  auto* mot_solve = mot->add_subcommand("solve", "Grid-restricted LP");
  mot_solve->add_option("--nu", a.nu, "measure JSON")->required()->check(CLI::ExistingFile);
  mot_solve->add_option("--grid", a.grid, "grid JSON (default: support, midpoints, k-means barycenters)")
      ->check(CLI::ExistingFile);
  mot_solve->add_flag("--subsets", a.subsets, "add every subset barycenter to the grid");
  mot_solve->add_option("--S", a.s, "standard:m or matrix JSON")->capture_default_str();
  mot_solve->add_option("--seed", a.seed, "k-means seed for the default grid")->capture_default_str();
  mot_solve->add_option("--out", a.out, "plan JSON (default stdout)");
  mot_solve->callback([&] { action = cmd_mot_solve; });
  auto* mot_cert = mot->add_subcommand("certify", "Check a plan against a monotone graph");
  mot_cert->add_option("--plan", a.plan, "plan JSON")->required()->check(CLI::ExistingFile);
  mot_cert->add_option("--G", a.graph, "graph JSON")->required()->check(CLI::ExistingFile);
  mot_cert->add_option("--tol", a.tol, "gap tolerance")->capture_default_str();
  mot_cert->add_option("--out", a.out, "report JSON (default stdout)");
  mot_cert->callback([&] { action = cmd_mot_certify; });
  auto* mot_oracle = mot->add_subcommand("oracle", "Exhaustive partition lower bound");
  mot_oracle->add_option("--nu", a.nu, "measure JSON")->required()->check(CLI::ExistingFile);
  mot_oracle->add_option("--max-n", a.max_n, "largest support size accepted")->capture_default_str();
  mot_oracle->add_option("--S", a.s, "standard:m or matrix JSON")->capture_default_str();
  mot_oracle->add_option("--out", a.out, "report JSON (default stdout)");
  mot_oracle->callback([&] { action = cmd_mot_oracle; });

  auto* apx = app.add_subcommand("approx", "Uniform approximation of a sample plan by a map");
  apx->add_option("--samples", a.samples, "CSV with columns x_1..x_dx,y_1..y_dy")->required()->check(CLI::ExistingFile);
  apx->add_option("--epsilon", a.epsilon, "cell diameter")->capture_default_str();
  apx->add_flag("--map", a.map, "also build the map from the plan and its value gap");
  apx->add_option("--S", a.s, "standard:m or matrix JSON, for --map")->capture_default_str();
  apx->add_option("--out", a.out, "rearrangement JSON (default stdout)");
  apx->callback([&] { action = cmd_approx; });

  auto* run = app.add_subcommand("run", "Run a scenario file");
  run->add_option("scenario", a.scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--out", a.out, "report JSON (default stdout, summary to stderr)");
  run->callback([&] { action = cmd_run; });

  auto* pc = app.add_subcommand("paper-check", "Run the acceptance suite");
  pc->add_option("--out", a.out, "report JSON");
  pc->add_option("--criteria", a.criteria, "subset of criteria 1..10")->delimiter(',')->check(CLI::Range(1, 10));
  pc->add_option("--inject-fault", a.fault, "mutation smoke test: nare-sign");
  pc->callback([&] { action = cmd_paper_check; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    return action(a);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
