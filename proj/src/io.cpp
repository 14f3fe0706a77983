#include "bmot/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string_view>
#include <vector>

#include "bmot/errors.hpp"
#include "bmot/version.hpp"

namespace bmot::io {

namespace {

Json num(double v) {
  if (std::isfinite(v)) return sig12(v);
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw ParseError("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field \"") + key + "\"");
  return *it;
}

double number_from(const Json& j, const char* what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  }
  throw ParseError(std::string(what) + ": expected a number");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

double sig12(double v) {
  if (!std::isfinite(v) || v == 0.0) return v == 0.0 ? 0.0 : v;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

Json matrix_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(num(m(i, c)));
    out.push_back(std::move(row));
  }
  return out;
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(num(v(i)));
  return out;
}

Matrix matrix_from(const Json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  if (!j[0].is_array()) throw ParseError(std::string(what) + ": expected an array of rows");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ParseError(std::string(what) + ": ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = number_from(row[static_cast<std::size_t>(c)], what);
  }
  return m;
}

Vector vector_from(const Json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number_from(j[i], what);
  return v;
}

Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  }
}

Json read_json(const std::filesystem::path& path) { return parse_json_text(read_text(path)); }

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << dump(j);
}

CovarianceBlocks blocks_from(const Json& j) {
  Matrix suu = matrix_from(field(j, "suu"), "suu");
  Matrix suv = matrix_from(field(j, "suv"), "suv");
  Matrix svv = matrix_from(field(j, "svv"), "svv");
  if (j.contains("m")) {
    const Json& m = j["m"];
    if (!m.is_number_integer()) throw ParseError("m: expected an integer");
    if (m.get<long>() != suu.rows()) throw ValidationError("m does not match the block sizes");
  }
  const auto m = suu.rows();
  if (m == 0 || suu.cols() != m || suv.rows() != m || suv.cols() != m || svv.rows() != m || svv.cols() != m)
    throw ValidationError("covariance blocks must all be m x m with m >= 1");
  return CovarianceBlocks(std::move(suu), std::move(suv), std::move(svv));
}

Json blocks_json(const CovarianceBlocks& b) {
  return Json{{"m", b.m()}, {"suu", matrix_json(b.suu())}, {"suv", matrix_json(b.suv())}, {"svv", matrix_json(b.svv())}};
}

DiscreteMeasure measure_from(const Json& j) {
  Matrix pts = matrix_from(field(j, "points"), "points");
  Vector w = vector_from(field(j, "weights"), "weights");
  if (pts.rows() == 0) throw ValidationError("measure has no points");
  if (w.size() != pts.rows()) throw ValidationError("points and weights differ in length");
  return DiscreteMeasure(std::move(pts), std::move(w));
}

Json measure_json(const DiscreteMeasure& nu) {
  return Json{{"points", matrix_json(nu.points())}, {"weights", vector_json(nu.weights())}};
}

Matrix grid_from(const Json& j) {
  if (j.is_array()) return matrix_from(j, "grid");
  return matrix_from(field(j, "points"), "grid");
}

MonotoneGraph graph_from(const Json& j) {
  const Json* bp = nullptr;
  std::optional<double> left, right;
  if (j.is_array()) {
    bp = &j;
  } else {
    const Json& kind = field(j, "kind");
    if (!kind.is_string()) throw ParseError("kind: expected a string");
    if (kind == "linear") {
      Matrix a = matrix_from(field(j, "A"), "A");
      if (a.rows() == 0 || a.rows() != a.cols()) throw ValidationError("A must be square and nonempty");
      return LinearMonotoneGraph(std::move(a));
    }
    if (kind != "piecewise") throw ParseError("kind: expected \"linear\" or \"piecewise\"");
    bp = &field(j, "breakpoints");
    if (j.contains("left_slope")) left = number_from(j["left_slope"], "left_slope");
    if (j.contains("right_slope")) right = number_from(j["right_slope"], "right_slope");
  }
  const Matrix pts = matrix_from(*bp, "breakpoints");
  if (pts.rows() > 0 && pts.cols() != 2) throw ValidationError("breakpoints must be pairs (r, v)");
  std::vector<Eigen::Vector2d> points;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) points.emplace_back(pts(i, 0), pts(i, 1));
  return PiecewiseMonotoneGraph(std::move(points), left, right);
}

Json graph_json(const MonotoneGraph& g) {
  if (const auto* lin = std::get_if<LinearMonotoneGraph>(&g)) return Json{{"kind", "linear"}, {"A", matrix_json(lin->a())}};
  const auto& pw = std::get<PiecewiseMonotoneGraph>(g);
  Json bp = Json::array();
  for (const auto& p : pw.breakpoints()) bp.push_back(Json::array({num(p.x()), num(p.y())}));
  return Json{{"kind", "piecewise"}, {"breakpoints", bp}, {"left_slope", num(pw.left_slope())},
              {"right_slope", num(pw.right_slope())}};
}

ScalarProductMatrix scalar_product_from(const std::string& text) {
  constexpr std::string_view prefix = "standard:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string rest = text.substr(prefix.size());
    char* end = nullptr;
    const long m = std::strtol(rest.c_str(), &end, 10);
    if (rest.empty() || *end != '\0') throw ParseError("bad scalar product: " + text);
    if (m < 1 || m > 1000) throw ValidationError("standard:m needs m >= 1");
    return standard_matrix(static_cast<int>(m));
  }
  const Json j = read_json(text);
  return ScalarProductMatrix(matrix_from(j.is_object() ? field(j, "S") : j, "S"));
}

Json plan_json(const PlanMatrix& plan, const DiscreteMeasure& nu, const ScalarProductMatrix& s) {
  const auto r = plan_residuals(plan, nu);
  return Json{{"version", kVersion},
              {"value", num(plan.value)},
              {"S", matrix_json(s.entries())},
              {"nu", measure_json(nu)},
              {"x_grid", matrix_json(plan.x_grid)},
              {"y_points", matrix_json(plan.y_points)},
              {"gamma", matrix_json(plan.gamma)},
              {"residuals", {{"marginal", num(r.marginal)}, {"barycenter", num(r.barycenter)}, {"min_entry", num(r.min_entry)}}}};
}

PlanMatrix plan_from(const Json& j) {
  PlanMatrix p;
  p.x_grid = matrix_from(field(j, "x_grid"), "x_grid");
  p.gamma = matrix_from(field(j, "gamma"), "gamma");
  p.y_points = j.contains("y_points") ? matrix_from(j["y_points"], "y_points")
                                      : matrix_from(field(field(j, "nu"), "points"), "nu.points");
  if (j.contains("value")) p.value = number_from(j["value"], "value");
  if (p.gamma.rows() != p.x_grid.rows() || p.gamma.cols() != p.y_points.rows() ||
      p.x_grid.cols() != p.y_points.cols())
    throw ValidationError("plan: gamma, x_grid and y_points sizes disagree");
  return p;
}

Json riccati_json(const RiccatiSolution& sol, const CovarianceBlocks& blocks) {
  Json trace = Json::array();
  for (double r : sol.residual_trace) trace.push_back(num(r));
  const Matrix sym = 0.5 * (sol.a + sol.a.transpose());
  return Json{{"version", kVersion},
              {"blocks", blocks_json(blocks)},
              {"A", matrix_json(sol.a)},
              {"residual_norm", num(sol.residual_norm)},
              {"tolerance", num(nare_tolerance(blocks))},
              {"min_eig_sym_part", num(min_sym_eigenvalue(sym))},
              {"iterations", sol.iterations},
              {"symmetric_case", sol.symmetric_case},
              {"residual_trace", trace}};
}

Json equilibrium_json(const GaussianEquilibrium& eq) {
  const auto pd = primal_dual_values(eq);
  Json j = riccati_json(eq.solution, eq.blocks);
  j["order_map"] = matrix_json(eq.order_map());
  j["optimal_map"] = matrix_json(eq.optimal_map());
  j["primal"] = num(pd.primal);
  j["dual"] = num(pd.dual);
  return j;
}

Json simulation_json(const SimulationReport& r) {
  return Json{{"version", kVersion},
              {"n_samples", r.n_samples},
              {"seed", r.seed},
              {"efficiency_gap", num(r.efficiency_gap)},
              {"efficiency_se", num(r.efficiency_se)},
              {"independence_gap", num(r.independence_gap)},
              {"independence_se", num(r.independence_se)},
              {"mean_profit", num(r.mean_profit)},
              {"primal_mc", num(r.primal_mc)},
              {"primal_mc_se", num(r.primal_mc_se)},
              {"dual_mc", num(r.dual_mc)},
              {"dual_mc_se", num(r.dual_mc_se)},
              {"primal_exact", num(r.primal_exact)},
              {"dual_exact", num(r.dual_exact)},
              {"martingale_mc", num(r.martingale_mc)},
              {"martingale_se", num(r.martingale_se)}};
}

Json certificate_json(const CertificateReport& r) {
  return Json{{"version", kVersion},
              {"certified", r.certified},
              {"max_gap", num(r.max_gap)},
              {"worst_x", r.worst_x},
              {"worst_y", r.worst_y},
              {"pairs_checked", r.pairs_checked}};
}

Json partition_json(const PartitionResult& r) {
  return Json{{"version", kVersion}, {"value", num(r.value)}, {"blocks", r.blocks}, {"partitions", r.partitions}};
}

Json rearrangement_json(const Rearrangement& r, const RearrangementReport& rep) {
  Json dep = Json::array();
  for (const auto& [a, b] : rep.dependence_offenders) dep.push_back(Json::array({a, b}));
  return Json{{"version", kVersion},
              {"epsilon", num(r.epsilon)},
              {"perm", r.perm},
              {"cells", r.cells},
              {"checks",
               {{"ok", rep.ok()},
                {"permutation", rep.permutation},
                {"multiset_equal", rep.multiset_equal},
                {"max_displacement", num(rep.max_displacement)},
                {"displacement_ok", rep.displacement_ok},
                {"functional", rep.functional},
                {"displacement_offenders", rep.displacement_offenders},
                {"dependence_offenders", dep},
                {"multiset_offenders", rep.multiset_offenders}}}};
}

Json map_from_plan_json(const MapFromPlan& out) {
  return Json{{"value_gap", num(out.value_gap)},
              {"bound", num(out.bound)},
              {"martingale_residual", num(out.martingale_residual)},
              {"martingale_warning", out.martingale_warning},
              {"U", matrix_json(out.u)}};
}

void write_samples_csv(const std::filesystem::path& path, const SampleSet& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  for (Eigen::Index c = 0; c < s.dx(); ++c) out << (c ? "," : "") << "x_" << c + 1;
  for (Eigen::Index c = 0; c < s.dy(); ++c) out << ",y_" << c + 1;
  out << "\n";
  char buf[40];
  for (Eigen::Index i = 0; i < s.n(); ++i) {
    for (Eigen::Index c = 0; c < s.dx() + s.dy(); ++c) {
      const double v = c < s.dx() ? s.x()(i, c) : s.y()(i, c - s.dx());
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << (c ? "," : "") << buf;
    }
    out << "\n";
  }
}

SampleSet read_samples_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
  auto split = [](const std::string& l) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ls(l);
    while (std::getline(ls, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
      out.push_back(cell);
    }
    return out;
  };
  const auto header = split(line);
  int dx = 0, dy = 0;
  for (const auto& h : header) {
    if (h == "x_" + std::to_string(dx + 1) && dy == 0) {
      ++dx;
    } else if (h == "y_" + std::to_string(dy + 1)) {
      ++dy;
    } else {
      throw ParseError(path.string() + ": header must be x_1..x_dx,y_1..y_dy");
    }
  }
  if (dx == 0 || dy == 0) throw ParseError(path.string() + ": need at least one x and one y column");

  std::vector<double> vals;
  long rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    if (static_cast<int>(cells.size()) != dx + dy)
      throw ParseError(path.string() + ": row " + std::to_string(rows + 1) + " has the wrong column count");
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (c.empty() || *end != '\0') throw ParseError(path.string() + ": bad number \"" + c + "\"");
      vals.push_back(v);
    }
    ++rows;
  }
  Matrix x(rows, dx), y(rows, dy);
  for (long i = 0; i < rows; ++i) {
    for (int c = 0; c < dx; ++c) x(i, c) = vals[static_cast<std::size_t>(i * (dx + dy) + c)];
    for (int c = 0; c < dy; ++c) y(i, c) = vals[static_cast<std::size_t>(i * (dx + dy) + dx + c)];
  }
  return SampleSet(std::move(x), std::move(y));
}

}  // namespace bmot::io
