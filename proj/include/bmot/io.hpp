#pragma once

// JSON documents for the command-line tool and CSV sample dumps.
//
// Every numeric field of a written report goes through sig12(). Malformed
// documents raise ParseError; well-formed documents with invalid contents
// raise ValidationError from the owning constructor.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "bmot/approx.hpp"
#include "bmot/discrete_mot.hpp"
#include "bmot/equilibrium.hpp"
#include "bmot/riccati.hpp"
#include "bmot/samples.hpp"
#include "bmot/sspace.hpp"

namespace bmot::io {

using Json = nlohmann::ordered_json;

/// Rounds to 12 significant digits.
double sig12(double v);

Json matrix_json(const Matrix& m);
Json vector_json(const Vector& v);
Matrix matrix_from(const Json& j, const char* what);
Vector vector_from(const Json& j, const char* what);

Json read_json(const std::filesystem::path& path);
Json parse_json_text(const std::string& text);
/// Pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);
std::string dump(const Json& j);

/// {"m":..., "suu":[[...]], "suv":[[...]], "svv":[[...]]}
CovarianceBlocks blocks_from(const Json& j);
Json blocks_json(const CovarianceBlocks& b);

/// {"points":[[...]], "weights":[...]}
DiscreteMeasure measure_from(const Json& j);
Json measure_json(const DiscreteMeasure& nu);

/// Either a bare array of rows or {"points":[[...]]}.
Matrix grid_from(const Json& j);

/// {"kind":"linear","A":[[...]]} or {"kind":"piecewise","breakpoints":[[r,v],...],
/// "left_slope":s,"right_slope":s} with s a number or "inf"; a bare array is
/// read as piecewise breakpoints.
MonotoneGraph graph_from(const Json& j);
Json graph_json(const MonotoneGraph& g);

/// "standard:m" or a path to a JSON matrix.
ScalarProductMatrix scalar_product_from(const std::string& text);

/// Plan with its measure, so that it can be certified later.
Json plan_json(const PlanMatrix& plan, const DiscreteMeasure& nu, const ScalarProductMatrix& s);
PlanMatrix plan_from(const Json& j);

Json riccati_json(const RiccatiSolution& sol, const CovarianceBlocks& blocks);
Json equilibrium_json(const GaussianEquilibrium& eq);
Json simulation_json(const SimulationReport& r);
Json certificate_json(const CertificateReport& r);
Json partition_json(const PartitionResult& r);
Json rearrangement_json(const Rearrangement& r, const RearrangementReport& rep);
Json map_from_plan_json(const MapFromPlan& out);

/// Header x_1..x_dx,y_1..y_dy, values with round-trip precision.
void write_samples_csv(const std::filesystem::path& path, const SampleSet& s);
/// dx, dy are read from the header.
SampleSet read_samples_csv(const std::filesystem::path& path);

}  // namespace bmot::io
