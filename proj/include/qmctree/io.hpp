#pragma once

#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "qmctree/error.hpp"
#include "qmctree/opalg.hpp"
#include "qmctree/oqrw.hpp"
#include "qmctree/qmc.hpp"
#include "qmctree/recurrence.hpp"
#include "qmctree/tolerances.hpp"
#include "qmctree/treegeo.hpp"

// JSON encodings. Complex scalars are [re, im]; matrices are arrays of rows of
// complex scalars; vertices are integer arrays with the root as []. Malformed
// documents raise Error(Schema).
namespace qmctree::io {

using json = nlohmann::json;

json complex_to_json(Complex z);
Complex complex_from_json(const json& j);

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);

json vertex_to_json(const Vertex& v);
Vertex vertex_from_json(const json& j);

json observable_to_json(const ProductObservable& a);
ProductObservable observable_from_json(const json& j);

json tolerances_to_json(const Tolerances& tol);
/// Only the keys present override the defaults; unknown keys are rejected.
Tolerances tolerances_from_json(const json& j, Tolerances base = {});
/// QMC_TREE_TOLERANCE, when set, replaces zero_tol.
Tolerances apply_environment(Tolerances tol);

json walk_to_json(const WalkSpec& spec);
/// {"labels", "dim_internal", "B": {j: {i: matrix}}, "rho": {j: matrix}}.
/// Transitions missing from "B" are zero.
WalkSpec walk_from_json(const json& j);

/// A walk document plus the analysis parameters of a run.
struct RunConfig {
  WalkSpec walk;
  int k = 2;
  Tolerances tolerances;
  std::optional<Matrix> omega0;
  /// Named projection specifications, resolved on use.
  std::map<std::string, json> projections;
};

/// Top-level keys: labels, dim_internal, B, rho, omega0, k, tolerances,
/// projections. Anything else is a schema error.
RunConfig config_from_json(const json& j);
json config_to_json(const RunConfig& config);

/// A projection is either a matrix, or an object with one of
///   "matrix": [[...]]
///   "eps", "z", "xi"            p(eps, z) (x) |xi><xi| (two-dimensional H)
///   "position": label            1_H (x) |label><label|
/// and an optional "complement": true.
Projection projection_from_json(const json& j, const WalkSpec& walk);

json to_json(const ValidationReport& report);
json to_json(const RecurrenceReport& report);
json to_json(const AccessibilityReport& report);
json to_json(const CompleteAccessibilityReport& report);

RecurrenceReport recurrence_report_from_json(const json& j);
AccessibilityReport accessibility_report_from_json(const json& j);

Verdict verdict_from_string(const std::string& s);
Criterion criterion_from_string(const std::string& s);
Reachability reachability_from_string(const std::string& s);

json error_to_json(const Error& e);

}  // namespace qmctree::io
