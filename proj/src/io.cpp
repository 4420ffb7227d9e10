#include "qmctree/io.hpp"

#include <cstdlib>
#include <set>

#include "qmctree/error.hpp"

namespace qmctree::io {

namespace {

[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorCode::Schema, what); }

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) schema_error(where + ": expected an object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) schema_error(where + ": unknown field '" + item.key() + "'");
  }
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) schema_error(what + ": expected a number");
  return j.get<double>();
}

std::string label_string(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  schema_error("labels must be strings or integers");
}

Vector vector_from_json(const json& j) {
  if (!j.is_array() || j.empty()) schema_error("expected a nonempty vector");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = j[i].is_number() ? Complex(j[i].get<double>())
                                                       : complex_from_json(j[i]);
  }
  return v;
}

}  // namespace

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    schema_error("complex scalars are [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty()) {
    schema_error("matrices are nonempty arrays of rows");
  }
  const std::size_t cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) schema_error("ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_from_json(j[r][c]);
    }
  }
  return m;
}

json vertex_to_json(const Vertex& v) { return json(v.word); }

Vertex vertex_from_json(const json& j) {
  if (!j.is_array()) schema_error("vertices are integer arrays");
  Vertex v;
  for (const auto& x : j) {
    if (!x.is_number_integer()) schema_error("vertices are integer arrays");
    v.word.push_back(x.get<int>());
  }
  return v;
}

json observable_to_json(const ProductObservable& a) {
  json out = json::array();
  for (const auto& [v, m] : a.factors) {
    out.push_back({{"vertex", vertex_to_json(v)}, {"matrix", matrix_to_json(m)}});
  }
  return out;
}

ProductObservable observable_from_json(const json& j) {
  if (!j.is_array()) schema_error("observables are lists of {vertex, matrix}");
  ProductObservable a;
  for (const auto& item : j) {
    reject_unknown(item, {"vertex", "matrix"}, "observable factor");
    if (!item.contains("vertex") || !item.contains("matrix")) {
      schema_error("observable factor needs vertex and matrix");
    }
    a.set(vertex_from_json(item["vertex"]), matrix_from_json(item["matrix"]));
  }
  return a;
}

json tolerances_to_json(const Tolerances& tol) {
  return {{"psd_tol", tol.psd_tol},         {"zero_tol", tol.zero_tol},
          {"one_tol", tol.one_tol},         {"sqrt_tol", tol.sqrt_tol},
          {"trace_floor", tol.trace_floor}, {"level_cap", tol.level_cap},
          {"dense_cap", tol.dense_cap},     {"enumeration_cap", tol.enumeration_cap}};
}

Tolerances tolerances_from_json(const json& j, Tolerances base) {
  reject_unknown(j, {"psd_tol", "zero_tol", "one_tol", "sqrt_tol", "trace_floor", "level_cap",
                     "dense_cap", "enumeration_cap"},
                 "tolerances");
  auto real = [&](const char* key, double& field) {
    if (j.contains(key)) field = number(j[key], key);
  };
  auto count = [&](const char* key, std::size_t& field) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_unsigned()) schema_error(std::string(key) + ": expected a count");
    field = j[key].get<std::size_t>();
  };
  real("psd_tol", base.psd_tol);
  real("zero_tol", base.zero_tol);
  real("one_tol", base.one_tol);
  real("sqrt_tol", base.sqrt_tol);
  real("trace_floor", base.trace_floor);
  count("level_cap", base.level_cap);
  count("dense_cap", base.dense_cap);
  count("enumeration_cap", base.enumeration_cap);
  return base;
}

Tolerances apply_environment(Tolerances tol) {
  if (const char* env = std::getenv("QMC_TREE_TOLERANCE")) {
    char* end = nullptr;
    const double value = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(value > 0.0)) {
      schema_error("QMC_TREE_TOLERANCE must be a positive number");
    }
    tol.zero_tol = value;
  }
  return tol;
}

json walk_to_json(const WalkSpec& spec) {
  const std::size_t n = spec.num_labels();
  json b = json::object();
  json rho = json::object();
  for (std::size_t j = 0; j < n; ++j) {
    json row = json::object();
    for (std::size_t i = 0; i < n; ++i) {
      if (!spec.jump(j, i).isZero(0.0)) row[spec.labels[i]] = matrix_to_json(spec.jump(j, i));
    }
    b[spec.labels[j]] = std::move(row);
    rho[spec.labels[j]] = matrix_to_json(spec.initial_blocks[j]);
  }
  return {{"labels", spec.labels}, {"dim_internal", spec.dim_internal}, {"B", b}, {"rho", rho}};
}

namespace {

WalkSpec walk_fields(const json& j) {
  for (const char* key : {"labels", "dim_internal", "B", "rho"}) {
    if (!j.contains(key)) schema_error(std::string("missing field '") + key + "'");
  }
  if (!j["labels"].is_array() || j["labels"].empty()) schema_error("labels: nonempty array");
  std::vector<std::string> labels;
  for (const auto& l : j["labels"]) labels.push_back(label_string(l));
  if (std::set<std::string>(labels.begin(), labels.end()).size() != labels.size()) {
    schema_error("labels must be distinct");
  }
  if (!j["dim_internal"].is_number_unsigned() || j["dim_internal"].get<std::size_t>() == 0) {
    schema_error("dim_internal: positive integer");
  }
  WalkSpec spec = WalkSpec::zeros(labels, j["dim_internal"].get<std::size_t>());

  if (!j["B"].is_object()) schema_error("B: object keyed by source label");
  for (const auto& from : j["B"].items()) {
    const std::size_t jdx = spec.label_index(from.key());
    if (!from.value().is_object()) schema_error("B entries: object keyed by target label");
    for (const auto& to : from.value().items()) {
      spec.jump(jdx, spec.label_index(to.key())) = matrix_from_json(to.value());
    }
  }
  if (!j["rho"].is_object()) schema_error("rho: object keyed by label");
  for (const auto& block : j["rho"].items()) {
    spec.initial_blocks[spec.label_index(block.key())] = matrix_from_json(block.value());
  }
  spec.check_shapes();
  return spec;
}

}  // namespace

WalkSpec walk_from_json(const json& j) {
  reject_unknown(j, {"labels", "dim_internal", "B", "rho"}, "walk");
  return walk_fields(j);
}

RunConfig config_from_json(const json& j) {
  reject_unknown(j, {"labels", "dim_internal", "B", "rho", "omega0", "k", "tolerances",
                     "projections"},
                 "config");
  RunConfig config;
  config.walk = walk_fields(j);
  if (j.contains("k")) {
    if (!j["k"].is_number_integer() || j["k"].get<int>() < 1) schema_error("k: integer >= 1");
    config.k = j["k"].get<int>();
  }
  if (j.contains("tolerances")) config.tolerances = tolerances_from_json(j["tolerances"]);
  if (j.contains("omega0")) config.omega0 = matrix_from_json(j["omega0"]);
  if (j.contains("projections")) {
    if (!j["projections"].is_object()) schema_error("projections: object of named specs");
    for (const auto& item : j["projections"].items()) config.projections[item.key()] = item.value();
  }
  return config;
}

json config_to_json(const RunConfig& config) {
  json out = walk_to_json(config.walk);
  out["k"] = config.k;
  out["tolerances"] = tolerances_to_json(config.tolerances);
  if (config.omega0) out["omega0"] = matrix_to_json(*config.omega0);
  if (!config.projections.empty()) out["projections"] = config.projections;
  return out;
}

Projection projection_from_json(const json& j, const WalkSpec& walk) {
  const std::size_t n = walk.num_labels();
  if (j.is_array()) return Projection::from_matrix(matrix_from_json(j));
  reject_unknown(j, {"matrix", "eps", "z", "xi", "position", "complement"}, "projection");

  Matrix m;
  if (j.contains("matrix")) {
    m = matrix_from_json(j["matrix"]);
  } else if (j.contains("position")) {
    const std::size_t i = walk.label_index(label_string(j["position"]));
    m = kron(identity(walk.dim_internal), ket_bra(n, i, i));
  } else if (j.contains("eps")) {
    if (walk.dim_internal != 2) {
      throw Error(ErrorCode::DimensionMismatch, "(eps, z, xi) projections need dim_internal = 2");
    }
    const Complex z = j.contains("z") ? complex_from_json(j["z"]) : Complex(1.0);
    if (!j.contains("xi")) schema_error("projection: eps requires xi");
    const Vector xi = vector_from_json(j["xi"]);
    if (static_cast<std::size_t>(xi.size()) != n) {
      throw Error(ErrorCode::DimensionMismatch, "xi must have one entry per label");
    }
    m = kron(rank1_projection(number(j["eps"], "eps"), z).matrix(), vector_projector(xi));
  } else {
    schema_error("projection: need matrix, position or (eps, z, xi)");
  }
  Projection p = Projection::from_matrix(m);
  if (j.contains("complement")) {
    if (!j["complement"].is_boolean()) schema_error("complement: boolean");
    if (j["complement"].get<bool>()) p = p.complement();
  }
  return p;
}

json to_json(const ValidationReport& report) {
  return {{"passed", report.passed()},
          {"kraus_residuals", report.kraus_residuals},
          {"psd_residuals", report.psd_residuals},
          {"block_traces", report.block_traces},
          {"total_trace_residual", report.total_trace_residual},
          {"unit_trace_required", report.unit_trace_required},
          {"failures", report.failures}};
}

json to_json(const RecurrenceReport& report) {
  json out = {
      {"kind", report.kind == RecurrenceReport::Kind::Conditional ? "E" : "phi"},
      {"verdict", std::string(to_string(report.verdict))},
      {"criterion", std::string(to_string(report.criterion))},
      {"p", report.bound_p},
      {"psi_complement", report.psi_complement},
      {"residual_norm", report.residual_norm},
      {"ray_check", report.ray_check},
      {"tolerances", tolerances_to_json(report.tolerances)},
  };
  if (report.tail_limit.size() > 0) out["tail_limit"] = matrix_to_json(report.tail_limit);
  if (report.residual.size() > 0) out["residual"] = matrix_to_json(report.residual);
  if (report.kind == RecurrenceReport::Kind::State) {
    out["state_value"] = complex_to_json(report.state_value);
  }
  return out;
}

json to_json(const AccessibilityReport& report) {
  json steps = json::array();
  for (const auto& s : report.per_m) {
    json step = {{"m", s.m}, {"magnitude", s.magnitude}};
    if (report.kind == RecurrenceReport::Kind::State) step["value"] = complex_to_json(s.value);
    steps.push_back(std::move(step));
  }
  return {{"kind", report.kind == RecurrenceReport::Kind::Conditional ? "E" : "phi"},
          {"verdict", std::string(to_string(report.verdict))},
          {"per_m", steps},
          {"max_magnitude", report.max_magnitude},
          {"collapse_residual", report.collapse_residual},
          {"definition_check", report.definition_check},
          {"tolerances", tolerances_to_json(report.tolerances)}};
}

json to_json(const CompleteAccessibilityReport& report) {
  json out = {{"verdict", std::string(to_string(report.verdict))},
              {"magnitude", report.magnitude}};
  if (report.tail_limit.size() > 0) out["tail_limit"] = matrix_to_json(report.tail_limit);
  return out;
}

namespace {

RecurrenceReport::Kind kind_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "E") return RecurrenceReport::Kind::Conditional;
  if (kind == "phi") return RecurrenceReport::Kind::State;
  schema_error("kind: E or phi");
}

}  // namespace

RecurrenceReport recurrence_report_from_json(const json& j) {
  reject_unknown(j, {"kind", "verdict", "criterion", "p", "psi_complement", "residual_norm",
                     "ray_check", "tolerances", "tail_limit", "residual", "state_value"},
                 "recurrence report");
  try {
    RecurrenceReport r;
    r.kind = kind_from_json(j);
    r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    r.criterion = criterion_from_string(j.at("criterion").get<std::string>());
    r.bound_p = j.at("p").get<double>();
    r.psi_complement = j.at("psi_complement").get<std::vector<double>>();
    r.residual_norm = j.at("residual_norm").get<double>();
    r.ray_check = j.at("ray_check").get<double>();
    r.tolerances = tolerances_from_json(j.at("tolerances"));
    if (j.contains("tail_limit")) r.tail_limit = matrix_from_json(j["tail_limit"]);
    if (j.contains("residual")) r.residual = matrix_from_json(j["residual"]);
    if (j.contains("state_value")) r.state_value = complex_from_json(j["state_value"]);
    return r;
  } catch (const json::exception& e) {
    schema_error(std::string("recurrence report: ") + e.what());
  }
}

AccessibilityReport accessibility_report_from_json(const json& j) {
  reject_unknown(j, {"kind", "verdict", "per_m", "max_magnitude", "collapse_residual",
                     "definition_check", "tolerances"},
                 "accessibility report");
  try {
    AccessibilityReport r;
    r.kind = kind_from_json(j);
    r.verdict = reachability_from_string(j.at("verdict").get<std::string>());
    for (const auto& s : j.at("per_m")) {
      AccessibilityReport::Step step;
      step.m = s.at("m").get<std::size_t>();
      step.magnitude = s.at("magnitude").get<double>();
      if (s.contains("value")) step.value = complex_from_json(s["value"]);
      r.per_m.push_back(step);
    }
    r.max_magnitude = j.at("max_magnitude").get<double>();
    r.collapse_residual = j.at("collapse_residual").get<double>();
    r.definition_check = j.at("definition_check").get<double>();
    r.tolerances = tolerances_from_json(j.at("tolerances"));
    return r;
  } catch (const json::exception& e) {
    schema_error(std::string("accessibility report: ") + e.what());
  }
}

Verdict verdict_from_string(const std::string& s) {
  for (Verdict v : {Verdict::Recurrent, Verdict::NotRecurrent, Verdict::Inconclusive}) {
    if (to_string(v) == s) return v;
  }
  schema_error("unknown verdict '" + s + "'");
}

Criterion criterion_from_string(const std::string& s) {
  for (Criterion c : {Criterion::SufficientBound, Criterion::ExactTailLimit}) {
    if (to_string(c) == s) return c;
  }
  schema_error("unknown criterion '" + s + "'");
}

Reachability reachability_from_string(const std::string& s) {
  for (Reachability r :
       {Reachability::Accessible, Reachability::NotAccessible, Reachability::Inconclusive}) {
    if (to_string(r) == s) return r;
  }
  schema_error("unknown reachability '" + s + "'");
}

json error_to_json(const Error& e) {
  return {{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
}

}  // namespace qmctree::io
