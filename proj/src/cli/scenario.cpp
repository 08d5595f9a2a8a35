#include "mri/cli/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mri::cli {
namespace {

using nlohmann::json;

[[noreturn]] void field_error(std::string_view source, std::string_view field,
                              const std::string& what) {
  throw ScenarioError(std::string(source) + ": field '" + std::string(field) + "': " + what);
}

Matrix to_matrix(const json& node, std::string_view source, std::string_view field) {
  if (node.is_number()) return Matrix::Constant(1, 1, node.get<double>());
  if (!node.is_array() || node.empty()) {
    field_error(source, field, "expected a number or a non-empty array of rows");
  }
  const std::size_t rows = node.size();
  std::size_t cols = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = node[r];
    if (!row.is_array() || row.empty()) {
      field_error(source, field, "row " + std::to_string(r) + " is not a non-empty array");
    }
    if (r == 0) cols = row.size();
    if (row.size() != cols) {
      field_error(source, field, "row " + std::to_string(r) + " has " +
                                     std::to_string(row.size()) + " entries, expected " +
                                     std::to_string(cols));
    }
  }
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const auto& v = node[r][c];
      if (!v.is_number()) {
        field_error(source, field,
                    "entry (" + std::to_string(r) + "," + std::to_string(c) + ") is not a number");
      }
      m(r, c) = v.get<double>();
    }
  }
  return m;
}

Vector to_vector(const json& node, std::string_view source, std::string_view field) {
  if (!node.is_array() || node.empty()) field_error(source, field, "expected a non-empty array");
  Vector v(node.size());
  for (std::size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_number()) field_error(source, field, "entries must be numbers");
    v[i] = node[i].get<double>();
  }
  return v;
}

json from_matrix(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename T>
T get_scalar(const json& doc, std::string_view source, const char* field, T fallback) {
  if (!doc.contains(field) || doc[field].is_null()) return fallback;
  const auto& node = doc[field];
  if constexpr (std::is_same_v<T, bool>) {
    if (!node.is_boolean()) field_error(source, field, "expected true or false");
  } else if constexpr (std::is_integral_v<T>) {
    if (!node.is_number_integer()) field_error(source, field, "expected an integer");
  } else {
    if (!node.is_number()) field_error(source, field, "expected a number");
  }
  return node.get<T>();
}

std::string locate(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

Scenario parse_scenario(std::string_view json_text, std::string_view source) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string(source) + ": " + locate(json_text, e.byte) +
                        ": invalid JSON (" + e.what() + ")");
  }
  if (!doc.is_object()) throw ScenarioError(std::string(source) + ": expected a JSON object");

  static const char* const kKnown[] = {
      "name",  "A",     "B",           "Btilde",        "Q",         "Ctilde",
      "Rc",    "Ri",    "T",           "N",             "mode",      "epsilon",
      "saturate_nonnegative", "horizon_steps", "substeps", "disturbance_scale", "output_row",
      "x0"};
  for (const auto& item : doc.items()) {
    if (std::find(std::begin(kKnown), std::end(kKnown), item.key()) == std::end(kKnown)) {
      field_error(source, item.key(), "unknown field");
    }
  }
  auto required = [&](const char* field) -> const json& {
    if (!doc.contains(field)) field_error(source, field, "missing required field");
    return doc[field];
  };

  Scenario s;
  s.name = doc.contains("name") && doc["name"].is_string() ? doc["name"].get<std::string>()
                                                           : std::string(source);
  s.a = to_matrix(required("A"), source, "A");
  s.b = to_matrix(required("B"), source, "B");
  s.btilde = doc.contains("Btilde") ? to_matrix(doc["Btilde"], source, "Btilde")
                                    : Matrix::Zero(s.a.rows(), 1);
  if (doc.contains("Ctilde")) {
    s.ctilde = to_matrix(doc["Ctilde"], source, "Ctilde");
    if (doc.contains("Q")) field_error(source, "Q", "give either Q or Ctilde, not both");
    if (s.ctilde->cols() != s.a.rows()) field_error(source, "Ctilde", "must have n columns");
    s.q = s.ctilde->transpose() * *s.ctilde;
  } else {
    s.q = to_matrix(required("Q"), source, "Q");
  }
  s.rc = to_matrix(required("Rc"), source, "Rc");
  s.ri = to_matrix(required("Ri"), source, "Ri");

  if (doc.contains("T") && !doc["T"].is_null()) s.period = get_scalar<double>(doc, source, "T", 0.0);
  s.preview_horizon = get_scalar<int>(doc, source, "N", 0);
  if (s.preview_horizon < 0) field_error(source, "N", "must be >= 0");
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string()) field_error(source, "mode", "expected a string");
    const auto mode = parse_input_mode(doc["mode"].get<std::string>());
    if (!mode) field_error(source, "mode", "expected regular, impulsive or mri");
    s.mode = *mode;
  }
  if (doc.contains("epsilon") && !doc["epsilon"].is_null()) {
    s.epsilon = get_scalar<double>(doc, source, "epsilon", 0.0);
  }
  s.saturate_nonnegative = get_scalar<bool>(doc, source, "saturate_nonnegative", false);
  s.horizon_steps = get_scalar<int>(doc, source, "horizon_steps", 200);
  s.substeps = get_scalar<int>(doc, source, "substeps", 32);
  if (s.horizon_steps < 1) field_error(source, "horizon_steps", "must be >= 1");
  if (s.substeps < 1) field_error(source, "substeps", "must be >= 1");
  s.disturbance_scale = get_scalar<double>(doc, source, "disturbance_scale", 1.0);
  if (doc.contains("output_row")) {
    s.output_row = to_matrix(doc["output_row"], source, "output_row");
    if (s.output_row->cols() != s.a.rows()) field_error(source, "output_row", "must have n columns");
  }
  if (doc.contains("x0")) {
    s.x0 = to_vector(doc["x0"], source, "x0");
    if (s.x0->size() != s.a.rows()) field_error(source, "x0", "must have n entries");
  }

  // Surface dimension and definiteness problems now, tagged with the source.
  try {
    make_weights(s).check_against(make_plant(s));
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string(source) + ": " + e.what());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

std::string scenario_to_json(const Scenario& s) {
  json doc;
  doc["name"] = s.name;
  doc["A"] = from_matrix(s.a);
  doc["B"] = from_matrix(s.b);
  doc["Btilde"] = from_matrix(s.btilde);
  if (s.ctilde) {
    doc["Ctilde"] = from_matrix(*s.ctilde);
  } else {
    doc["Q"] = from_matrix(s.q);
  }
  doc["Rc"] = from_matrix(s.rc);
  doc["Ri"] = from_matrix(s.ri);
  if (s.period) doc["T"] = *s.period;
  doc["N"] = s.preview_horizon;
  doc["mode"] = std::string(to_string(s.mode));
  if (s.epsilon) doc["epsilon"] = *s.epsilon;
  doc["saturate_nonnegative"] = s.saturate_nonnegative;
  doc["horizon_steps"] = s.horizon_steps;
  doc["substeps"] = s.substeps;
  doc["disturbance_scale"] = s.disturbance_scale;
  if (s.output_row) doc["output_row"] = from_matrix(*s.output_row);
  if (s.x0) doc["x0"] = std::vector<double>(s.x0->begin(), s.x0->end());
  return doc.dump(2);
}

ContinuousPlant make_plant(const Scenario& s) {
  return ContinuousPlant(s.a, s.b, s.btilde * s.disturbance_scale);
}

CostWeights make_weights(const Scenario& s) { return CostWeights(s.q, s.rc, s.ri); }

std::optional<Matrix> plot_output(const Scenario& s) {
  if (s.output_row) return s.output_row;
  return s.ctilde;
}

}  // namespace mri::cli
