#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "mri/discretize.hpp"

namespace mri::cli {

/// Malformed scenario document; the message carries source, line/column or
/// field name.
class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One plant/cost/experiment definition, read from a JSON document.
struct Scenario {
  std::string name;
  Matrix a;
  Matrix b;
  Matrix btilde;  // unscaled; see disturbance_scale
  Matrix q;
  std::optional<Matrix> ctilde;  // when given, Q = C̃ᵀC̃
  Matrix rc;
  Matrix ri;
  std::optional<double> period;
  int preview_horizon = 0;
  InputMode mode = InputMode::mri;
  std::optional<double> epsilon;
  bool saturate_nonnegative = false;
  int horizon_steps = 200;
  int substeps = 32;
  double disturbance_scale = 1.0;
  std::optional<Matrix> output_row;
  std::optional<Vector> x0;
};

Scenario parse_scenario(std::string_view json_text, std::string_view source = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);

/// Serializes with shortest round-trip number formatting.
std::string scenario_to_json(const Scenario& scenario);

/// Plant with B̃ multiplied by disturbance_scale.
ContinuousPlant make_plant(const Scenario& scenario);
CostWeights make_weights(const Scenario& scenario);

/// Output row for plotting: output_row, else C̃, else none.
std::optional<Matrix> plot_output(const Scenario& scenario);

}  // namespace mri::cli
