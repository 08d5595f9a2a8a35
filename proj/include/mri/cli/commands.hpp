#pragma once

#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "mri/cli/scenario.hpp"
#include "mri/simulate.hpp"

namespace mri::cli {

enum class OutputFormat { csv, json };

std::optional<OutputFormat> parse_format(std::string_view text);

/// "start:step:stop", inclusive of stop up to rounding.
std::vector<double> parse_grid(std::string_view text);

/// "3", "0,1,2" or "0:4".
std::vector<int> parse_int_list(std::string_view text);

/// "regular", "impulsive", "mri" or "all".
std::vector<InputMode> parse_modes(std::string_view text);

void cmd_discretize(const Scenario& scenario, double period, OutputFormat format, int digits,
                    std::ostream& out);

void cmd_controllability(const Scenario& scenario, double horizon, OutputFormat format,
                         std::ostream& out);

void cmd_lqr(const Scenario& scenario, double period, InputMode mode, OutputFormat format,
             std::ostream& out);

void cmd_preview(const Scenario& scenario, double period, int horizon, InputMode mode,
                 OutputFormat format, std::ostream& out);

struct SweepRow {
  double period = 0.0;
  InputMode mode = InputMode::mri;
  int horizon = 0;
  double cost = 0.0;
  bool converged = false;
  long iterations = 0;
};

/// One row per (T, mode, N), in that nesting order. Cost is Σ over B̃
/// columns of the preview optimum (B̃ᵀPB̃ when N = 0). Grid points run in
/// parallel; output order does not depend on scheduling.
std::vector<SweepRow> run_sweep(const Scenario& scenario, const std::vector<double>& grid,
                                const std::vector<InputMode>& modes,
                                const std::vector<int>& horizons, unsigned threads = 0);

void write_sweep(const std::vector<SweepRow>& rows, OutputFormat format, std::ostream& out);

struct SimulationRequest {
  double period = 1.0;
  int preview_horizon = 0;
  InputMode mode = InputMode::mri;
  std::optional<double> epsilon;
  bool open_loop = false;
  bool saturate_nonnegative = false;
  int steps = 200;
  int substeps = 32;
};

/// Request populated from the scenario's own fields.
SimulationRequest default_request(const Scenario& scenario);

/// Disturbance (first B̃ column, scaled) at step N; preview law for k < N,
/// LQR feedback afterwards; zero policy when open_loop.
Trajectory simulate_scenario(const Scenario& scenario, const SimulationRequest& request);

void write_trajectory(const Scenario& scenario, const Trajectory& traj, OutputFormat format,
                      std::ostream& out);

}  // namespace mri::cli
