#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mri/cli/commands.hpp"
#include "mri/cli/scenario.hpp"
#include "mri/errors.hpp"

namespace {

using namespace mri;
using namespace mri::cli;

struct Common {
  std::string scenario;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--scenario", c.scenario, "scenario JSON file")->required();
  sub->add_option("--out", c.out, "output file (default: stdout)");
  sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

double require_period(const std::optional<double>& flag, const Scenario& s) {
  if (flag) return *flag;
  if (s.period) return *s.period;
  throw std::invalid_argument("no sampling period: pass --T or set \"T\" in the scenario");
}

template <class F>
int run_with_output(const Common& c, F&& body) {
  const Scenario scenario = load_scenario(c.scenario);
  const OutputFormat format = *parse_format(c.format);
  if (c.out.empty()) {
    body(scenario, format, std::cout);
    std::cout.flush();
    return 0;
  }
  std::ofstream file(c.out, std::ios::binary);
  if (!file) throw std::invalid_argument("cannot open output file '" + c.out + "'");
  body(scenario, format, file);
  return 0;
}

InputMode single_mode(const std::string& text) {
  const auto modes = parse_modes(text);
  if (modes.size() != 1) throw std::invalid_argument("this command takes a single --mode");
  return modes.front();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampled-data LQR and preview control with multi-rate impulsive inputs"};
  app.require_subcommand(1);

  Common c;
  std::optional<double> period;
  std::string mode_text = "mri";
  int digits = 17;
  double t_max = 10.0;
  int horizon = 0;
  std::string grid_text;
  std::string horizons_text = "0";
  std::optional<double> epsilon;
  bool open_loop = false;
  std::optional<int> steps;
  unsigned threads = 0;

  auto* disc = app.add_subcommand("discretize", "print the sampled model and cost matrices");
  add_common(disc, c);
  disc->add_option("--T", period, "sampling period");
  disc->add_option("--digits", digits, "significant digits")->check(CLI::Range(1, 17));

  auto* ctrl = app.add_subcommand("controllability", "candidate pathological periods");
  add_common(ctrl, c);
  ctrl->add_option("--T-max", t_max, "largest period to scan")->check(CLI::PositiveNumber);

  auto* lqr = app.add_subcommand("lqr", "solve the sampled Riccati equation");
  add_common(lqr, c);
  lqr->add_option("--T", period, "sampling period");
  lqr->add_option("--mode", mode_text, "regular, impulsive or mri");

  auto* prev = app.add_subcommand("preview", "preview controller for an impulse at step N");
  add_common(prev, c);
  prev->add_option("--T", period, "sampling period");
  prev->add_option("--N", horizon, "preview horizon")->check(CLI::NonNegativeNumber);
  prev->add_option("--mode", mode_text, "regular, impulsive or mri");

  auto* sweep = app.add_subcommand("sweep", "optimal cost over a period grid");
  add_common(sweep, c);
  sweep->add_option("--T-grid", grid_text, "start:step:stop")->required();
  sweep->add_option("--N", horizons_text, "horizons: 3, 0,1,2 or 0:4");
  sweep->add_option("--mode", mode_text, "regular, impulsive, mri or all");
  sweep->add_option("--threads", threads, "worker threads (0: all cores)");

  auto* sim = app.add_subcommand("simulate", "closed-loop trajectory on a dense time grid");
  add_common(sim, c);
  sim->add_option("--T", period, "sampling period");
  std::optional<int> sim_horizon;
  sim->add_option("--N", sim_horizon, "preview horizon")->check(CLI::NonNegativeNumber);
  std::optional<std::string> sim_mode;
  sim->add_option("--mode", sim_mode, "regular, impulsive or mri");
  sim->add_option("--eps", epsilon, "finite pulse width as a fraction of T")
      ->check(CLI::Range(0.0, 1.0));
  sim->add_flag("--open-loop", open_loop, "apply no control");
  sim->add_option("--steps", steps, "number of sampling intervals")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*disc) {
      return run_with_output(c, [&](const Scenario& s, OutputFormat f, std::ostream& out) {
        cmd_discretize(s, require_period(period, s), f, digits, out);
      });
    }
    if (*ctrl) {
      return run_with_output(c, [&](const Scenario& s, OutputFormat f, std::ostream& out) {
        cmd_controllability(s, t_max, f, out);
      });
    }
    if (*lqr) {
      return run_with_output(c, [&](const Scenario& s, OutputFormat f, std::ostream& out) {
        cmd_lqr(s, require_period(period, s), single_mode(mode_text), f, out);
      });
    }
    if (*prev) {
      return run_with_output(c, [&](const Scenario& s, OutputFormat f, std::ostream& out) {
        cmd_preview(s, require_period(period, s), horizon, single_mode(mode_text), f, out);
      });
    }
    if (*sweep) {
      return run_with_output(c, [&](const Scenario& s, OutputFormat f, std::ostream& out) {
        const auto rows = run_sweep(s, parse_grid(grid_text), parse_modes(mode_text),
                                    parse_int_list(horizons_text), threads);
        write_sweep(rows, f, out);
      });
    }
    if (*sim) {
      return run_with_output(c, [&](const Scenario& s, OutputFormat f, std::ostream& out) {
        SimulationRequest req = default_request(s);
        req.period = require_period(period, s);
        if (sim_horizon) req.preview_horizon = *sim_horizon;
        if (sim_mode) req.mode = single_mode(*sim_mode);
        if (epsilon) req.epsilon = epsilon;
        if (steps) req.steps = *steps;
        req.open_loop = open_loop;
        write_trajectory(s, simulate_scenario(s, req), f, out);
      });
    }
  } catch (const NumericalError& e) {
    std::cerr << "mrictl: numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "mrictl: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "mrictl: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
