#include "mri/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "mri/cli/csv.hpp"
#include "mri/controllability.hpp"
#include "mri/preview.hpp"
#include "mri/riccati.hpp"

namespace mri::cli {
namespace {

using nlohmann::json;

json matrix_json(const Matrix& m, int digits) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      if (std::isfinite(v)) {
        row.push_back(parse_number(format_number(v, digits)));
      } else {
        row.push_back(format_number(v, digits));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

/// Named matrices emitted either as tidy CSV rows or as one JSON object.
class MatrixReport {
 public:
  explicit MatrixReport(int digits) : digits_(digits) {}
  void add(std::string name, Matrix m) { items_.emplace_back(std::move(name), std::move(m)); }
  void write(OutputFormat format, std::ostream& out) const {
    if (format == OutputFormat::csv) {
      out << kMatrixCsvHeader << '\n';
      for (const auto& [name, m] : items_) write_matrix_rows(out, name, m, digits_);
    } else {
      json doc = json::object();
      for (const auto& [name, m] : items_) doc[name] = matrix_json(m, digits_);
      out << doc.dump(2) << '\n';
    }
  }

 private:
  int digits_;
  std::vector<std::pair<std::string, Matrix>> items_;
};

constexpr int kReportDigits = 12;

double sum_column_costs(const Matrix& p, const Matrix& btilde) {
  double total = 0.0;
  for (Eigen::Index c = 0; c < btilde.cols(); ++c) total += btilde.col(c).dot(p * btilde.col(c));
  return total;
}

std::vector<SweepRow> sweep_point(const ContinuousPlant& plant, const CostWeights& weights,
                                  double period, InputMode mode,
                                  const std::vector<int>& horizons) {
  const SampledModel model = sample_plant(plant, period);
  const SampledCost cost = cost_matrices(plant, weights, period);
  const InputSelection sel = restrict_input_mode(model, cost, mode);

  Matrix p;
  Matrix k;
  bool converged = false;
  long iterations = 0;
  try {
    auto sol = solve_dare(model.ad, sel.b, cost.qd, sel.s, sel.r);
    p = std::move(sol.p);
    k = std::move(sol.k);
    converged = sol.converged;
    iterations = sol.iterations;
  } catch (const DivergentRiccati& e) {
    p = e.last_iterate;
    iterations = e.iterations;
    try {
      k = mri_gains(p, model.ad, sel.b, sel.s, sel.r);
    } catch (const NumericalError&) {
    }
  }

  std::vector<SweepRow> rows;
  for (const int horizon : horizons) {
    SweepRow row{period, mode, horizon, 0.0, converged, iterations};
    if (horizon == 0) {
      row.cost = sum_column_costs(p, plant.btilde());
    } else if (k.size() == 0) {
      row.cost = std::numeric_limits<double>::infinity();
    } else {
      try {
        const Matrix g = closed_loop_G(model.ad, sel.b, sel.s, sel.r, p, k).g;
        for (Eigen::Index c = 0; c < plant.disturbances(); ++c) {
          row.cost += gamma_and_cost(p, g, sel.b, sel.r, plant.btilde().col(c), horizon).cost;
        }
      } catch (const NumericalError&) {
        row.cost = std::numeric_limits<double>::infinity();
      }
    }
    rows.push_back(row);
  }
  return rows;
}

std::string_view event_name(SampleEvent e) {
  switch (e) {
    case SampleEvent::none:
      return "";
    case SampleEvent::disturbance:
      return "disturbance";
    case SampleEvent::impulse:
      return "impulse";
  }
  return "";
}

}  // namespace

std::optional<OutputFormat> parse_format(std::string_view text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  return std::nullopt;
}

std::vector<double> parse_grid(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ':') {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  if (parts.size() != 3) throw std::invalid_argument("grid must be start:step:stop");
  const double first = parse_number(parts[0]);
  const double step = parse_number(parts[1]);
  const double last = parse_number(parts[2]);
  if (!(step > 0.0) || !(first > 0.0) || last < first || !std::isfinite(last)) {
    throw std::invalid_argument("grid needs 0 < start <= stop and step > 0");
  }
  const long count = static_cast<long>(std::floor((last - first) / step + 1e-9)) + 1;
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) grid.push_back(first + i * step);
  return grid;
}

std::vector<int> parse_int_list(std::string_view text) {
  auto to_int = [](std::string_view s) {
    const double v = parse_number(s);
    if (v != std::floor(v) || v < 0) throw std::invalid_argument("expected a non-negative integer");
    return static_cast<int>(v);
  };
  std::vector<int> out;
  if (const auto colon = text.find(':'); colon != std::string_view::npos) {
    const int lo = to_int(text.substr(0, colon));
    const int hi = to_int(text.substr(colon + 1));
    if (hi < lo) throw std::invalid_argument("empty integer range");
    for (int i = lo; i <= hi; ++i) out.push_back(i);
    return out;
  }
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ',') {
      out.push_back(to_int(text.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

std::vector<InputMode> parse_modes(std::string_view text) {
  if (text == "all") return {InputMode::regular, InputMode::impulsive, InputMode::mri};
  std::vector<InputMode> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i < text.size() && text[i] != ',') continue;
    const auto mode = parse_input_mode(text.substr(start, i - start));
    if (!mode) throw std::invalid_argument("mode must be regular, impulsive, mri, all or a comma list");
    if (std::find(out.begin(), out.end(), *mode) == out.end()) out.push_back(*mode);
    start = i + 1;
  }
  return out;
}

void cmd_discretize(const Scenario& scenario, double period, OutputFormat format, int digits,
                    std::ostream& out) {
  const auto plant = make_plant(scenario);
  const auto weights = make_weights(scenario);
  const auto model = sample_plant(plant, period);
  const auto cost = cost_matrices(plant, weights, period);
  MatrixReport report(digits);
  report.add("T", scalar(period));
  report.add("Ad", model.ad);
  report.add("Atilde", model.atilde);
  report.add("Bd", model.bd);
  report.add("Bi", model.bi);
  report.add("Qd", cost.qd);
  report.add("Sd", cost.sd);
  report.add("Rd", cost.rd);
  report.write(format, out);
}

void cmd_controllability(const Scenario& scenario, double horizon, OutputFormat format,
                         std::ostream& out) {
  const auto plant = make_plant(scenario);
  if (!kalman_controllable(plant.a(), plant.b())) {
    throw HypothesisViolation("the continuous pair (A, B) of '" + scenario.name +
                              "' is not controllable");
  }
  const auto candidates = candidate_pathological_periods(plant.a(), horizon);

  struct Row {
    CandidatePeriod c;
    bool regular, impulsive, mri;
    double margin;
  };
  std::vector<Row> rows;
  for (const auto& c : candidates) {
    const auto hautus = reduced_hautus_mri(plant, c.period);
    rows.push_back({c, is_pathological(plant, c.period, InputMode::regular),
                    is_pathological(plant, c.period, InputMode::impulsive), !hautus.controllable,
                    hautus.margin});
  }

  if (format == OutputFormat::csv) {
    out << "T,base_period,multiple,per_multiple_test,regular_pathological,"
           "impulsive_pathological,mri_pathological,hautus_margin\n";
    for (const auto& r : rows) {
      out << format_number(r.c.period, kReportDigits) << ','
          << format_number(r.c.base_period, kReportDigits) << ',' << r.c.multiple << ','
          << (r.c.per_multiple_test ? 1 : 0) << ',' << (r.regular ? 1 : 0) << ','
          << (r.impulsive ? 1 : 0) << ',' << (r.mri ? 1 : 0) << ','
          << format_number(r.margin, kReportDigits) << '\n';
    }
    return;
  }
  json doc;
  doc["scenario"] = scenario.name;
  doc["T_max"] = horizon;
  doc["candidates"] = json::array();
  for (const auto& r : rows) {
    doc["candidates"].push_back({{"T", r.c.period},
                                 {"base_period", r.c.base_period},
                                 {"multiple", r.c.multiple},
                                 {"per_multiple_test", r.c.per_multiple_test},
                                 {"regular_pathological", r.regular},
                                 {"impulsive_pathological", r.impulsive},
                                 {"mri_pathological", r.mri},
                                 {"hautus_margin", std::isfinite(r.margin) ? json(r.margin)
                                                                           : json("inf")}});
  }
  out << doc.dump(2) << '\n';
}

void cmd_lqr(const Scenario& scenario, double period, InputMode mode, OutputFormat format,
             std::ostream& out) {
  const auto plant = make_plant(scenario);
  const auto design = design_lqr(plant, make_weights(scenario), period, mode);
  const auto& sol = design.solution;
  const auto m = plant.inputs();
  MatrixReport report(kReportDigits);
  report.add("T", scalar(period));
  report.add("P", sol.p);
  report.add("K", sol.k);
  if (mode == InputMode::mri) {
    report.add("Kc", sol.k.topRows(m));
    report.add("Ki", sol.k.bottomRows(m));
  }
  report.add("residual", scalar(sol.residual));
  report.add("iterations", scalar(static_cast<double>(sol.iterations)));
  report.add("converged", scalar(sol.converged ? 1.0 : 0.0));
  report.add("spectral_radius", scalar(spectral_radius(design.closed_loop())));
  report.add("cost_at_Btilde", scalar(sum_column_costs(sol.p, plant.btilde())));
  report.write(format, out);
}

void cmd_preview(const Scenario& scenario, double period, int horizon, InputMode mode,
                 OutputFormat format, std::ostream& out) {
  const auto plant = make_plant(scenario);
  const auto weights = make_weights(scenario);
  const auto design = design_lqr(plant, weights, period, mode);
  const Vector direction = plant.btilde().col(0);
  const auto plan = plan_preview(design, direction, horizon);

  MatrixReport report(kReportDigits);
  report.add("T", scalar(period));
  report.add("N", scalar(horizon));
  report.add("K", plan.k);
  report.add("G", plan.g);
  report.add("Gamma", plan.gamma);
  if (horizon > 0) {
    Matrix ff(horizon, plan.k.rows());
    for (int i = 0; i < horizon; ++i) ff.row(i) = plan.feedforward[static_cast<std::size_t>(i)];
    report.add("feedforward", ff);
  }
  report.add("Jstar", scalar(plan.optimal_cost));
  report.add("Jstar_no_preview", scalar(direction.dot(design.solution.p * direction)));
  if (plant.disturbances() > 1) {
    report.add("multi_impulse_measure",
               scalar(multi_impulse_measure(plant, weights, period, horizon, mode)));
  }
  report.write(format, out);
}

std::vector<SweepRow> run_sweep(const Scenario& scenario, const std::vector<double>& grid,
                                const std::vector<InputMode>& modes,
                                const std::vector<int>& horizons, unsigned threads) {
  const auto plant = make_plant(scenario);
  const auto weights = make_weights(scenario);
  const std::size_t tasks = grid.size() * modes.size();
  std::vector<std::vector<SweepRow>> results(tasks);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks; i = next++) {
      results[i] = sweep_point(plant, weights, grid[i / modes.size()], modes[i % modes.size()],
                               horizons);
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(tasks, 1)));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();

  std::vector<SweepRow> rows;
  for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
  return rows;
}

void write_sweep(const std::vector<SweepRow>& rows, OutputFormat format, std::ostream& out) {
  if (format == OutputFormat::csv) {
    out << "T,mode,N,cost,converged,iterations\n";
    for (const auto& r : rows) {
      out << format_number(r.period, kReportDigits) << ',' << to_string(r.mode) << ','
          << r.horizon << ',' << format_number(r.cost, kReportDigits) << ','
          << (r.converged ? 1 : 0) << ',' << r.iterations << '\n';
    }
    return;
  }
  json doc = json::array();
  for (const auto& r : rows) {
    doc.push_back({{"T", r.period},
                   {"mode", std::string(to_string(r.mode))},
                   {"N", r.horizon},
                   {"cost", std::isfinite(r.cost) ? json(r.cost) : json("inf")},
                   {"converged", r.converged},
                   {"iterations", r.iterations}});
  }
  out << doc.dump(2) << '\n';
}

SimulationRequest default_request(const Scenario& scenario) {
  SimulationRequest req;
  req.period = scenario.period.value_or(1.0);
  req.preview_horizon = scenario.preview_horizon;
  req.mode = scenario.mode;
  req.epsilon = scenario.epsilon;
  req.saturate_nonnegative = scenario.saturate_nonnegative;
  req.steps = scenario.horizon_steps;
  req.substeps = scenario.substeps;
  return req;
}

Trajectory simulate_scenario(const Scenario& scenario, const SimulationRequest& req) {
  const auto plant = make_plant(scenario);
  const auto weights = make_weights(scenario);
  InputPolicy policy = InputPolicy::zero(req.mode, plant.states(), plant.inputs());
  const Vector direction = plant.btilde().col(0);
  if (!req.open_loop) {
    const auto design = design_lqr(plant, weights, req.period, req.mode);
    const auto plan = plan_preview(design, direction, req.preview_horizon);
    policy.gain = plan.k;
    policy.feedforward = plan.feedforward;
  }
  policy.saturate_nonnegative = req.saturate_nonnegative;

  SimulationOptions opts;
  opts.x0 = scenario.x0.value_or(Vector::Zero(plant.states()));
  opts.steps = req.steps;
  opts.substeps = req.substeps;
  opts.epsilon = req.epsilon;
  return simulate_closed_loop(plant, weights, req.period, policy,
                              DisturbanceSpec{req.preview_horizon, direction}, opts);
}

void write_trajectory(const Scenario& scenario, const Trajectory& traj, OutputFormat format,
                      std::ostream& out) {
  const auto n = scenario.a.rows();
  const auto m = scenario.b.cols();
  const auto output = plot_output(scenario);
  auto step_of = [&](double t) {
    return static_cast<std::size_t>(std::floor(t / traj.period + 1e-9));
  };
  const Vector zero = Vector::Zero(m);

  if (format == OutputFormat::json) {
    json rows = json::array();
    for (const auto& s : traj.dense) {
      const auto k = step_of(s.t);
      const bool live = k < traj.regular_inputs.size();
      json row = {{"t", s.t},
                  {"x", std::vector<double>(s.x.begin(), s.x.end())},
                  {"J_running", s.running_cost},
                  {"event", std::string(event_name(s.event))}};
      if (output) row["y"] = (*output * s.x)(0);
      const Vector& uc = live ? traj.regular_inputs[k] : zero;
      const Vector ui = s.event == SampleEvent::impulse ? traj.impulsive_inputs[k] : zero;
      row["uc"] = std::vector<double>(uc.begin(), uc.end());
      row["ui"] = std::vector<double>(ui.begin(), ui.end());
      rows.push_back(std::move(row));
    }
    out << json{{"scenario", scenario.name},
                {"T", traj.period},
                {"J_cont", traj.j_cont},
                {"J_disc", traj.j_disc},
                {"rows", rows}}
               .dump(2)
        << '\n';
    return;
  }

  out << 't';
  for (Eigen::Index i = 0; i < n; ++i) out << ",x" << i + 1;
  if (output) out << ",y";
  for (Eigen::Index i = 0; i < m; ++i) out << ",uc" << i + 1;
  for (Eigen::Index i = 0; i < m; ++i) out << ",ui" << i + 1;
  out << ",J_running,event\n";
  for (const auto& s : traj.dense) {
    const auto k = step_of(s.t);
    const bool live = k < traj.regular_inputs.size();
    out << format_number(s.t, kReportDigits);
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_number(s.x[i], kReportDigits);
    if (output) out << ',' << format_number((*output * s.x)(0), kReportDigits);
    const Vector& uc = live ? traj.regular_inputs[k] : zero;
    const Vector ui = s.event == SampleEvent::impulse ? traj.impulsive_inputs[k] : zero;
    for (Eigen::Index i = 0; i < m; ++i) out << ',' << format_number(uc[i], kReportDigits);
    for (Eigen::Index i = 0; i < m; ++i) out << ',' << format_number(ui[i], kReportDigits);
    out << ',' << format_number(s.running_cost, kReportDigits) << ',' << event_name(s.event)
        << '\n';
  }
}

}  // namespace mri::cli
