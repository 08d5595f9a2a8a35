#include "mri/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace mri {
namespace {

struct SegmentMaps {
  Matrix phi;    // e^{A·d}
  Matrix gamma;  // (∫₀ᵈ e^{Aτ}dτ) B
  Matrix gram;   // ∫₀ᵈ e^{Eᵀs} diag(Q, 0) e^{Es} ds over z = [x; u]
};

class SegmentCache {
 public:
  SegmentCache(const ContinuousPlant& plant, const CostWeights& weights) : plant_(plant) {
    const auto n = plant.states();
    const auto m = plant.inputs();
    e_ = Matrix::Zero(n + m, n + m);
    e_.topLeftCorner(n, n) = plant.a();
    e_.topRightCorner(n, m) = plant.b();
    w_ = Matrix::Zero(n + m, n + m);
    w_.topLeftCorner(n, n) = weights.q();
  }

  const SegmentMaps& get(double duration) {
    auto it = cache_.find(duration);
    if (it != cache_.end()) return it->second;
    auto ints = expm_block_integrals(plant_.a(), plant_.b(), duration);
    SegmentMaps maps{std::move(ints.transition), std::move(ints.input),
                     gram_integral(e_, w_, duration)};
    return cache_.emplace(duration, std::move(maps)).first->second;
  }

 private:
  const ContinuousPlant& plant_;
  Matrix e_;
  Matrix w_;
  std::map<double, SegmentMaps> cache_;
};

double segment_cost(const SegmentMaps& maps, const Vector& x, const Vector& u) {
  Vector z(x.size() + u.size());
  z << x, u;
  return z.dot(maps.gram * z);
}

double stage_cost(const SampledCost& cost, const Vector& x, const Vector& v) {
  return x.dot(cost.qd * x) + 2.0 * x.dot(cost.sd * v) + v.dot(cost.rd * v);
}

// Offsets within [0, T] at which a new constant-input segment starts.
std::vector<double> breakpoints(double period, int substeps, std::optional<double> pulse) {
  const double h = period / substeps;
  std::vector<double> pts;
  for (int j = 0; j < substeps; ++j) pts.push_back(j * h);
  if (pulse) {
    const double snap = 1e-12 * period;
    const bool on_grid = std::any_of(pts.begin(), pts.end(),
                                     [&](double p) { return std::abs(p - *pulse) <= snap; });
    if (!on_grid) pts.push_back(*pulse);
    std::sort(pts.begin(), pts.end());
  }
  pts.push_back(period);
  return pts;
}

using InputRule = std::function<std::pair<Vector, Vector>(int step, const Vector& x)>;

Trajectory run(const ContinuousPlant& plant, const CostWeights& weights, double period,
               const InputRule& rule, const std::optional<DisturbanceSpec>& disturbance,
               const SimulationOptions& options) {
  weights.check_against(plant);
  if (options.steps < 1) throw std::invalid_argument("simulation needs at least one step");
  if (options.substeps < 1) throw std::invalid_argument("simulation needs at least one substep");
  if (options.epsilon && !(*options.epsilon > 0.0 && *options.epsilon < 1.0)) {
    throw std::invalid_argument("impulse approximation epsilon must lie in (0, 1)");
  }
  const auto n = plant.states();
  const auto m = plant.inputs();
  Vector x = options.x0.size() == 0 ? Vector::Zero(n) : options.x0;
  if (x.size() != n) throw std::invalid_argument("initial state has the wrong dimension");
  if (disturbance) {
    if (disturbance->impulse_step < 0 || disturbance->direction.size() != n ||
        !disturbance->direction.allFinite()) {
      throw std::invalid_argument("disturbance must have a step >= 0 and a finite n-vector");
    }
  }

  const SampledCost cost = cost_matrices(plant, weights, period);
  SegmentCache cache(plant, weights);
  const std::optional<double> pulse =
      options.epsilon ? std::optional<double>(*options.epsilon * period) : std::nullopt;
  const auto offsets = breakpoints(period, options.substeps, pulse);
  const double h = period / options.substeps;

  Trajectory traj;
  traj.period = period;
  traj.steps = options.steps;
  double running = 0.0;

  for (int k = 0; k < options.steps; ++k) {
    const double tk = k * period;
    traj.dense.push_back({tk, x, SampleEvent::none, running});
    if (disturbance && disturbance->impulse_step == k) {
      x += disturbance->direction;
      traj.dense.push_back({tk, x, SampleEvent::disturbance, running});
    }
    auto [uc, ui] = rule(k, x);
    traj.sample_states.push_back(x);
    traj.regular_inputs.push_back(uc);
    traj.impulsive_inputs.push_back(ui);

    Vector v(2 * m);
    v << uc, ui;
    traj.j_disc += stage_cost(cost, x, v);
    running += period * uc.dot(weights.rc() * uc) + ui.dot(weights.ri() * ui);

    if (!pulse && ui.squaredNorm() > 0.0) {
      x += plant.b() * ui;
      traj.dense.push_back({tk, x, SampleEvent::impulse, running});
    }

    for (std::size_t j = 0; j + 1 < offsets.size(); ++j) {
      double duration = offsets[j + 1] - offsets[j];
      if (std::abs(duration - h) <= 1e-12 * period) duration = h;
      if (duration <= 0.0) continue;
      Vector u = uc;
      if (pulse && offsets[j] < *pulse) u += ui / *pulse;
      const auto& maps = cache.get(duration);
      const double seg = segment_cost(maps, x, u);
      traj.segments.push_back({tk + offsets[j], duration, x, u});
      x = maps.phi * x + maps.gamma * u;
      running += seg;
      if (!x.allFinite()) {
        throw DivergenceError("state became non-finite at step " + std::to_string(k), k);
      }
      if (j + 2 < offsets.size()) {
        traj.dense.push_back({tk + offsets[j + 1], x, SampleEvent::none, running});
      }
    }
  }
  traj.sample_states.push_back(x);
  traj.dense.push_back({options.steps * period, x, SampleEvent::none, running});
  traj.j_cont = running;
  return traj;
}

Vector saturate(Vector v) { return v.cwiseMax(0.0); }

}  // namespace

InputPolicy InputPolicy::zero(InputMode mode, Eigen::Index states, Eigen::Index inputs) {
  const Eigen::Index rows = mode == InputMode::mri ? 2 * inputs : inputs;
  return {Matrix::Zero(rows, states), {}, mode, false};
}

Trajectory simulate_closed_loop(const ContinuousPlant& plant, const CostWeights& weights,
                                double period, const InputPolicy& policy,
                                const std::optional<DisturbanceSpec>& disturbance,
                                const SimulationOptions& options) {
  const auto n = plant.states();
  const auto m = plant.inputs();
  const Eigen::Index rows = policy.mode == InputMode::mri ? 2 * m : m;
  if (policy.gain.rows() != rows || policy.gain.cols() != n) {
    throw std::invalid_argument("policy gain has the wrong shape for its input mode");
  }
  for (const auto& f : policy.feedforward) {
    if (f.size() != rows) throw std::invalid_argument("feedforward entry has the wrong size");
  }
  const InputRule rule = [&](int k, const Vector& x) {
    Vector v = policy.gain * x;
    if (static_cast<std::size_t>(k) < policy.feedforward.size()) {
      v += policy.feedforward[static_cast<std::size_t>(k)];
    }
    const Vector full = expand_input(v, policy.mode, m);
    Vector uc = full.head(m);
    Vector ui = full.tail(m);
    if (policy.saturate_nonnegative) {
      uc = saturate(uc);
      ui = saturate(ui);
    }
    return std::pair{uc, ui};
  };
  return run(plant, weights, period, rule, disturbance, options);
}

Trajectory simulate_inputs(const ContinuousPlant& plant, const CostWeights& weights,
                           double period, const std::vector<Vector>& inputs,
                           const SimulationOptions& options) {
  const auto m = plant.inputs();
  for (const auto& v : inputs) {
    if (v.size() != 2 * m) throw std::invalid_argument("input entries must be [u_c; u_i]");
  }
  const InputRule rule = [&](int k, const Vector&) {
    if (static_cast<std::size_t>(k) >= inputs.size()) {
      return std::pair<Vector, Vector>{Vector::Zero(m), Vector::Zero(m)};
    }
    const Vector& v = inputs[static_cast<std::size_t>(k)];
    return std::pair<Vector, Vector>{v.head(m), v.tail(m)};
  };
  return run(plant, weights, period, rule, std::nullopt, options);
}

double continuous_cost(const ContinuousPlant& plant, const CostWeights& weights,
                       const Trajectory& traj) {
  SegmentCache cache(plant, weights);
  double total = 0.0;
  for (const auto& seg : traj.segments) {
    total += segment_cost(cache.get(seg.duration), seg.x0, seg.u);
  }
  for (std::size_t k = 0; k < traj.regular_inputs.size(); ++k) {
    const auto& uc = traj.regular_inputs[k];
    const auto& ui = traj.impulsive_inputs[k];
    total += traj.period * uc.dot(weights.rc() * uc) + ui.dot(weights.ri() * ui);
  }
  return total;
}

Lemma1Result lemma1_check(const ContinuousPlant& plant, const CostWeights& weights, double period,
                          const std::vector<Vector>& inputs, const Vector& x0, int steps,
                          int substeps) {
  SimulationOptions opts;
  opts.x0 = x0;
  opts.steps = steps;
  opts.substeps = substeps;
  const auto traj = simulate_inputs(plant, weights, period, inputs, opts);
  Lemma1Result out;
  out.j_cont = continuous_cost(plant, weights, traj);
  out.j_disc = traj.j_disc;
  out.gap = std::abs(out.j_cont - out.j_disc) / std::max(out.j_disc, 1e-12);
  return out;
}

Matrix impulse_hold_matrix(const ContinuousPlant& plant, double period, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("impulse_hold_matrix: epsilon must lie in (0, 1)");
  }
  if (!(period >= kMinPeriod) || !std::isfinite(period)) {
    throw std::invalid_argument("impulse_hold_matrix: period must be positive");
  }
  const double width = epsilon * period;
  const auto pulse = expm_block_integrals(plant.a(), plant.b(), width);
  return expm(plant.a() * (period - width)) * pulse.input / width;
}

double quadratic_tail(const Matrix& a_cl, const Matrix& stage, const Vector& x) {
  if (spectral_radius(a_cl) >= 1.0) return std::numeric_limits<double>::infinity();
  return x.dot(stein_sum(a_cl, stage) * x);
}

TailCertificate horizon_for_tail(const Matrix& a_cl, const Matrix& stage, const Vector& x0,
                                 double tol, int cap) {
  if (spectral_radius(a_cl) >= 1.0) {
    return {cap, std::numeric_limits<double>::infinity()};
  }
  const Matrix sum = stein_sum(a_cl, stage);
  Vector x = x0;
  for (int k = 0;; ++k) {
    const double tail = x.dot(sum * x);
    if (tail < tol || k >= cap) return {k, tail};
    x = a_cl * x;
  }
}

Matrix closed_loop_stage(const Matrix& qd, const Matrix& s, const Matrix& r, const Matrix& k) {
  const auto n = qd.rows();
  Matrix lift(n + k.rows(), n);
  lift << Matrix::Identity(n, n), k;
  Matrix full(n + k.rows(), n + k.rows());
  full << qd, s, s.transpose(), r;
  return symmetrize(lift.transpose() * full * lift);
}

}  // namespace mri
