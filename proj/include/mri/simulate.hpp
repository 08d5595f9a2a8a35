#pragma once

#include <optional>
#include <vector>

#include "mri/discretize.hpp"
#include "mri/errors.hpp"

namespace mri {

/// v_k = K x_k + f_k (f_k only for k < N), split into (u_c, u_i) by mode.
struct InputPolicy {
  Matrix gain;
  std::vector<Vector> feedforward;
  InputMode mode = InputMode::mri;
  /// Apply max(0, ·) componentwise to both input channels.
  bool saturate_nonnegative = false;

  static InputPolicy zero(InputMode mode, Eigen::Index states, Eigen::Index inputs);
};

/// x ← x + direction at t = impulse_step·T, before the step input is chosen.
struct DisturbanceSpec {
  int impulse_step = 0;
  Vector direction;
};

enum class SampleEvent { none, disturbance, impulse };

struct DenseSample {
  double t = 0.0;
  Vector x;
  SampleEvent event = SampleEvent::none;
  double running_cost = 0.0;  // continuous cost accumulated up to t
};

/// Interval on which the continuous input is constant.
struct Segment {
  double start = 0.0;
  double duration = 0.0;
  Vector x0;
  Vector u;
};

struct Trajectory {
  double period = 0.0;
  int steps = 0;
  std::vector<Vector> sample_states;  // x_0..x_K, after any disturbance jump at that step
  std::vector<Vector> regular_inputs;
  std::vector<Vector> impulsive_inputs;
  std::vector<DenseSample> dense;
  std::vector<Segment> segments;
  double j_cont = 0.0;
  double j_disc = 0.0;
};

struct SimulationOptions {
  Vector x0;
  int steps = 1;
  int substeps = 32;
  /// Unset: ideal impulses. Set: pulse of width εT and height u_i/(εT).
  std::optional<double> epsilon;
};

class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, int step) : NumericalError(what), step(step) {}
  int step;
};

Trajectory simulate_closed_loop(const ContinuousPlant& plant, const CostWeights& weights,
                                double period, const InputPolicy& policy,
                                const std::optional<DisturbanceSpec>& disturbance,
                                const SimulationOptions& options);

/// Open-loop run with v_k = inputs[k] (zero past the end of the sequence).
Trajectory simulate_inputs(const ContinuousPlant& plant, const CostWeights& weights,
                           double period, const std::vector<Vector>& inputs,
                           const SimulationOptions& options);

/// ∫xᵀQx over every segment (exact Gram integrals) plus the input costs.
double continuous_cost(const ContinuousPlant& plant, const CostWeights& weights,
                       const Trajectory& traj);

struct Lemma1Result {
  double j_cont = 0.0;
  double j_disc = 0.0;
  double gap = 0.0;  // |J_cont − J_disc| / max(J_disc, 1e-12)
};

Lemma1Result lemma1_check(const ContinuousPlant& plant, const CostWeights& weights, double period,
                          const std::vector<Vector>& inputs, const Vector& x0, int steps,
                          int substeps = 4);

/// B_{i_a,T}(ε) = (1/(εT)) ∫₀^{εT} e^{A(T−τ)} dτ B.
Matrix impulse_hold_matrix(const ContinuousPlant& plant, double period, double epsilon);

/// xᵀ(Σ_{j≥0} (A_clᵀ)ʲ W A_clʲ)x for a Schur-stable A_cl; +inf otherwise.
double quadratic_tail(const Matrix& a_cl, const Matrix& stage, const Vector& x);

struct TailCertificate {
  int steps = 0;
  double tail = 0.0;
};

/// Smallest K ≤ cap with quadratic_tail(A_cl, W, A_clᴷ x0) < tol.
TailCertificate horizon_for_tail(const Matrix& a_cl, const Matrix& stage, const Vector& x0,
                                 double tol = 1e-10, int cap = 100'000);

/// Closed-loop stage weight [I; K]ᵀ[[Q_d, S],[Sᵀ, R]][I; K] for v = Kx.
Matrix closed_loop_stage(const Matrix& qd, const Matrix& s, const Matrix& r, const Matrix& k);

}  // namespace mri
