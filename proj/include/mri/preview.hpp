#pragma once

#include <vector>

#include "mri/riccati.hpp"

namespace mri {

/// Optimal closed-loop map under the preview law,
/// G = (I + B R⁻¹BᵀP)⁻¹(A_d − B R⁻¹Sᵀ).
struct ClosedLoopMap {
  Matrix g;
  /// ‖G − (A_d + BK)‖_F / max(1, ‖G‖_F); zero in exact arithmetic.
  double identity_gap = 0.0;
};

ClosedLoopMap closed_loop_G(const Matrix& ad, const Matrix& b, const Matrix& s, const Matrix& r,
                            const Matrix& p, const Matrix& k);

/// f_k = −(R + BᵀPB)⁻¹Bᵀ(Gᵀ)^{N−k−1}PB̃ for k = 0..N−1.
std::vector<Vector> feedforward_sequence(const Matrix& p, const Matrix& g, const Matrix& b,
                                         const Matrix& r, const Vector& btilde, int horizon);

struct GammaCost {
  Matrix gamma;
  double cost = 0.0;  // B̃ᵀPB̃ − B̃ᵀPΓPB̃
};

/// Γ = Σ_{i<N} Gⁱ M (Gᵀ)ⁱ with M = BR⁻¹Bᵀ(I + PBR⁻¹Bᵀ)⁻¹.
GammaCost gamma_and_cost(const Matrix& p, const Matrix& g, const Matrix& b, const Matrix& r,
                         const Vector& btilde, int horizon);

/// Preview controller against w(t) = δ(t − NT) entering through B̃.
struct PreviewPlan {
  int horizon = 0;
  Matrix k;
  std::vector<Vector> feedforward;
  Matrix g;
  Matrix gamma;
  double optimal_cost = 0.0;
  double identity_gap = 0.0;
};

PreviewPlan plan_preview(const LqrDesign& design, const Vector& btilde, int horizon);

/// sqrt(Σ_i J*(column i of B̃)) for simultaneous impulses on every column.
double multi_impulse_measure(const ContinuousPlant& plant, const CostWeights& weights,
                             double period, int horizon, InputMode mode = InputMode::mri);

}  // namespace mri
