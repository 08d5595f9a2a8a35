#pragma once

#include <optional>
#include <string_view>

#include "mri/numkernel.hpp"

namespace mri {

/// Which input channels the sampled controller may use.
enum class InputMode { regular, impulsive, mri };

std::string_view to_string(InputMode mode);
std::optional<InputMode> parse_input_mode(std::string_view text);

/// ẋ = Ax + B(u_c + u_i) + B̃w.
class ContinuousPlant {
 public:
  ContinuousPlant(Matrix a, Matrix b, Matrix btilde);
  /// Plant without a disturbance channel (B̃ is a zero column).
  ContinuousPlant(Matrix a, Matrix b);

  const Matrix& a() const { return a_; }
  const Matrix& b() const { return b_; }
  const Matrix& btilde() const { return btilde_; }
  Eigen::Index states() const { return a_.rows(); }
  Eigen::Index inputs() const { return b_.cols(); }
  Eigen::Index disturbances() const { return btilde_.cols(); }

 private:
  Matrix a_;
  Matrix b_;
  Matrix btilde_;
};

/// Continuous cost weights: ∫ xᵀQx + u_cᵀR_c u_c dt + Σ u_iᵀR_i u_i.
class CostWeights {
 public:
  CostWeights(Matrix q, Matrix rc, Matrix ri);

  const Matrix& q() const { return q_; }
  const Matrix& rc() const { return rc_; }
  const Matrix& ri() const { return ri_; }

  /// Throws if the weight dimensions do not fit the plant.
  void check_against(const ContinuousPlant& plant) const;

 private:
  Matrix q_;
  Matrix rc_;
  Matrix ri_;
};

/// x_{k+1} = A_d x_k + B_d u_{c,k} + B_i u_{i,k}, sampled with period T.
struct SampledModel {
  double period = 0.0;
  Matrix ad;      // e^{AT}
  Matrix atilde;  // ∫₀ᵀ e^{Aτ} dτ
  Matrix bd;      // Ã_T B
  Matrix bi;      // A_d B

  /// [B_d B_i]
  Matrix bdi() const;
};

/// Stage cost x_kᵀQ_d x_k + 2x_kᵀS_d v_k + v_kᵀR_d v_k with v_k = [u_c; u_i].
struct SampledCost {
  Matrix qd;  // n×n
  Matrix sd;  // n×2m
  Matrix rd;  // 2m×2m
};

/// Input matrix and stage-cost blocks restricted to one input mode.
struct InputSelection {
  InputMode mode = InputMode::mri;
  Matrix b;
  Matrix s;
  Matrix r;
};

/// Smallest sampling period accepted by the sampling routines.
inline constexpr double kMinPeriod = 1e-12;

SampledModel sample_plant(const ContinuousPlant& plant, double period);

/// Exact discrete-equivalent cost of the continuous criterion over one
/// sampling interval, from a single block exponential of size 2(n+m).
SampledCost cost_matrices(const ContinuousPlant& plant, const CostWeights& weights,
                          double period);

InputSelection restrict_input_mode(const SampledModel& model, const SampledCost& cost,
                                   InputMode mode);

/// Embeds a mode-restricted input vector into the full [u_c; u_i] layout.
Vector expand_input(const Vector& selected, InputMode mode, Eigen::Index inputs);

}  // namespace mri
