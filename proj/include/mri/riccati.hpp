#pragma once

#include "mri/discretize.hpp"
#include "mri/errors.hpp"

namespace mri {

struct RiccatiOptions {
  double relative_tolerance = 1e-13;
  long max_iterations = 1'000'000;
  /// Iterates larger than this multiple of ‖Q̂‖ are declared divergent.
  double divergence_factor = 1e12;
};

struct RiccatiSolution {
  Matrix p;
  Matrix k;  // optimal gain; for mri rows are K_c then K_i
  double residual = 0.0;
  long iterations = 0;
  bool converged = false;
  /// Dimension of ker(Q_d − S R⁻¹ Sᵀ). Nonzero means P ≻ 0 relies on a
  /// detectability property that is not checked here.
  int qhat_kernel_dim = 0;
};

/// Raised when the value iteration blows up (the pair is not stabilizable
/// at this period). Carries the last iterate.
class DivergentRiccati : public NumericalError {
 public:
  DivergentRiccati(const std::string& what, Matrix last, long iterations)
      : NumericalError(what), last_iterate(std::move(last)), iterations(iterations) {}
  Matrix last_iterate;
  long iterations;
};

/// Stabilizing solution of
///   P = A_dᵀPA_d − (A_dᵀPB + S)(BᵀPB + R)⁻¹(A_dᵀPB + S)ᵀ + Q_d
/// by value iteration on the cross-term-free form.
RiccatiSolution solve_dare(const Matrix& ad, const Matrix& b, const Matrix& qd, const Matrix& s,
                           const Matrix& r, const RiccatiOptions& options = {});

/// K = −(R + BᵀPB)⁻¹(BᵀPA_d + Sᵀ).
Matrix mri_gains(const Matrix& p, const Matrix& ad, const Matrix& b, const Matrix& s,
                 const Matrix& r);

/// Frobenius norm of the DARE defect, evaluated in the original (cross-term) form.
double dare_residual(const Matrix& p, const Matrix& ad, const Matrix& b, const Matrix& qd,
                     const Matrix& s, const Matrix& r);

double infinite_horizon_cost(const RiccatiSolution& sol, const Vector& x0);

/// Sampled model, cost and Riccati solution for one (plant, weights, T, mode).
struct LqrDesign {
  SampledModel model;
  SampledCost cost;
  InputSelection selection;
  RiccatiSolution solution;

  /// A_d + B_sel K
  Matrix closed_loop() const;
};

LqrDesign design_lqr(const ContinuousPlant& plant, const CostWeights& weights, double period,
                     InputMode mode, const RiccatiOptions& options = {});

}  // namespace mri
