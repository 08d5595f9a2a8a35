#pragma once

#include <complex>
#include <vector>

#include "mri/discretize.hpp"

namespace mri {

/// Default tolerance for eigenvalue resonance decisions. Scaled by
/// (1 + |λ|) for real parts and by (1 + T) for the integer test.
inline constexpr double kResonanceTolerance = 1e-8;

/// An eigenvalue λ of A together with every γ ∈ σ(A), γ ≠ λ, such that
/// (λ − γ)T ∈ 2iπℤ \ {0}.
struct ResonantEntry {
  std::complex<double> eigenvalue;
  std::vector<std::complex<double>> partners;
  std::vector<long> multiples;  // ℓ for each partner
};

using ResonantSet = std::vector<ResonantEntry>;

struct HautusFailure {
  std::complex<double> eigenvalue;
  int kernel_dim = 0;
};

struct ControllabilityReport {
  InputMode mode = InputMode::mri;
  bool controllable = true;
  ResonantSet resonant_set;
  std::vector<HautusFailure> failures;
  /// Smallest σ_min/σ_max over the tested stacked matrices; +inf when the
  /// resonant set is empty and no test was needed.
  double margin = 0.0;
};

bool kalman_controllable(const Matrix& a, const Matrix& b, double tol = kRankTolerance);

ResonantSet resonant_eigenvalues(const Matrix& a, double period,
                                 double tol = kResonanceTolerance);

/// Reduced Hautus test for (A_d, [B_d B_i]): only the resonant eigenvalues
/// need a kernel check of [A_dᵀ − e^{μT}I; (Ã_T B)ᵀ; Bᵀ].
/// Throws HypothesisViolation if (A, B) is not controllable.
ControllabilityReport reduced_hautus_mri(const ContinuousPlant& plant, double period);

/// True iff (A_d, B_sel) is not controllable for the mode's input matrix.
/// Throws HypothesisViolation if (A, B) is not controllable.
bool is_pathological(const ContinuousPlant& plant, double period, InputMode mode);

struct CandidatePeriod {
  double period = 0.0;
  double base_period = 0.0;  // 2π / |b₂ − b₁|
  long multiple = 1;
  /// Real part zero and b₂/b₁ rational: every multiple must be tested on
  /// its own instead of relying on the base period.
  bool per_multiple_test = false;
};

/// Every ℓ·2π/|b₂ − b₁| ≤ horizon over eigenvalue pairs a + ib₁, a + ib₂
/// with equal real parts, deduplicated and sorted.
std::vector<CandidatePeriod> candidate_pathological_periods(const Matrix& a, double horizon,
                                                            double tol = kResonanceTolerance);

}  // namespace mri
