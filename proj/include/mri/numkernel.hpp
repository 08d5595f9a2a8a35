#pragma once

#include <complex>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace mri {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Eigenvalues of a real matrix. Complex entries come in exact conjugate
/// pairs, sorted by real part then imaginary part.
using Spectrum = std::vector<std::complex<double>>;

/// Relative singular-value threshold below which a direction counts as
/// numerically null.
inline constexpr double kRankTolerance = 1e-9;

void require_finite(const Matrix& m, std::string_view what);
void require_square(const Matrix& m, std::string_view what);

/// e^M by scaling and squaring with a degree-13 Padé approximant.
Matrix expm(const Matrix& m);

/// Results of one block-triangular exponential over [0, T].
struct ExponentialIntegrals {
  Matrix transition;  // e^{AT}
  Matrix integral;    // ∫₀ᵀ e^{Aτ} dτ
  Matrix input;       // (∫₀ᵀ e^{Aτ} dτ) B
};

/// Computes e^{AT}, ∫₀ᵀ e^{Aτ}dτ and (∫₀ᵀ e^{Aτ}dτ)B from a single
/// exponential of [[A, I, B], [0, 0, 0], [0, 0, 0]]·T.
ExponentialIntegrals expm_block_integrals(const Matrix& a, const Matrix& b,
                                          double period);

/// ∫₀ᵀ e^{Fᵀs} W e^{Fs} ds (Van Loan). W must be symmetric.
Matrix gram_integral(const Matrix& f, const Matrix& w, double period);

Spectrum eigenvalues(const Matrix& m);

Vector singular_values(const Matrix& m);

/// Number of singular values at or below tol·σ_max, plus the column excess
/// over the row count; i.e. the dimension of the numerical kernel.
int null_space_dim(const Matrix& m, double tol = kRankTolerance);

int numerical_rank(const Matrix& m, double tol = kRankTolerance);

double spectral_radius(const Matrix& m);

/// Σ_{j≥0} (Aᵀ)ʲ W Aʲ for a Schur-stable A, by repeated squaring.
Matrix stein_sum(const Matrix& a, const Matrix& w);

inline Matrix symmetrize(const Matrix& m) {
  return 0.5 * (m + m.transpose());
}

/// Real 2n×2n embedding [[Re M, −Im M], [Im M, Re M]] of a complex matrix.
/// Its kernel is trivial exactly when the complex kernel is.
Matrix real_doubling(const Eigen::MatrixXcd& m);

}  // namespace mri
