#include "mri/riccati.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mri {
namespace {

Eigen::LDLT<Matrix> factor_inner(const Matrix& m) {
  Eigen::LDLT<Matrix> ldlt(symmetrize(m));
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw NumericalError("singular R + BᵀPB in Riccati inner solve");
  }
  const Vector d = ldlt.vectorD();
  if (d.minCoeff() <= 1e-15 * std::max(1.0, d.cwiseAbs().maxCoeff())) {
    throw NumericalError("singular R + BᵀPB in Riccati inner solve");
  }
  return ldlt;
}

void check_shapes(const Matrix& ad, const Matrix& b, const Matrix& qd, const Matrix& s,
                  const Matrix& r) {
  require_square(ad, "solve_dare A_d");
  const auto n = ad.rows();
  const auto m = b.cols();
  if (b.rows() != n || qd.rows() != n || qd.cols() != n || s.rows() != n || s.cols() != m ||
      r.rows() != m || r.cols() != m) {
    throw std::invalid_argument("solve_dare: inconsistent matrix shapes");
  }
}

// Iterations without a new smallest step before the value iteration is
// considered to have reached its roundoff floor.
constexpr long kStallWindow = 1000;
constexpr int kMaxRefinements = 8;
// A stalled iteration still counts as converged when the refined residual
// is this small relative to 1 + ‖P‖.
constexpr double kStalledResidual = 1e-11;

}  // namespace

Matrix mri_gains(const Matrix& p, const Matrix& ad, const Matrix& b, const Matrix& s,
                 const Matrix& r) {
  const auto inner = factor_inner(r + b.transpose() * p * b);
  return -inner.solve(b.transpose() * p * ad + s.transpose());
}

namespace {

// Q_d − (P − A_dᵀPA_d + (A_dᵀPB + S)(BᵀPB + R)⁻¹(A_dᵀPB + S)ᵀ)
Matrix dare_defect(const Matrix& p, const Matrix& ad, const Matrix& b, const Matrix& qd,
                   const Matrix& s, const Matrix& r) {
  const Matrix cross = ad.transpose() * p * b + s;
  const Matrix inner = b.transpose() * p * b + r;
  const Matrix rhs = cross * inner.ldlt().solve(cross.transpose()) - ad.transpose() * p * ad + p;
  return symmetrize(qd - rhs);
}

}  // namespace

double dare_residual(const Matrix& p, const Matrix& ad, const Matrix& b, const Matrix& qd,
                     const Matrix& s, const Matrix& r) {
  return dare_defect(p, ad, b, qd, s, r).norm();
}

RiccatiSolution solve_dare(const Matrix& ad, const Matrix& b, const Matrix& qd, const Matrix& s,
                           const Matrix& r, const RiccatiOptions& options) {
  check_shapes(ad, b, qd, s, r);
  const auto n = ad.rows();

  const auto r_fact = factor_inner(r);
  // Â = A_d − B R⁻¹Sᵀ, Q̂ = Q_d − S R⁻¹Sᵀ removes the cross term.
  const Matrix a_hat = ad - b * r_fact.solve(s.transpose());
  const Matrix q_hat = symmetrize(qd - s * r_fact.solve(s.transpose()));

  RiccatiSolution sol;
  {
    Eigen::SelfAdjointEigenSolver<Matrix> es(q_hat, Eigen::EigenvaluesOnly);
    const double top = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (es.eigenvalues()[i] <= kRankTolerance * top) ++sol.qhat_kernel_dim;
    }
  }

  const double q_scale = q_hat.norm();
  const double blowup = options.divergence_factor * q_scale;
  Matrix p = q_hat + 1e-12 * q_scale * Matrix::Identity(n, n);
  long it = 0;
  double best_change = std::numeric_limits<double>::infinity();
  long since_best = 0;
  bool stalled = false;
  for (; it < options.max_iterations; ++it) {
    const Matrix pa = p * a_hat;
    const Matrix bpa = b.transpose() * pa;
    const auto inner = factor_inner(r + b.transpose() * p * b);
    Matrix next = q_hat + a_hat.transpose() * pa - bpa.transpose() * inner.solve(bpa);
    next = symmetrize(next);
    if (!next.allFinite() || (q_scale > 0.0 && next.norm() > blowup)) {
      throw DivergentRiccati("Riccati iteration diverged: pair not stabilizable at this period",
                             p, it + 1);
    }
    const double change = (next - p).norm();
    p = std::move(next);
    if (change <= options.relative_tolerance * p.norm()) {
      sol.converged = true;
      ++it;
      break;
    }
    if (change < best_change) {
      best_change = change;
      since_best = 0;
    } else if (++since_best >= kStallWindow) {
      stalled = true;
      ++it;
      break;
    }
  }

  // Newton steps in defect-correction form on the original cross-term
  // equation: P ← P + Σ_j (A_clᵀ)ʲ D(P) A_clʲ. Only the small correction
  // carries the rounding of A_cl, so this reaches the evaluation floor.
  Matrix defect = dare_defect(p, ad, b, qd, s, r);
  double residual = defect.norm();
  for (int i = 0; i < kMaxRefinements && residual > 0.0; ++i) {
    Matrix k;
    try {
      k = mri_gains(p, ad, b, s, r);
    } catch (const NumericalError&) {
      break;
    }
    const Matrix a_cl = ad + b * k;
    if (spectral_radius(a_cl) >= 1.0) break;
    const Matrix candidate = symmetrize(p + stein_sum(a_cl, defect));
    Matrix cand_defect = dare_defect(candidate, ad, b, qd, s, r);
    const double cand_residual = cand_defect.norm();
    if (!(cand_residual < residual)) break;
    p = candidate;
    defect = std::move(cand_defect);
    residual = cand_residual;
  }
  if (stalled && residual <= kStalledResidual * (1.0 + p.norm())) sol.converged = true;

  sol.p = p;
  sol.iterations = it;
  sol.k = mri_gains(p, ad, b, s, r);
  sol.residual = residual;
  return sol;
}

double infinite_horizon_cost(const RiccatiSolution& sol, const Vector& x0) {
  return x0.dot(sol.p * x0);
}

Matrix LqrDesign::closed_loop() const { return model.ad + selection.b * solution.k; }

LqrDesign design_lqr(const ContinuousPlant& plant, const CostWeights& weights, double period,
                     InputMode mode, const RiccatiOptions& options) {
  LqrDesign d;
  d.model = sample_plant(plant, period);
  d.cost = cost_matrices(plant, weights, period);
  d.selection = restrict_input_mode(d.model, d.cost, mode);
  d.solution =
      solve_dare(d.model.ad, d.selection.b, d.cost.qd, d.selection.s, d.selection.r, options);
  return d;
}

}  // namespace mri
