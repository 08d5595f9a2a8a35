#include "mri/preview.hpp"

#include <cmath>
#include <stdexcept>

namespace mri {
namespace {

void require_horizon(int horizon) {
  if (horizon < 0) throw std::invalid_argument("preview horizon N must be >= 0");
}

// X = B R⁻¹ Bᵀ
Matrix input_gram(const Matrix& b, const Matrix& r) {
  Eigen::LDLT<Matrix> ldlt(symmetrize(r));
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw NumericalError("preview: R is not positive definite");
  }
  return symmetrize(b * ldlt.solve(b.transpose()));
}

}  // namespace

ClosedLoopMap closed_loop_G(const Matrix& ad, const Matrix& b, const Matrix& s, const Matrix& r,
                            const Matrix& p, const Matrix& k) {
  const auto n = ad.rows();
  Eigen::LDLT<Matrix> r_fact(symmetrize(r));
  const Matrix x = input_gram(b, r);
  const Matrix a_hat = ad - b * r_fact.solve(s.transpose());
  const Eigen::PartialPivLU<Matrix> lu(Matrix::Identity(n, n) + x * p);
  if (std::abs(lu.determinant()) < 1e-300) {
    throw NumericalError("preview: I + BR⁻¹BᵀP is singular");
  }
  ClosedLoopMap out;
  out.g = lu.solve(a_hat);
  out.identity_gap = (out.g - (ad + b * k)).norm() / std::max(1.0, out.g.norm());
  return out;
}

std::vector<Vector> feedforward_sequence(const Matrix& p, const Matrix& g, const Matrix& b,
                                         const Matrix& r, const Vector& btilde, int horizon) {
  require_horizon(horizon);
  std::vector<Vector> out(static_cast<std::size_t>(horizon));
  if (horizon == 0) return out;
  Eigen::LDLT<Matrix> inner(symmetrize(r + b.transpose() * p * b));
  // Walk k from N−1 down so (Gᵀ)^{N−k−1}PB̃ grows by one factor per step.
  Vector carried = p * btilde;
  for (int k = horizon - 1; k >= 0; --k) {
    out[static_cast<std::size_t>(k)] = -inner.solve(b.transpose() * carried);
    carried = g.transpose() * carried;
  }
  return out;
}

GammaCost gamma_and_cost(const Matrix& p, const Matrix& g, const Matrix& b, const Matrix& r,
                         const Vector& btilde, int horizon) {
  require_horizon(horizon);
  const auto n = p.rows();
  const Matrix x = input_gram(b, r);
  const Matrix m = symmetrize(x * (Matrix::Identity(n, n) + p * x).inverse());

  GammaCost out;
  out.gamma = Matrix::Zero(n, n);
  Matrix g_pow = Matrix::Identity(n, n);
  for (int i = 0; i < horizon; ++i) {
    out.gamma += symmetrize(g_pow * m * g_pow.transpose());
    g_pow = g * g_pow;
  }
  const Vector pb = p * btilde;
  out.cost = btilde.dot(pb) - pb.dot(out.gamma * pb);
  return out;
}

PreviewPlan plan_preview(const LqrDesign& design, const Vector& btilde, int horizon) {
  require_horizon(horizon);
  const auto& sel = design.selection;
  const auto& sol = design.solution;
  if (btilde.size() != design.model.ad.rows()) {
    throw std::invalid_argument("plan_preview: disturbance direction must have n entries");
  }
  PreviewPlan plan;
  plan.horizon = horizon;
  plan.k = sol.k;
  const auto loop = closed_loop_G(design.model.ad, sel.b, sel.s, sel.r, sol.p, sol.k);
  plan.g = loop.g;
  plan.identity_gap = loop.identity_gap;
  plan.feedforward = feedforward_sequence(sol.p, plan.g, sel.b, sel.r, btilde, horizon);
  auto gc = gamma_and_cost(sol.p, plan.g, sel.b, sel.r, btilde, horizon);
  plan.gamma = std::move(gc.gamma);
  plan.optimal_cost = gc.cost;
  return plan;
}

double multi_impulse_measure(const ContinuousPlant& plant, const CostWeights& weights,
                             double period, int horizon, InputMode mode) {
  const auto design = design_lqr(plant, weights, period, mode);
  const auto& sel = design.selection;
  const auto& sol = design.solution;
  const Matrix g = closed_loop_G(design.model.ad, sel.b, sel.s, sel.r, sol.p, sol.k).g;
  double total = 0.0;
  for (Eigen::Index c = 0; c < plant.disturbances(); ++c) {
    const Vector column = plant.btilde().col(c);
    total += gamma_and_cost(sol.p, g, sel.b, sel.r, column, horizon).cost;
  }
  return std::sqrt(std::max(total, 0.0));
}

}  // namespace mri
