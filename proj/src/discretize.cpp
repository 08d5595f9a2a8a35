#include "mri/discretize.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mri {
namespace {

void require_period(double period, std::string_view what) {
  if (!std::isfinite(period) || period < kMinPeriod) {
    throw std::invalid_argument(std::string(what) + ": sampling period must be finite and >= 1e-12, got " +
                                std::to_string(period));
  }
}

double min_symmetric_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void require_symmetric(const Matrix& m, std::string_view what) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument(std::string(what) + " must be symmetric");
  }
}

}  // namespace

std::string_view to_string(InputMode mode) {
  switch (mode) {
    case InputMode::regular:
      return "regular";
    case InputMode::impulsive:
      return "impulsive";
    case InputMode::mri:
      return "mri";
  }
  return "unknown";
}

std::optional<InputMode> parse_input_mode(std::string_view text) {
  if (text == "regular") return InputMode::regular;
  if (text == "impulsive") return InputMode::impulsive;
  if (text == "mri") return InputMode::mri;
  return std::nullopt;
}

ContinuousPlant::ContinuousPlant(Matrix a, Matrix b, Matrix btilde)
    : a_(std::move(a)), b_(std::move(b)), btilde_(std::move(btilde)) {
  require_square(a_, "plant A");
  if (b_.rows() != a_.rows() || b_.cols() < 1) {
    throw std::invalid_argument("plant B must be n x m with m >= 1 and n = rows(A)");
  }
  if (btilde_.rows() != a_.rows() || btilde_.cols() < 1) {
    throw std::invalid_argument("plant Btilde must be n x r with r >= 1 and n = rows(A)");
  }
  require_finite(a_, "plant A");
  require_finite(b_, "plant B");
  require_finite(btilde_, "plant Btilde");
}

ContinuousPlant::ContinuousPlant(Matrix a, Matrix b)
    : ContinuousPlant(a, b, Matrix::Zero(a.rows(), 1)) {}

CostWeights::CostWeights(Matrix q, Matrix rc, Matrix ri)
    : q_(std::move(q)), rc_(std::move(rc)), ri_(std::move(ri)) {
  require_square(q_, "weight Q");
  require_square(rc_, "weight Rc");
  require_square(ri_, "weight Ri");
  if (rc_.rows() != ri_.rows()) {
    throw std::invalid_argument("weights Rc and Ri must have the same size");
  }
  require_finite(q_, "weight Q");
  require_finite(rc_, "weight Rc");
  require_finite(ri_, "weight Ri");
  require_symmetric(q_, "weight Q");
  require_symmetric(rc_, "weight Rc");
  require_symmetric(ri_, "weight Ri");
  if (min_symmetric_eigenvalue(q_) < -1e-12 * std::max(1.0, q_.norm())) {
    throw std::invalid_argument("weight Q must be positive semidefinite");
  }
  if (min_symmetric_eigenvalue(rc_) <= 0.0) {
    throw std::invalid_argument("weight Rc must be positive definite");
  }
  if (min_symmetric_eigenvalue(ri_) <= 0.0) {
    throw std::invalid_argument("weight Ri must be positive definite");
  }
}

void CostWeights::check_against(const ContinuousPlant& plant) const {
  if (q_.rows() != plant.states()) {
    throw std::invalid_argument("weight Q must be n x n with n = plant states");
  }
  if (rc_.rows() != plant.inputs()) {
    throw std::invalid_argument("weights Rc, Ri must be m x m with m = plant inputs");
  }
}

Matrix SampledModel::bdi() const {
  Matrix out(bd.rows(), bd.cols() + bi.cols());
  out << bd, bi;
  return out;
}

SampledModel sample_plant(const ContinuousPlant& plant, double period) {
  require_period(period, "sample_plant");
  auto ints = expm_block_integrals(plant.a(), plant.b(), period);
  SampledModel out;
  out.period = period;
  out.bi = ints.transition * plant.b();
  out.ad = std::move(ints.transition);
  out.atilde = std::move(ints.integral);
  out.bd = std::move(ints.input);
  return out;
}

SampledCost cost_matrices(const ContinuousPlant& plant, const CostWeights& weights,
                          double period) {
  require_period(period, "cost_matrices");
  weights.check_against(plant);
  const Eigen::Index n = plant.states();
  const Eigen::Index m = plant.inputs();

  // On one interval, x(s) = [I 0]·e^{Es}·[x_k + B u_i; u_c] with
  // E = [[A, B], [0, 0]], so the integrand of the cost is a quadratic form
  // in z = L·[x_k; u_c; u_i] for the fixed selector L below.
  Matrix e = Matrix::Zero(n + m, n + m);
  e.topLeftCorner(n, n) = plant.a();
  e.topRightCorner(n, m) = plant.b();
  Matrix w = Matrix::Zero(n + m, n + m);
  w.topLeftCorner(n, n) = weights.q();
  const Matrix gram_z = gram_integral(e, w, period);

  Matrix selector = Matrix::Zero(n + m, n + 2 * m);
  selector.topLeftCorner(n, n).setIdentity();
  selector.block(0, n + m, n, m) = plant.b();
  selector.block(n, n, m, m).setIdentity();
  const Matrix gram = symmetrize(selector.transpose() * gram_z * selector);

  SampledCost out;
  out.qd = gram.topLeftCorner(n, n);
  out.sd = gram.topRightCorner(n, 2 * m);
  out.rd = gram.bottomRightCorner(2 * m, 2 * m);
  out.rd.topLeftCorner(m, m) += period * weights.rc();
  out.rd.bottomRightCorner(m, m) += weights.ri();
  return out;
}

InputSelection restrict_input_mode(const SampledModel& model, const SampledCost& cost,
                                   InputMode mode) {
  const Eigen::Index m = model.bd.cols();
  switch (mode) {
    case InputMode::mri:
      return {mode, model.bdi(), cost.sd, cost.rd};
    case InputMode::regular:
      return {mode, model.bd, cost.sd.leftCols(m), cost.rd.topLeftCorner(m, m)};
    case InputMode::impulsive:
      return {mode, model.bi, cost.sd.rightCols(m), cost.rd.bottomRightCorner(m, m)};
  }
  throw std::invalid_argument("restrict_input_mode: unknown mode");
}

Vector expand_input(const Vector& selected, InputMode mode, Eigen::Index inputs) {
  Vector full = Vector::Zero(2 * inputs);
  switch (mode) {
    case InputMode::mri:
      full = selected;
      break;
    case InputMode::regular:
      full.head(inputs) = selected;
      break;
    case InputMode::impulsive:
      full.tail(inputs) = selected;
      break;
  }
  return full;
}

}  // namespace mri
