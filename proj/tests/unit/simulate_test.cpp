#include <gtest/gtest.h>

#include <cmath>

#include "mri/riccati.hpp"
#include "mri/simulate.hpp"
#include "oracles.hpp"

using mri::ContinuousPlant;
using mri::CostWeights;
using mri::InputMode;
using mri::Matrix;
using mri::Vector;

namespace {

Matrix m11(double v) { return Matrix::Constant(1, 1, v); }

ContinuousPlant souza() {
  Matrix a(2, 2);
  a << 0, 1, -6, 1;
  return ContinuousPlant(a, Eigen::Vector2d(0, 1), Eigen::Vector2d(1, 1));
}

CostWeights souza_weights() {
  Matrix q = Matrix::Zero(2, 2);
  q(0, 0) = 1;
  return CostWeights(q, m11(1), m11(1));
}

mri::SimulationOptions options(const Vector& x0, int steps, int substeps) {
  mri::SimulationOptions o;
  o.x0 = x0;
  o.steps = steps;
  o.substeps = substeps;
  return o;
}

}  // namespace

TEST(Simulate, ZeroEverythingStaysZero) {
  const auto p = souza();
  const auto traj = mri::simulate_closed_loop(p, souza_weights(), 1.0,
                                              mri::InputPolicy::zero(InputMode::mri, 2, 1),
                                              std::nullopt, options(Vector::Zero(2), 5, 4));
  for (const auto& s : traj.dense) EXPECT_EQ(s.x.norm(), 0.0);
  EXPECT_EQ(traj.j_cont, 0.0);
  EXPECT_EQ(traj.j_disc, 0.0);
  EXPECT_EQ(traj.sample_states.size(), 6u);
  EXPECT_EQ(mri::continuous_cost(p, souza_weights(), traj), 0.0);
}

TEST(Simulate, DenseStatesFollowTheFlow) {
  oracle::Gen gen(301);
  const Matrix a = gen.matrix(3, 3);
  const ContinuousPlant p(a, gen.matrix(3, 1));
  const Vector x0 = gen.vector(3);
  const auto traj = mri::simulate_closed_loop(p, CostWeights(Matrix::Identity(3, 3), m11(1), m11(1)),
                                              0.7, mri::InputPolicy::zero(InputMode::regular, 3, 1),
                                              std::nullopt, options(x0, 4, 8));
  EXPECT_EQ(traj.dense.size(), 4u * 8u + 1u);
  for (const auto& s : traj.dense) {
    const Vector want = oracle::exp_at(a, s.t) * x0;
    EXPECT_LT((s.x - want).norm(), 1e-10 * std::max(1.0, want.norm())) << s.t;
  }
}

TEST(Simulate, SampleStatesFollowDiscreteRecursion) {
  const auto p = souza();
  const auto w = souza_weights();
  const auto d = mri::design_lqr(p, w, 0.6, InputMode::mri);
  const mri::InputPolicy policy{d.solution.k, {}, InputMode::mri, false};
  const auto traj = mri::simulate_closed_loop(p, w, 0.6, policy, mri::DisturbanceSpec{2, p.btilde()},
                                              options(Eigen::Vector2d(1, -1), 10, 5));
  Vector x = Eigen::Vector2d(1, -1);
  for (int k = 0; k < 10; ++k) {
    if (k == 2) x += p.btilde();
    EXPECT_LT((traj.sample_states[static_cast<std::size_t>(k)] - x).norm(), 1e-10 * std::max(1.0, x.norm()));
    const auto i = static_cast<std::size_t>(k);
    x = d.model.ad * x + d.model.bd * traj.regular_inputs[i] + d.model.bi * traj.impulsive_inputs[i];
  }
}

TEST(Simulate, EventsAreFlagged) {
  const auto p = souza();
  const auto w = souza_weights();
  const auto d = mri::design_lqr(p, w, 1.0, InputMode::mri);
  const mri::InputPolicy policy{d.solution.k, {}, InputMode::mri, false};
  const auto traj = mri::simulate_closed_loop(p, w, 1.0, policy, mri::DisturbanceSpec{1, p.btilde()},
                                              options(Vector::Zero(2), 3, 2));
  int disturbances = 0, impulses = 0;
  for (const auto& s : traj.dense) {
    if (s.event == mri::SampleEvent::disturbance) {
      ++disturbances;
      EXPECT_DOUBLE_EQ(s.t, 1.0);
    }
    if (s.event == mri::SampleEvent::impulse) ++impulses;
  }
  EXPECT_EQ(disturbances, 1);
  EXPECT_EQ(impulses, 2);
}

TEST(Simulate, RiccatiValueOverLongHorizon) {
  const auto p = souza();
  const auto w = souza_weights();
  const auto d = mri::design_lqr(p, w, 1.0, InputMode::mri);
  const mri::InputPolicy policy{d.solution.k, {}, InputMode::mri, false};
  const Vector x0 = Eigen::Vector2d(1, 1);
  const auto traj = mri::simulate_closed_loop(p, w, 1.0, policy, std::nullopt, options(x0, 200, 64));
  const double value = x0.dot(d.solution.p * x0);
  EXPECT_NEAR(traj.j_disc, value, 1e-8 * value);
  EXPECT_NEAR(traj.j_cont, value, 1e-8 * value);
}

TEST(Simulate, SaturationNeverGoesNegative) {
  oracle::Gen gen(307);
  const auto p = souza();
  const auto w = souza_weights();
  const auto d = mri::design_lqr(p, w, 0.5, InputMode::mri);
  for (int trial = 0; trial < 10; ++trial) {
    const mri::InputPolicy policy{d.solution.k, {}, InputMode::mri, true};
    const auto traj = mri::simulate_closed_loop(p, w, 0.5, policy, std::nullopt,
                                                options(gen.vector(2, 3.0), 30, 2));
    for (std::size_t k = 0; k < traj.regular_inputs.size(); ++k) {
      EXPECT_GE(traj.regular_inputs[k].minCoeff(), 0.0);
      EXPECT_GE(traj.impulsive_inputs[k].minCoeff(), 0.0);
    }
  }
}

TEST(Simulate, DivergenceReportsStep) {
  const ContinuousPlant p(m11(60.0), m11(1.0));
  try {
    mri::simulate_closed_loop(p, CostWeights(m11(1), m11(1), m11(1)), 1.0,
                              mri::InputPolicy::zero(InputMode::mri, 1, 1), std::nullopt,
                              options(Vector::Ones(1), 50, 1));
    FAIL() << "expected divergence";
  } catch (const mri::DivergenceError& e) {
    EXPECT_GT(e.step, 3);
    EXPECT_LT(e.step, 50);
  }
}

TEST(Simulate, RejectsBadArguments) {
  const auto p = souza();
  const auto w = souza_weights();
  const auto zero = mri::InputPolicy::zero(InputMode::mri, 2, 1);
  auto opts = options(Vector::Zero(2), 0, 1);
  EXPECT_THROW(mri::simulate_closed_loop(p, w, 1.0, zero, std::nullopt, opts), std::invalid_argument);
  opts.steps = 1;
  opts.epsilon = 1.5;
  EXPECT_THROW(mri::simulate_closed_loop(p, w, 1.0, zero, std::nullopt, opts), std::invalid_argument);
  opts.epsilon.reset();
  const auto bad_gain = mri::InputPolicy::zero(InputMode::regular, 2, 1);
  mri::InputPolicy wrong = bad_gain;
  wrong.mode = InputMode::mri;
  EXPECT_THROW(mri::simulate_closed_loop(p, w, 1.0, wrong, std::nullopt, opts), std::invalid_argument);
  EXPECT_THROW(mri::impulse_hold_matrix(p, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(mri::impulse_hold_matrix(p, 1.0, 1.0), std::invalid_argument);
}

TEST(ContinuousCost, ConstantRegularInputWithoutStateWeight) {
  const ContinuousPlant p(m11(0), m11(1));
  const CostWeights w(m11(0), m11(1), m11(1));
  const std::vector<Vector> inputs(7, Eigen::Vector2d(1, 0));
  const auto r = mri::lemma1_check(p, w, 0.4, inputs, Vector::Zero(1), 7);
  EXPECT_NEAR(r.j_cont, 7 * 0.4, 1e-13);
  EXPECT_NEAR(r.j_disc, 7 * 0.4, 1e-13);
}

TEST(SampledCost, ZeroInputsFromRest) {
  const auto r = mri::lemma1_check(souza(), souza_weights(), 1.0, {}, Vector::Zero(2), 5);
  EXPECT_EQ(r.j_cont, 0.0);
  EXPECT_EQ(r.j_disc, 0.0);
  EXPECT_EQ(r.gap, 0.0);
}

TEST(SampledCost, FreeResponseAgainstQuadrature) {
  oracle::Gen gen(311);
  const Matrix a = gen.stable(3, 1.0, 0.3);
  const ContinuousPlant p(a, gen.matrix(3, 1));
  const Matrix q = gen.psd(3, 3);
  const CostWeights w(q, m11(1), m11(1));
  const Vector x0 = Vector::Unit(3, 0);
  const auto r = mri::lemma1_check(p, w, 0.5, {}, x0, 12);
  const Matrix gram = oracle::integrate(
      [&](double s) {
        const Matrix e = oracle::exp_at(a, s);
        return Matrix(e.transpose() * q * e);
      },
      0.0, 6.0);
  const double want = x0.dot(gram * x0);
  EXPECT_LE(r.gap, 1e-8);
  EXPECT_NEAR(r.j_cont, want, 1e-9 * want);
}

TEST(SampledCost, RandomInputsOnSouza) {
  oracle::Gen gen(313);
  std::vector<Vector> inputs;
  for (int k = 0; k < 50; ++k) inputs.push_back(gen.vector(2));
  const auto r = mri::lemma1_check(souza(), souza_weights(), 0.7, inputs, Eigen::Vector2d(1, 1), 50);
  EXPECT_LE(r.gap, 1e-6);
  EXPECT_GT(r.j_disc, 0.0);
}

TEST(ImpulseHold, IntegratorNeedsNoCorrection) {
  const ContinuousPlant p(Matrix::Zero(2, 2), (Matrix(2, 1) << 1, 2).finished());
  for (const double eps : {0.5, 0.1, 0.01}) {
    EXPECT_LT((mri::impulse_hold_matrix(p, 1.3, eps) - p.b()).norm(), 1e-14);
  }
}

TEST(ImpulseHold, ConvergesLinearly) {
  const auto p = souza();
  const Matrix bi = mri::sample_plant(p, 1.0).bi;
  EXPECT_LT((mri::impulse_hold_matrix(p, 1.0, 0.01) - bi).norm(), 0.03 * bi.norm());
  double prev = (mri::impulse_hold_matrix(p, 1.0, 0.2) - bi).norm();
  for (const double eps : {0.1, 0.05, 0.025, 0.0125}) {
    const double err = (mri::impulse_hold_matrix(p, 1.0, eps) - bi).norm();
    EXPECT_GT(err / prev, 0.4);
    EXPECT_LT(err / prev, 0.6);
    prev = err;
  }
}

TEST(ImpulseHold, ApproximateRunsApproachExactOnes) {
  const auto p = souza();
  const auto w = souza_weights();
  const auto d = mri::design_lqr(p, w, 1.0, InputMode::mri);
  const mri::InputPolicy policy{d.solution.k, {}, InputMode::mri, false};
  const Vector x0 = Eigen::Vector2d(1, 1);
  const auto exact = mri::simulate_closed_loop(p, w, 1.0, policy, std::nullopt, options(x0, 6, 4));
  double prev = 0.0;
  for (const double eps : {0.02, 0.01, 0.005}) {
    auto opts = options(x0, 6, 4);
    opts.epsilon = eps;
    const auto approx = mri::simulate_closed_loop(p, w, 1.0, policy, std::nullopt, opts);
    const double dev = (approx.sample_states.back() - exact.sample_states.back()).norm();
    if (prev > 0.0) {
      EXPECT_GT(dev / prev, 0.35);
      EXPECT_LT(dev / prev, 0.65);
    }
    prev = dev;
  }
  EXPECT_LT(prev, 0.01 * exact.sample_states.front().norm());
}

TEST(ImpulseHold, PulseAppearsInDenseInputs) {
  const ContinuousPlant p(m11(0), m11(1));
  const CostWeights w(m11(1), m11(1), m11(1));
  auto opts = options(Vector::Zero(1), 1, 4);
  opts.epsilon = 0.1;
  const auto traj = mri::simulate_inputs(p, w, 2.0, {Eigen::Vector2d(0, 1)}, opts);
  ASSERT_FALSE(traj.segments.empty());
  EXPECT_NEAR(traj.segments.front().duration, 0.2, 1e-15);
  EXPECT_NEAR(traj.segments.front().u(0), 5.0, 1e-12);
  EXPECT_NEAR(traj.sample_states.back()(0), 1.0, 1e-12);
}

TEST(Tail, CertificateBoundsTheRemainder) {
  const Matrix a = (Matrix(2, 2) << 0.5, 0.2, 0.0, -0.7).finished();
  const Matrix w = Matrix::Identity(2, 2);
  const Vector x0 = Eigen::Vector2d(3, -1);
  const auto cert = mri::horizon_for_tail(a, w, x0);
  EXPECT_LT(cert.tail, 1e-10);
  Vector x = x0;
  for (int k = 0; k < cert.steps; ++k) x = a * x;
  double brute = 0.0;
  for (int k = 0; k < 400; ++k) {
    brute += x.dot(w * x);
    x = a * x;
  }
  EXPECT_NEAR(cert.tail, brute, 1e-20 + 1e-10 * brute);
  EXPECT_TRUE(std::isinf(mri::quadratic_tail(Matrix::Identity(2, 2), w, x0)));
}
