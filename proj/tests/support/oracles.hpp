// Independent reference computations for tests. Nothing here calls the
// block-exponential or Riccati code under test.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Matrix exp_at(const Matrix& a, double t) {
  const Matrix m = a * t;
  return m.exp();
}

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
inline constexpr double kXgk[8] = {0.991455371120812639, 0.949107912342758525,
                                   0.864864423359769073, 0.741531185599394440,
                                   0.586087235467691130, 0.405845151377397167,
                                   0.207784955007898468, 0.000000000000000000};
inline constexpr double kWgk[8] = {0.022935322010529225, 0.063092092629978553,
                                   0.104790010322250184, 0.140653259715525919,
                                   0.169004726639267903, 0.190350578064785410,
                                   0.204432940075298892, 0.209482141084727828};
inline constexpr double kWg[4] = {0.129484966168869693, 0.279705391489276668,
                                  0.381830050505118945, 0.417959183673469388};

inline void gk15(const std::function<Matrix(double)>& f, double a, double b, Matrix& kronrod,
                 Matrix& gauss) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const Matrix fc = f(c);
  kronrod = kWgk[7] * fc;
  gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const Matrix sum = f(c - h * kXgk[j]) + f(c + h * kXgk[j]);
    kronrod += kWgk[j] * sum;
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  kronrod *= h;
  gauss *= h;
}

inline Matrix adaptive(const std::function<Matrix(double)>& f, double a, double b, double tol,
                       int depth) {
  Matrix k, g;
  gk15(f, a, b, k, g);
  if ((k - g).norm() <= tol * std::max(1.0, k.norm()) || depth == 0) return k;
  const double m = 0.5 * (a + b);
  return adaptive(f, a, m, 0.5 * tol, depth - 1) + adaptive(f, m, b, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod quadrature of a matrix-valued integrand.
inline Matrix integrate(const std::function<Matrix(double)>& f, double a, double b,
                        double tol = 1e-13) {
  return detail::adaptive(f, a, b, tol, 30);
}

/// ∫₀ˢ e^{Aτ}dτ by quadrature.
inline Matrix exp_integral(const Matrix& a, double s) {
  if (s == 0.0) return Matrix::Zero(a.rows(), a.cols());
  return integrate([&](double t) { return exp_at(a, t); }, 0.0, s);
}

struct CostOracle {
  Matrix qd, sd, rd;
};

/// Discrete-equivalent cost matrices by nested quadrature of the
/// integrand [e^{As}, ∫₀ˢe^{Aτ}dτ B, e^{As}B]ᵀ Q [·].
inline CostOracle cost_by_quadrature(const Matrix& a, const Matrix& b, const Matrix& q,
                                     const Matrix& rc, const Matrix& ri, double period) {
  const auto n = a.rows();
  const auto m = b.cols();
  auto integrand = [&](double s) {
    Matrix l(n, n + 2 * m);
    const Matrix e = exp_at(a, s);
    l << e, exp_integral(a, s) * b, e * b;
    return Matrix(l.transpose() * q * l);
  };
  const Matrix full = integrate(integrand, 0.0, period, 1e-12);
  CostOracle out;
  out.qd = full.topLeftCorner(n, n);
  out.sd = full.topRightCorner(n, 2 * m);
  out.rd = full.bottomRightCorner(2 * m, 2 * m);
  out.rd.topLeftCorner(m, m) += period * rc;
  out.rd.bottomRightCorner(m, m) += ri;
  return out;
}

/// Root of a continuous scalar function with a sign change on [lo, hi].
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Stabilizing root of the scalar DARE with cross term,
/// p = q + a²p − (abp + s)²/(r + b²p), found by bisection.
inline double scalar_dare(double a, double b, double q, double s, double r) {
  auto f = [&](double p) { return q + a * a * p - std::pow(a * b * p + s, 2) / (r + b * b * p) - p; };
  double hi = 1.0;
  while (f(hi) > 0) hi *= 2.0;
  return bisect(f, 0.0, hi);
}

/// Seeded generator for random plants and weights.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

  Matrix matrix(Eigen::Index r, Eigen::Index c, double scale = 1.0) {
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = uniform(-scale, scale);
    return m;
  }
  Vector vector(Eigen::Index n, double scale = 1.0) { return matrix(n, 1, scale); }

  /// A with spectrum shifted so max Re λ = -margin.
  Matrix stable(Eigen::Index n, double scale, double margin) {
    Matrix a = matrix(n, n, scale);
    const Eigen::VectorXcd ev = a.eigenvalues();
    double top = -1e300;
    for (Eigen::Index i = 0; i < ev.size(); ++i) top = std::max(top, ev(i).real());
    a -= (top + margin) * Matrix::Identity(n, n);
    return a;
  }

  Matrix spd(Eigen::Index n, double floor = 0.1) {
    const Matrix g = matrix(n, n);
    return g * g.transpose() + floor * Matrix::Identity(n, n);
  }
  Matrix psd(Eigen::Index n, Eigen::Index rank) {
    const Matrix g = matrix(n, rank);
    return g * g.transpose();
  }

  /// Well-conditioned invertible matrix: orthogonal times a diagonal in [0.5, 2].
  Matrix conditioned(Eigen::Index n) {
    Eigen::HouseholderQR<Matrix> qr(matrix(n, n));
    Matrix q = qr.householderQ();
    Vector d(n);
    for (Eigen::Index i = 0; i < n; ++i) d(i) = uniform(0.5, 2.0);
    return q * d.asDiagonal();
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

inline double rel_err(const Matrix& got, const Matrix& want) {
  return (got - want).norm() / std::max(want.norm(), 1e-300);
}

}  // namespace oracle
