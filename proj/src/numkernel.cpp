#include "mri/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace mri {

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entries");
  }
}

void require_square(const Matrix& m, std::string_view what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument(std::string(what) + ": expected a non-empty square matrix, got " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

Matrix expm(const Matrix& m) {
  require_square(m, "expm");
  require_finite(m, "expm");
  return m.exp();
}

ExponentialIntegrals expm_block_integrals(const Matrix& a, const Matrix& b, double period) {
  require_square(a, "expm_block_integrals");
  if (b.rows() != a.rows()) {
    throw std::invalid_argument("expm_block_integrals: B must have as many rows as A");
  }
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw std::invalid_argument("expm_block_integrals: period must be positive and finite");
  }
  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.cols();

  // [[A, I, B], [0, 0, 0], [0, 0, 0]] exponentiates to
  // [[e^{AT}, ∫e^{Aτ}, (∫e^{Aτ})B], [0, I, 0], [0, 0, I]].
  Matrix aug = Matrix::Zero(2 * n + m, 2 * n + m);
  aug.topLeftCorner(n, n) = a;
  aug.block(0, n, n, n).setIdentity();
  aug.block(0, 2 * n, n, m) = b;
  const Matrix phi = expm(aug * period);

  return {phi.topLeftCorner(n, n), phi.block(0, n, n, n), phi.block(0, 2 * n, n, m)};
}

Matrix gram_integral(const Matrix& f, const Matrix& w, double period) {
  require_square(f, "gram_integral");
  if (w.rows() != f.rows() || w.cols() != f.cols()) {
    throw std::invalid_argument("gram_integral: weight shape must match the generator");
  }
  if (!(period > 0.0)) {
    throw std::invalid_argument("gram_integral: period must be positive");
  }
  const Eigen::Index k = f.rows();
  Matrix aug = Matrix::Zero(2 * k, 2 * k);
  aug.topLeftCorner(k, k) = -f.transpose();
  aug.topRightCorner(k, k) = w;
  aug.bottomRightCorner(k, k) = f;
  const Matrix phi = expm(aug * period);
  // phi = [[e^{-Fᵀt}, e^{-Fᵀt}·Gram], [0, e^{Ft}]]
  return symmetrize(phi.bottomRightCorner(k, k).transpose() * phi.topRightCorner(k, k));
}

Spectrum eigenvalues(const Matrix& m) {
  require_square(m, "eigenvalues");
  require_finite(m, "eigenvalues");
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigenvalues: eigensolver failed to converge");
  }
  Spectrum raw(solver.eigenvalues().begin(), solver.eigenvalues().end());

  // Pair each upper-half-plane eigenvalue with its nearest lower-half-plane
  // partner and replace both by the averaged exact conjugates.
  Spectrum out;
  out.reserve(raw.size());
  std::vector<bool> used(raw.size(), false);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (used[i]) continue;
    const auto lam = raw[i];
    const double tiny = 64 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(lam));
    if (std::abs(lam.imag()) <= tiny) {
      used[i] = true;
      out.emplace_back(lam.real(), 0.0);
      continue;
    }
    std::size_t best = raw.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < raw.size(); ++j) {
      if (j == i || used[j] || raw[j].imag() * lam.imag() >= 0.0) continue;
      const double d = std::abs(raw[j] - std::conj(lam));
      if (d < best_dist) {
        best_dist = d;
        best = j;
      }
    }
    used[i] = true;
    if (best == raw.size()) {
      out.emplace_back(lam.real(), 0.0);
      continue;
    }
    used[best] = true;
    const std::complex<double> avg = 0.5 * (lam + std::conj(raw[best]));
    out.push_back(avg);
    out.push_back(std::conj(avg));
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  return out;
}

Vector singular_values(const Matrix& m) {
  require_finite(m, "singular_values");
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues();
}

int numerical_rank(const Matrix& m, double tol) {
  if (!(tol > 0.0 && tol < 1.0)) {
    throw std::invalid_argument("numerical_rank: tolerance must lie in (0, 1)");
  }
  if (m.size() == 0) return 0;
  const Vector s = singular_values(m);
  const double smax = s.size() > 0 ? s.maxCoeff() : 0.0;
  if (smax == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > tol * smax) ++rank;
  }
  return rank;
}

int null_space_dim(const Matrix& m, double tol) {
  return static_cast<int>(m.cols()) - numerical_rank(m, tol);
}

double spectral_radius(const Matrix& m) {
  double r = 0.0;
  for (const auto& lam : eigenvalues(m)) r = std::max(r, std::abs(lam));
  return r;
}

Matrix stein_sum(const Matrix& a, const Matrix& w) {
  Matrix sum = w;
  Matrix power = a;
  for (int i = 0; i < 64; ++i) {
    const Matrix add = power.transpose() * sum * power;
    sum += add;
    if (add.norm() <= 1e-17 * sum.norm()) break;
    power = power * power;
  }
  return symmetrize(sum);
}

Matrix real_doubling(const Eigen::MatrixXcd& m) {
  const Eigen::Index r = m.rows();
  const Eigen::Index c = m.cols();
  Matrix out(2 * r, 2 * c);
  out.topLeftCorner(r, c) = m.real();
  out.topRightCorner(r, c) = -m.imag();
  out.bottomLeftCorner(r, c) = m.imag();
  out.bottomRightCorner(r, c) = m.real();
  return out;
}

}  // namespace mri
