#include "mri/controllability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mri/errors.hpp"

namespace mri {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_controllable(const ContinuousPlant& plant) {
  if (!kalman_controllable(plant.a(), plant.b())) {
    throw HypothesisViolation("the continuous pair (A, B) is not controllable");
  }
}

// True when x is within tol of a rational p/q with q <= max_den.
bool nearly_rational(double x, double tol, int max_den = 1000) {
  for (int q = 1; q <= max_den; ++q) {
    const double scaled = x * q;
    if (std::abs(scaled - std::round(scaled)) <= tol * q) return true;
  }
  return false;
}

}  // namespace

bool kalman_controllable(const Matrix& a, const Matrix& b, double tol) {
  require_square(a, "kalman_controllable");
  if (b.rows() != a.rows()) {
    throw std::invalid_argument("kalman_controllable: B must have as many rows as A");
  }
  const Eigen::Index n = a.rows();
  const Eigen::Index q = b.cols();
  if (q == 0) return false;

  // Rank is unchanged by rescaling each Krylov block, which keeps high
  // powers of A from swamping the threshold.
  Matrix krylov(n, n * q);
  Matrix block = b;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double scale = block.norm();
    krylov.middleCols(k * q, q) = scale > 0.0 ? Matrix(block / scale) : block;
    block = a * krylov.middleCols(k * q, q);
  }
  return numerical_rank(krylov, tol) == n;
}

ResonantSet resonant_eigenvalues(const Matrix& a, double period, double tol) {
  if (!(period > 0.0)) {
    throw std::invalid_argument("resonant_eigenvalues: period must be positive");
  }
  const Spectrum spec = eigenvalues(a);
  ResonantSet out;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    ResonantEntry entry{spec[i], {}, {}};
    for (std::size_t j = 0; j < spec.size(); ++j) {
      if (i == j) continue;
      const auto diff = spec[i] - spec[j];
      if (std::abs(diff.real()) > tol * (1.0 + std::abs(spec[i]))) continue;
      const double turns = period * diff.imag() / kTwoPi;
      const double ell = std::round(turns);
      if (ell == 0.0 || std::abs(turns - ell) > tol * (1.0 + period)) continue;
      entry.partners.push_back(spec[j]);
      entry.multiples.push_back(static_cast<long>(ell));
    }
    if (!entry.partners.empty()) out.push_back(std::move(entry));
  }
  return out;
}

ControllabilityReport reduced_hautus_mri(const ContinuousPlant& plant, double period) {
  require_controllable(plant);
  const SampledModel model = sample_plant(plant, period);
  const Eigen::Index n = plant.states();
  const Eigen::Index m = plant.inputs();

  ControllabilityReport report;
  report.mode = InputMode::mri;
  report.resonant_set = resonant_eigenvalues(plant.a(), period);
  report.margin = std::numeric_limits<double>::infinity();

  for (const auto& entry : report.resonant_set) {
    const std::complex<double> shift = std::exp(entry.eigenvalue * period);
    Eigen::MatrixXcd stacked(n + 2 * m, n);
    stacked.topRows(n) = model.ad.transpose().cast<std::complex<double>>();
    stacked.topRows(n).diagonal().array() -= shift;
    stacked.middleRows(n, m) = model.bd.transpose().cast<std::complex<double>>();
    stacked.bottomRows(m) = plant.b().transpose().cast<std::complex<double>>();

    const Matrix real = real_doubling(stacked);
    const Vector sv = singular_values(real);
    const double smax = sv.maxCoeff();
    report.margin = std::min(report.margin, smax > 0.0 ? sv.minCoeff() / smax : 0.0);

    // Doubling maps a complex kernel of dimension d to a real one of 2d.
    const int kernel = null_space_dim(real) / 2;
    if (kernel > 0) report.failures.push_back({entry.eigenvalue, kernel});
  }
  report.controllable = report.failures.empty();
  return report;
}

bool is_pathological(const ContinuousPlant& plant, double period, InputMode mode) {
  require_controllable(plant);
  const SampledModel model = sample_plant(plant, period);
  switch (mode) {
    case InputMode::regular:
      return !kalman_controllable(model.ad, model.bd);
    case InputMode::impulsive:
      return !kalman_controllable(model.ad, model.bi);
    case InputMode::mri:
      return !kalman_controllable(model.ad, model.bdi());
  }
  throw std::invalid_argument("is_pathological: unknown mode");
}

std::vector<CandidatePeriod> candidate_pathological_periods(const Matrix& a, double horizon,
                                                            double tol) {
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("candidate_pathological_periods: horizon must be positive");
  }
  const Spectrum spec = eigenvalues(a);
  std::vector<CandidatePeriod> raw;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    for (std::size_t j = i + 1; j < spec.size(); ++j) {
      const auto l1 = spec[i];
      const auto l2 = spec[j];
      const double scale = 1.0 + std::max(std::abs(l1), std::abs(l2));
      if (std::abs(l1.real() - l2.real()) > tol * scale) continue;
      const double gap = std::abs(l2.imag() - l1.imag());
      if (gap <= tol * scale) continue;

      const double base = kTwoPi / gap;
      bool per_multiple = false;
      if (std::abs(l1.real()) <= tol * scale) {
        const double b1 = l1.imag();
        const double b2 = l2.imag();
        if (std::abs(b1) <= tol * scale || std::abs(b2) <= tol * scale) {
          per_multiple = true;  // an eigenvalue at the origin
        } else {
          per_multiple = nearly_rational(b2 / b1, tol * (1.0 + std::abs(b2 / b1)));
        }
      }
      for (long ell = 1; ell * base <= horizon * (1.0 + tol); ++ell) {
        raw.push_back({ell * base, base, ell, per_multiple});
      }
    }
  }
  std::sort(raw.begin(), raw.end(),
            [](const auto& x, const auto& y) { return x.period < y.period; });

  std::vector<CandidatePeriod> out;
  for (const auto& c : raw) {
    if (!out.empty() && std::abs(out.back().period - c.period) <= tol * (1.0 + c.period)) {
      auto& kept = out.back();
      kept.per_multiple_test = kept.per_multiple_test || c.per_multiple_test;
      if (c.base_period > kept.base_period) {
        kept.base_period = c.base_period;
        kept.multiple = c.multiple;
      }
      continue;
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace mri
