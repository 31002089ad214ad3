#pragma once

// Shift-invariant reproducing kernels K = U Lambda_K U^T and the Fourier-domain
// metrics <x, y>_H = x_hat^T B y_hat of their RKHSs.

#include "gsis/core.hpp"
#include "gsis/graph.hpp"
#include "gsis/spaces.hpp"
#include "gsis/spectral.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gsis {

namespace detail {

/// Entrywise pseudo-inverse; entries at or below cutoff * max|v| map to 0.
inline Vector pseudo_inverse_diag(const Vector& v, double cutoff = 1e-12) {
  const double scale = v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
  Vector out = Vector::Zero(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > cutoff * scale) out(i) = 1.0 / v(i);
  }
  return out;
}

}  // namespace detail

class ShiftInvariantKernel {
 public:
  /// K = U diag(spectrum) U^T. The spectrum must be nonnegative up to
  /// 1e-12 * max|spectrum|; tiny negative rounding is clipped to zero.
  ShiftInvariantKernel(DecompositionPtr decomp, Vector spectrum) : decomp_(std::move(decomp)) {
    require_same_size(spectrum.size(), decomp_->order(), "kernel spectrum");
    const double scale = spectrum.size() ? spectrum.cwiseAbs().maxCoeff() : 0.0;
    for (Index n = 0; n < spectrum.size(); ++n) {
      if (!std::isfinite(spectrum(n)) || spectrum(n) < -1e-12 * scale) {
        throw InvalidArgument("kernel spectrum must be finite and nonnegative (frequency " +
                              std::to_string(n) + ")");
      }
      spectrum(n) = std::max(spectrum(n), 0.0);
      if (spectrum(n) > 1e-12 * scale) omega_.push_back(n);
    }
    spectrum_ = std::move(spectrum);
    const Matrix& u = decomp_->basis();
    k_ = u * spectrum_.asDiagonal() * u.transpose();
    k_ = 0.5 * (k_ + k_.transpose());
  }

  const Matrix& matrix() const noexcept { return k_; }
  /// lambda_K(n), n = 0..N-1.
  const Vector& spectrum() const noexcept { return spectrum_; }
  /// Frequencies with lambda_K(n) > 1e-12 * max lambda_K.
  const std::vector<Index>& omega() const noexcept { return omega_; }
  const DecompositionPtr& decomposition() const noexcept { return decomp_; }

 private:
  DecompositionPtr decomp_;
  Vector spectrum_;
  std::vector<Index> omega_;
  Matrix k_;
};

enum class KernelFamily { diffusion, random_walk, regularization, spline };

struct KernelParams {
  KernelFamily family = KernelFamily::diffusion;
  /// sigma for diffusion and regularization, a for random_walk, alpha for spline.
  double param = 1.0;
  /// Number of steps p for random_walk.
  int steps = 1;
};

/// Builds a kernel spectrally from the eigenvalues lambda(n) of base_shift
/// (usually the normalized Laplacian):
///   diffusion       exp(sigma^2 lambda / 2)
///   random_walk     (a - lambda)^(-p), a > 2
///   regularization  1 + sigma^2 lambda
///   spline          (lambda^+)^alpha
/// The regularization kernel is the listed operator I + sigma^2 L, not its
/// inverse as in most kernel-learning texts.
inline ShiftInvariantKernel make_kernel(const DecompositionPtr& decomp, const KernelParams& params,
                                        const ShiftMatrix& base_shift) {
  const auto mult = spectral_multiplier(*decomp, base_shift.matrix());
  if (mult.off_diagonal > 1e-8 * std::max(1.0, base_shift.matrix().norm())) {
    throw PreconditionError("base shift is not diagonalized by the Fourier basis");
  }
  const Vector& lam = mult.values;
  Vector k(lam.size());
  const double p = params.param;
  switch (params.family) {
    case KernelFamily::diffusion:
      k = (0.5 * p * p * lam.array()).exp();
      break;
    case KernelFamily::random_walk:
      if (!(p > 2.0)) throw InvalidArgument("random-walk kernel requires a > 2");
      if (params.steps < 1) throw InvalidArgument("random-walk kernel requires p >= 1");
      for (Index n = 0; n < lam.size(); ++n) {
        if (!(p - lam(n) > 0.0)) {
          throw InvalidArgument("random-walk kernel requires a to exceed every eigenvalue");
        }
        k(n) = std::pow(p - lam(n), -params.steps);
      }
      break;
    case KernelFamily::regularization:
      k = Vector::Ones(lam.size()) + p * p * lam;
      break;
    case KernelFamily::spline: {
      const Vector inv = detail::pseudo_inverse_diag(lam);
      for (Index n = 0; n < lam.size(); ++n) {
        if (inv(n) < 0.0) throw InvalidArgument("spline kernel needs a positive semidefinite base");
        k(n) = inv(n) == 0.0 ? 0.0 : std::pow(inv(n), p);
      }
      break;
    }
  }
  return ShiftInvariantKernel(decomp, std::move(k));
}

struct KernelCheck {
  bool symmetric = false;
  bool positive_semidefinite = false;
  bool commutes = false;
  double commutator_residual = 0.0;
  double min_eigenvalue = 0.0;
  bool ok() const noexcept { return symmetric && positive_semidefinite && commutes; }
};

/// Symmetry, PSD (eigenvalues >= -tol) and commutation with every shift.
inline KernelCheck check_shift_invariant_kernel(const Matrix& k, const ShiftSet& shifts,
                                                std::optional<double> tol = {}) {
  require_same_size(k.rows(), shifts.order(), "kernel");
  require_same_size(k.cols(), shifts.order(), "kernel");
  const double t = tol.value_or(scaled_tolerance(k.norm() * std::max(1.0, shifts.max_norm())));
  KernelCheck out;
  out.symmetric = (k - k.transpose()).norm() <= t;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (k + k.transpose()), Eigen::EigenvaluesOnly);
  out.min_eigenvalue = eig.eigenvalues()(0);
  out.positive_semidefinite = out.min_eigenvalue >= -t;
  const auto filt = is_polynomial_filter(k, shifts, nullptr, t);
  out.commutes = filt.commutes;
  out.commutator_residual = filt.residual;
  return out;
}

inline bool is_shift_invariant_kernel(const Matrix& k, const ShiftSet& shifts,
                                      std::optional<double> tol = {}) {
  return check_shift_invariant_kernel(k, shifts, tol).ok();
}

/// The reproducing kernel of a space under the Euclidean inner product: the
/// orthogonal projector U_Omega U_Omega^T.
inline ShiftInvariantKernel gsis_to_rkhs_kernel(const SignalSpace& space) {
  Vector spec = Vector::Zero(space.order());
  for (Index n : space.omega()) spec(n) = 1.0;
  return ShiftInvariantKernel(space.decomposition(), std::move(spec));
}

class RkhsMetric {
 public:
  explicit RkhsMetric(Vector b) : b_(std::move(b)) {
    for (Index n = 0; n < b_.size(); ++n) {
      if (!(b_(n) >= 0.0) || !std::isfinite(b_(n))) {
        throw InvalidArgument("metric weights must be finite and nonnegative");
      }
    }
  }
  const Vector& weights() const noexcept { return b_; }

 private:
  Vector b_;
};

/// <x, y>_H = x_hat^T B y_hat.
inline double rkhs_inner_product(const SpectralDecomposition& decomp, const RkhsMetric& metric,
                                 const Signal& x, const Signal& y) {
  require_same_size(metric.weights().size(), decomp.order(), "metric");
  return gft(decomp, x).dot(metric.weights().cwiseProduct(gft(decomp, y)));
}

/// (min_{b(n) > 0} b(n))^(-1/2): |x(i)| <= bound * ||x||_H for x supported
/// on supp(B).
inline double evaluation_bound(const RkhsMetric& metric) {
  double lo = std::numeric_limits<double>::infinity();
  for (Index n = 0; n < metric.weights().size(); ++n) {
    if (metric.weights()(n) > 0.0) lo = std::min(lo, metric.weights()(n));
  }
  if (!std::isfinite(lo)) throw InvalidArgument("metric has no positive weight");
  return 1.0 / std::sqrt(lo);
}

/// Kernel U B^+ U^T of the bandlimited space B_{supp B} with metric B.
inline ShiftInvariantKernel kernel_from_metric(const DecompositionPtr& decomp,
                                               const RkhsMetric& metric) {
  require_same_size(metric.weights().size(), decomp->order(), "metric");
  return ShiftInvariantKernel(decomp, detail::pseudo_inverse_diag(metric.weights()));
}

/// Canonical reproducing metric B = Lambda_K^+.
inline RkhsMetric metric_from_kernel(const ShiftInvariantKernel& kernel) {
  return RkhsMetric(detail::pseudo_inverse_diag(kernel.spectrum()));
}

}  // namespace gsis
