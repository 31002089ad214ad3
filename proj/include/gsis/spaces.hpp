#pragma once

// Shift-invariant and bandlimited spaces of graph signals, Krylov chains,
// canonical generators, Riesz/frame bounds and the uncertainty principle.
//
// Every shift-invariant space is held canonically as a frequency set Omega
// and the matching columns U_Omega of the Fourier basis.

#include "gsis/core.hpp"
#include "gsis/graph.hpp"
#include "gsis/krylov.hpp"
#include "gsis/spectral.hpp"

#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace gsis {

using GeneratorFamily = std::vector<Signal>;

struct BandlimitedOrigin {};
struct GeneratorOrigin {
  GeneratorFamily generators;
};
struct PrincipalOrigin {
  Signal generator;
  Matrix shift;  // T
};
using SpaceOrigin = std::variant<BandlimitedOrigin, GeneratorOrigin, PrincipalOrigin>;

class SignalSpace {
 public:
  SignalSpace(DecompositionPtr decomp, std::vector<Index> omega, SpaceOrigin origin)
      : decomp_(std::move(decomp)), omega_(sorted_unique(std::move(omega))),
        origin_(std::move(origin)) {
    check_index_set(omega_, decomp_->order(), "frequency set");
    basis_.resize(decomp_->order(), static_cast<Index>(omega_.size()));
    for (std::size_t k = 0; k < omega_.size(); ++k) {
      basis_.col(static_cast<Index>(k)) = decomp_->basis().col(omega_[k]);
    }
  }

  const std::vector<Index>& omega() const noexcept { return omega_; }
  /// Orthonormal columns u_n, n in Omega.
  const Matrix& basis() const noexcept { return basis_; }
  Index dim() const noexcept { return basis_.cols(); }
  Index order() const noexcept { return basis_.rows(); }
  const DecompositionPtr& decomposition() const noexcept { return decomp_; }
  const SpaceOrigin& origin() const noexcept { return origin_; }

  Signal project(const Signal& x) const {
    require_same_size(x.size(), order(), "project");
    return basis_ * (basis_.transpose() * x);
  }

  /// x lies in the space iff its Fourier energy off Omega is at most
  /// tol * ||x||.
  bool contains(const Signal& x, double tol = 1e-10) const {
    require_same_size(x.size(), order(), "contains");
    return (x - project(x)).norm() <= tol * x.norm();
  }

 private:
  DecompositionPtr decomp_;
  std::vector<Index> omega_;
  SpaceOrigin origin_;
  Matrix basis_;
};

inline SignalSpace bandlimited_space(const DecompositionPtr& decomp, std::vector<Index> omega) {
  return SignalSpace(decomp, std::move(omega), BandlimitedOrigin{});
}

namespace detail {

inline void check_generators(const GeneratorFamily& phis, Index n) {
  if (phis.empty()) throw InvalidArgument("generator family is empty");
  for (const auto& phi : phis) {
    require_same_size(phi.size(), n, "generator");
    if (phi.norm() == 0.0) throw InvalidArgument("generators must be nonzero");
  }
}

}  // namespace detail

/// Rotates U inside every repeated joint eigenspace so that the generators'
/// components there occupy the leading columns. Shift-invariant spaces
/// generated by Phi are then spanned by Fourier columns even when the joint
/// spectrum is not simple. Returns the input when nothing repeats.
inline DecompositionPtr adapt_to_generators(const DecompositionPtr& decomp,
                                            const GeneratorFamily& phis) {
  detail::check_generators(phis, decomp->order());
  Matrix u = decomp->basis();
  Matrix phi(decomp->order(), static_cast<Index>(phis.size()));
  for (std::size_t r = 0; r < phis.size(); ++r) phi.col(static_cast<Index>(r)) = phis[r];
  bool changed = false;
  for (const auto& cluster : decomp->joint_clusters()) {
    if (cluster.size() < 2) continue;
    const auto m = static_cast<Index>(cluster.size());
    Matrix uc(decomp->order(), m);
    for (Index k = 0; k < m; ++k) uc.col(k) = u.col(cluster[static_cast<std::size_t>(k)]);
    const Matrix g = uc.transpose() * phi;
    Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeFullU);
    Matrix rotated = uc * svd.matrixU();
    // Columns beyond the generator rank form an arbitrary orthonormal
    // completion; only the leading ones carry generator energy.
    for (Index k = 0; k < m; ++k) {
      normalize_sign(rotated.col(k));
      u.col(cluster[static_cast<std::size_t>(k)]) = rotated.col(k);
    }
    changed = true;
  }
  if (!changed) return decomp;
  return SpectralDecomposition::from_basis(decomp->shift_set(), std::move(u));
}

/// Spectral support union over the family: {n : |phi_hat(n)| >
/// support_tol * ||phi_hat||} for some phi.
inline std::vector<Index> spectral_support(const SpectralDecomposition& decomp,
                                           const GeneratorFamily& phis,
                                           double support_tol = 1e-10) {
  std::vector<Index> omega;
  std::vector<bool> in(static_cast<std::size_t>(decomp.order()), false);
  for (const auto& phi : phis) {
    const Signal hat = gft(decomp, phi);
    const double thr = support_tol * hat.norm();
    for (Index n = 0; n < hat.size(); ++n) {
      if (std::abs(hat(n)) > thr) in[static_cast<std::size_t>(n)] = true;
    }
  }
  for (Index n = 0; n < decomp.order(); ++n) {
    if (in[static_cast<std::size_t>(n)]) omega.push_back(n);
  }
  return omega;
}

/// The smallest shift-invariant space containing the generators, as B_Omega
/// with Omega the union of their spectral supports.
inline SignalSpace gsis_from_generators(const DecompositionPtr& decomp, const GeneratorFamily& phis,
                                        double support_tol = 1e-10) {
  auto adapted = adapt_to_generators(decomp, phis);
  auto omega = spectral_support(*adapted, phis, support_tol);
  return SignalSpace(std::move(adapted), std::move(omega), GeneratorOrigin{phis});
}

struct KrylovSubspace {
  /// Columns orthonormal under the chosen inner product, spanning H_n(Phi).
  Matrix basis;
  /// dims[k] = dim H_k(Phi), k = 0..n.
  std::vector<Index> dims;
};

struct KrylovOptions {
  std::optional<Matrix> sampling;
  DegeneratePolicy policy = DegeneratePolicy::error;
};

/// Orthonormal basis of H_n(Phi) = span{S^alpha phi : |alpha| <= n}.
inline KrylovSubspace krylov_subspace(const ShiftSet& shifts, const GeneratorFamily& phis,
                                      Index level, KrylovOptions opts = {}) {
  if (level < 0) throw InvalidArgument("Krylov level must be nonnegative");
  KrylovChain chain(shifts, phis, std::move(opts.sampling), opts.policy);
  bool growing = true;
  std::vector<Index> dims{chain.dim()};
  while (static_cast<Index>(dims.size()) <= level) {
    if (growing) growing = chain.advance();
    dims.push_back(chain.dim());
  }
  return {chain.basis().matrix(), std::move(dims)};
}

/// The monomial frame [S^alpha phi]_{|alpha| <= max_degree, phi in Phi},
/// columns in graded-lex order, generator-major.
inline Matrix monomial_frame(const ShiftSet& shifts, const GeneratorFamily& phis, int max_degree) {
  const auto alphas = graded_multi_indices(static_cast<int>(shifts.size()), max_degree);
  Matrix f(shifts.order(), static_cast<Index>(alphas.size() * phis.size()));
  Index col = 0;
  for (const auto& phi : phis) {
    require_same_size(phi.size(), shifts.order(), "generator");
    for (const auto& alpha : alphas) {
      PolynomialCoefficients c{{alpha, 1.0}};
      f.col(col++) = apply_polynomial_filter(shifts, c, phi);
    }
  }
  return f;
}

struct CanonicalGenerator {
  /// phi0 = inverse GFT of the indicator of Omega.
  Signal phi0;
  /// T = sum_l d_l S_l.
  Matrix shift;
  Vector coefficients;
  /// lambda_T(n) = d^T lambda(n) for every frequency n.
  Vector shift_spectrum;
  /// rank of {T^m phi0 : 0 <= m < #Omega}; equals #Omega on success.
  Index krylov_rank = 0;
};

/// A single generator and a single combined shift whose Krylov vectors
/// span B_Omega. Requires the joint-spectrum points on Omega to be distinct.
inline CanonicalGenerator canonical_generator(const DecompositionPtr& decomp,
                                              std::vector<Index> omega, std::uint64_t seed = 0) {
  omega = sorted_unique(std::move(omega));
  check_index_set(omega, decomp->order(), "frequency set");
  if (omega.empty()) throw InvalidArgument("canonical generator needs a nonempty frequency set");
  for (std::size_t a = 0; a < omega.size(); ++a) {
    for (std::size_t b = a + 1; b < omega.size(); ++b) {
      if ((decomp->joint_point(omega[a]) - decomp->joint_point(omega[b])).norm() <=
          decomp->coincidence_threshold()) {
        throw DistinctnessViolation("frequencies " + std::to_string(omega[a]) + " and " +
                                    std::to_string(omega[b]) +
                                    " share a joint-spectrum point; no single shift separates them");
      }
    }
  }

  const Index n = decomp->order();
  Vector indicator = Vector::Zero(n);
  for (Index k : omega) indicator(k) = 1.0;

  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 32; ++attempt) {
    const Vector d = detail::random_unit_vector(decomp->num_shifts(), rng);
    const Vector t = decomp->eigenvalues().transpose() * d;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, gap = lo;
    for (std::size_t a = 0; a < omega.size(); ++a) {
      lo = std::min(lo, t(omega[a]));
      hi = std::max(hi, t(omega[a]));
      for (std::size_t b = a + 1; b < omega.size(); ++b) {
        gap = std::min(gap, std::abs(t(omega[a]) - t(omega[b])));
      }
    }
    const double scale = std::max({std::abs(lo), std::abs(hi), hi - lo});
    if (omega.size() > 1 && !(gap > 1e-9 * scale)) continue;

    CanonicalGenerator out;
    out.phi0 = igft(*decomp, indicator);
    out.coefficients = d;
    out.shift_spectrum = t;
    out.shift = Matrix::Zero(n, n);
    for (Index l = 0; l < decomp->num_shifts(); ++l) {
      out.shift += d(l) * decomp->shifts()[static_cast<std::size_t>(l)].matrix();
    }
    ShiftSet single({ShiftMatrix(out.shift, decomp->shifts().graph(), 1e-8 * std::max(1.0, out.shift.norm()))});
    const auto krylov =
        krylov_subspace(single, {out.phi0}, static_cast<Index>(omega.size()) - 1);
    out.krylov_rank = krylov.dims.back();
    return out;
  }
  throw DistinctnessViolation("could not draw a shift combination separating the frequency set");
}

struct RieszBounds {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
};

/// Extreme singular values of V_{T,phi0} = [phi0_hat(n) lambda_T(n)^m],
/// n in Omega, 0 <= m < #Omega. They bound ||sum_m c_m T^m phi0|| / ||c||.
inline RieszBounds riesz_bounds(const SpectralDecomposition& decomp, const Matrix& t,
                                const Signal& phi0, std::vector<Index> omega) {
  omega = sorted_unique(std::move(omega));
  check_index_set(omega, decomp.order(), "frequency set");
  const auto mult = spectral_multiplier(decomp, t);
  if (mult.off_diagonal > 1e-8 * std::max(1.0, t.norm())) {
    throw PreconditionError("T is not diagonalized by the Fourier basis");
  }
  const Signal hat = gft(decomp, phi0);
  const auto k = static_cast<Index>(omega.size());
  if (k == 0) return {};
  Matrix v(k, k);
  for (Index r = 0; r < k; ++r) {
    const Index n = omega[static_cast<std::size_t>(r)];
    double p = 1.0;
    for (Index m = 0; m < k; ++m) {
      v(r, m) = hat(n) * p;
      p *= mult.values(n);
    }
  }
  const Vector s = singular_values(v);
  return {s(s.size() - 1), s(0)};
}

struct FrameBounds {
  double sigma_min_plus = 0.0;
  double sigma_max = 0.0;
  Index rank = 0;
};

/// Smallest nonzero and largest singular values of
/// F_hat = [lambda(n)^alpha phi0_hat(n)]_{n, |alpha| <= M-1}.
inline FrameBounds frame_bounds(const SpectralDecomposition& decomp, const Signal& phi0, int m) {
  if (m < 1) throw InvalidArgument("frame level M must be at least 1");
  const auto alphas = graded_multi_indices(static_cast<int>(decomp.num_shifts()), m - 1);
  const Signal hat = gft(decomp, phi0);
  Matrix f(decomp.order(), static_cast<Index>(alphas.size()));
  for (Index n = 0; n < decomp.order(); ++n) {
    const Vector point = decomp.joint_point(n);
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      f(n, static_cast<Index>(a)) = monomial(point, alphas[a]) * hat(n);
    }
  }
  const Vector s = singular_values(f);
  FrameBounds out;
  if (s.size() == 0 || s(0) == 0.0) return out;
  out.sigma_max = s(0);
  const double thr = 1e-10 * s(0) * static_cast<double>(std::max(f.rows(), f.cols()));
  out.sigma_min_plus = s(0);
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > thr) {
      out.sigma_min_plus = s(i);
      ++out.rank;
    }
  }
  return out;
}

enum class UniformNormMode { exact_bruteforce, infinity_bound };

struct UniformNormStar {
  double value = 0.0;
  /// Optimal vertex and frequency sets (exact mode only).
  std::vector<Index> vertices;
  std::vector<Index> frequencies;
};

/// ||U||_inf^* = max (#W #Omega)^{-1/2} over pairs with
/// sum_{i in W, n in Omega} u_n(i)^2 >= 1, or the upper bound ||U||_inf.
///
/// Exact mode enumerates vertex sets W; for a fixed W the best Omega of each
/// size takes the columns with the largest energy on W, so the smallest
/// feasible #Omega follows from a sorted prefix sum.
inline UniformNormStar uniform_norm_star(const Matrix& u, UniformNormMode mode) {
  const Index n = u.rows();
  if (mode == UniformNormMode::infinity_bound) return {u.cwiseAbs().maxCoeff(), {}, {}};
  if (n > 12) {
    throw SizeLimitError("exact uniform norm is limited to N <= 12 (got " + std::to_string(n) + ")");
  }
  const Matrix sq = u.cwiseAbs2();
  Index best_product = std::numeric_limits<Index>::max();
  std::uint32_t best_mask = 0;
  Index best_k = 0;
  std::vector<Index> order(static_cast<std::size_t>(u.cols()));
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    Vector energy = Vector::Zero(u.cols());
    Index w = 0;
    for (Index i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        energy += sq.row(i).transpose();
        ++w;
      }
    }
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(),
              [&](Index a, Index b) { return energy(a) > energy(b); });
    double acc = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
      acc += energy(order[k]);
      if (acc >= 1.0 - 1e-12) {
        const Index product = w * static_cast<Index>(k + 1);
        if (product < best_product) {
          best_product = product;
          best_mask = mask;
          best_k = static_cast<Index>(k + 1);
        }
        break;
      }
    }
  }
  UniformNormStar out;
  out.value = 1.0 / std::sqrt(static_cast<double>(best_product));
  Vector energy = Vector::Zero(u.cols());
  for (Index i = 0; i < n; ++i) {
    if (best_mask & (1u << i)) {
      out.vertices.push_back(i);
      energy += sq.row(i).transpose();
    }
  }
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return energy(a) > energy(b); });
  out.frequencies.assign(order.begin(), order.begin() + best_k);
  std::sort(out.frequencies.begin(), out.frequencies.end());
  return out;
}

struct UncertaintyReport {
  Index support_size = 0;
  Index space_dim = 0;
  /// (||U||_inf^*)^{-2}, or the weaker ||U||_inf^{-2} when N > 12.
  double lower_bound = 0.0;
  bool exact_norm = false;
  bool holds = false;
};

/// Checks #supp(phi0) * dim H(phi0) >= (||U||_inf^*)^{-2}.
inline UncertaintyReport uncertainty_check(const DecompositionPtr& decomp, const Signal& phi0,
                                           double support_tol = 1e-10) {
  require_same_size(phi0.size(), decomp->order(), "uncertainty_check");
  const double peak = phi0.cwiseAbs().maxCoeff();
  if (!(peak > 0.0)) throw InvalidArgument("uncertainty check needs a nonzero signal");
  UncertaintyReport out;
  for (Index i = 0; i < phi0.size(); ++i) {
    if (std::abs(phi0(i)) > support_tol * peak) ++out.support_size;
  }
  // The norm is taken on the same basis that carries the spectral support.
  const auto space = gsis_from_generators(decomp, {phi0}, support_tol);
  out.space_dim = space.dim();
  out.exact_norm = decomp->order() <= 12;
  const double norm = uniform_norm_star(space.decomposition()->basis(), out.exact_norm
                                                             ? UniformNormMode::exact_bruteforce
                                                             : UniformNormMode::infinity_bound)
                          .value;
  out.lower_bound = 1.0 / (norm * norm);
  out.holds = static_cast<double>(out.support_size * out.space_dim) >= out.lower_bound - 1e-9;
  return out;
}

/// True iff S_l b stays in span(basis) for every column b and shift, up to
/// tol * ||b||. The columns need not be orthonormal.
inline bool is_shift_invariant(const Matrix& basis, const ShiftSet& shifts, double tol = 1e-10) {
  require_same_size(basis.rows(), shifts.order(), "is_shift_invariant");
  if (basis.cols() == 0) return true;
  Eigen::JacobiSVD<Matrix> svd(basis, Eigen::ComputeThinU);
  const Index r = numerical_rank(basis);
  const Matrix q = svd.matrixU().leftCols(r);
  for (Index j = 0; j < basis.cols(); ++j) {
    const Vector b = basis.col(j);
    for (const auto& s : shifts) {
      const Vector sb = s.matrix() * b;
      if ((sb - q * (q.transpose() * sb)).norm() > tol * std::max(b.norm(), 1e-300)) return false;
    }
  }
  return true;
}

inline bool is_shift_invariant(const SignalSpace& space, const ShiftSet& shifts,
                               double tol = 1e-10) {
  return is_shift_invariant(space.basis(), shifts, tol);
}

}  // namespace gsis
