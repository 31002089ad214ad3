#pragma once

// Simultaneous diagonalization of commuting shifts, the graph Fourier
// transform, polynomial filters and spectral projectors.

#include "gsis/core.hpp"
#include "gsis/graph.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

namespace gsis {

/// Joint eigendecomposition S_l = U diag(lambdas.row(l)) U^T of a commuting
/// shift family. Columns of U are ordered by joint-spectrum point
/// (lexicographic in l) and sign-normalized so that the first entry with
/// magnitude above 1e-8 is positive.
class SpectralDecomposition {
 public:
  /// Builds the decomposition for a given orthogonal basis without
  /// reordering or sign changes. Eigenvalues are read off diag(U^T S_l U).
  static std::shared_ptr<const SpectralDecomposition> from_basis(
      std::shared_ptr<const ShiftSet> shifts, Matrix u) {
    auto d = std::shared_ptr<SpectralDecomposition>(new SpectralDecomposition());
    d->shifts_ = std::move(shifts);
    d->u_ = std::move(u);
    d->finalize();
    return d;
  }

  const Matrix& basis() const noexcept { return u_; }
  /// L x N array, eigenvalues()(l, n) = lambda_l(n).
  const Matrix& eigenvalues() const noexcept { return lambdas_; }
  Vector joint_point(Index n) const { return lambdas_.col(n); }
  const ShiftSet& shifts() const noexcept { return *shifts_; }
  const std::shared_ptr<const ShiftSet>& shift_set() const noexcept { return shifts_; }
  Index order() const noexcept { return u_.rows(); }
  Index num_shifts() const noexcept { return lambdas_.rows(); }

  /// Joint-spectrum points are pairwise distinct (Assumption 1).
  bool assumption1_holds() const noexcept { return assumption1_; }
  /// Smallest pairwise distance between joint-spectrum points (+inf if N = 1).
  double min_spectral_gap() const noexcept { return min_gap_; }
  /// Points closer than this count as equal: 1e-8 * spectral diameter.
  double coincidence_threshold() const noexcept { return coincidence_; }
  /// max_l ||S_l - U Lambda_l U^T||_F / ||S_l||_F.
  double max_relative_residual() const noexcept { return max_residual_; }

  /// Frequency indices grouped by coinciding joint-spectrum point. Every
  /// group is an invariant subspace of all shifts.
  const std::vector<std::vector<Index>>& joint_clusters() const noexcept { return clusters_; }

 private:
  SpectralDecomposition() = default;

  void finalize() {
    const Index n = u_.rows();
    const auto l_count = static_cast<Index>(shifts_->size());
    lambdas_.resize(l_count, n);
    max_residual_ = 0.0;
    for (Index l = 0; l < l_count; ++l) {
      const Matrix& s = (*shifts_)[static_cast<std::size_t>(l)].matrix();
      const Matrix su = s * u_;
      for (Index k = 0; k < n; ++k) lambdas_(l, k) = u_.col(k).dot(su.col(k));
      const double res =
          (s - u_ * lambdas_.row(l).transpose().asDiagonal() * u_.transpose()).norm();
      const double sn = s.norm();
      max_residual_ = std::max(max_residual_, sn > 0.0 ? res / sn : res);
    }

    double diameter = 0.0;
    min_gap_ = std::numeric_limits<double>::infinity();
    for (Index a = 0; a < n; ++a) {
      for (Index b = a + 1; b < n; ++b) {
        const double dist = (lambdas_.col(a) - lambdas_.col(b)).norm();
        diameter = std::max(diameter, dist);
        min_gap_ = std::min(min_gap_, dist);
      }
    }
    coincidence_ = 1e-8 * diameter;
    assumption1_ = n == 1 || min_gap_ > coincidence_;

    std::vector<Index> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), Index{0});
    auto find = [&](Index x) {
      while (parent[static_cast<std::size_t>(x)] != x) {
        parent[static_cast<std::size_t>(x)] =
            parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        x = parent[static_cast<std::size_t>(x)];
      }
      return x;
    };
    for (Index a = 0; a < n; ++a) {
      for (Index b = a + 1; b < n; ++b) {
        if ((lambdas_.col(a) - lambdas_.col(b)).norm() <= coincidence_) {
          parent[static_cast<std::size_t>(find(a))] = find(b);
        }
      }
    }
    std::map<Index, std::vector<Index>> groups;
    for (Index k = 0; k < n; ++k) groups[find(k)].push_back(k);
    clusters_.clear();
    for (auto& [root, members] : groups) clusters_.push_back(std::move(members));
    std::sort(clusters_.begin(), clusters_.end());
  }

  std::shared_ptr<const ShiftSet> shifts_;
  Matrix u_;
  Matrix lambdas_;
  bool assumption1_ = false;
  double min_gap_ = 0.0;
  double coincidence_ = 0.0;
  double max_residual_ = 0.0;
  std::vector<std::vector<Index>> clusters_;
};

using DecompositionPtr = std::shared_ptr<const SpectralDecomposition>;

struct DiagonalizationOptions {
  /// Relative residual bound ||S_l - U Lambda_l U^T||_F <= tol * ||S_l||_F.
  double tol = 1e-10;
  int max_retries = 16;
  std::uint64_t seed = 0;
};

namespace detail {

/// Uniform random direction on the unit sphere of R^dim.
inline Vector random_unit_vector(Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector d(dim);
  do {
    for (Index i = 0; i < dim; ++i) d(i) = normal(rng);
  } while (d.norm() == 0.0);
  return d / d.norm();
}

/// Column permutation sorting joint-spectrum points lexicographically after
/// quantizing to `scale`; ties keep their incoming order.
inline std::vector<Index> joint_spectrum_order(const Matrix& lambdas, double scale) {
  const Index n = lambdas.cols();
  std::vector<std::vector<long long>> keys(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    auto& key = keys[static_cast<std::size_t>(k)];
    for (Index l = 0; l < lambdas.rows(); ++l) key.push_back(std::llround(lambdas(l, k) / scale));
  }
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::stable_sort(perm.begin(), perm.end(), [&](Index a, Index b) {
    return keys[static_cast<std::size_t>(a)] < keys[static_cast<std::size_t>(b)];
  });
  return perm;
}

}  // namespace detail

/// Jointly diagonalizes a commuting family by eigendecomposing a random
/// combination T = sum_l d_l S_l (d uniform on the unit sphere). T is redrawn
/// while accidental near-degeneracies of T leave a residual above tol.
inline DecompositionPtr diagonalize_simultaneously(const ShiftSet& shifts,
                                                   const DiagonalizationOptions& opts = {}) {
  const auto comm = check_commutative(shifts);
  if (!comm.commutative) {
    throw PreconditionError("shifts do not commute (residual " + std::to_string(comm.residual) +
                            ")");
  }
  auto shared = std::make_shared<const ShiftSet>(shifts);
  const Index n = shifts.order();
  const auto l_count = static_cast<Index>(shifts.size());
  std::mt19937_64 rng(opts.seed);
  double worst = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt <= opts.max_retries; ++attempt) {
    const Vector d = detail::random_unit_vector(l_count, rng);
    Matrix t = Matrix::Zero(n, n);
    for (Index l = 0; l < l_count; ++l) t += d(l) * shifts[static_cast<std::size_t>(l)].matrix();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(t);
    if (eig.info() != Eigen::Success) continue;

    auto trial = SpectralDecomposition::from_basis(shared, eig.eigenvectors());
    worst = std::min(worst, trial->max_relative_residual());
    if (trial->max_relative_residual() > opts.tol) continue;

    const Matrix& lam = trial->eigenvalues();
    const double scale = 1e-9 * std::max({lam.cwiseAbs().maxCoeff(), 1e-300});
    const auto perm = detail::joint_spectrum_order(lam, scale);
    Matrix u(n, n);
    for (Index k = 0; k < n; ++k) {
      u.col(k) = trial->basis().col(perm[static_cast<std::size_t>(k)]);
      normalize_sign(u.col(k));
    }
    return SpectralDecomposition::from_basis(shared, std::move(u));
  }
  throw DiagonalizationFailure("simultaneous diagonalization did not reach tolerance after " +
                                   std::to_string(opts.max_retries + 1) + " draws",
                               worst);
}

/// Graph Fourier transform x_hat = U^T x.
inline Signal gft(const SpectralDecomposition& decomp, const Signal& x) {
  require_same_size(x.size(), decomp.order(), "gft");
  return decomp.basis().transpose() * x;
}

inline Signal igft(const SpectralDecomposition& decomp, const Signal& xhat) {
  require_same_size(xhat.size(), decomp.order(), "igft");
  return decomp.basis() * xhat;
}

/// Diagonal of U^T M U together with the Frobenius norm of its off-diagonal
/// part. A small residual means M is a spectral multiplier for U.
struct SpectralMultiplier {
  Vector values;
  double off_diagonal = 0.0;
};

inline SpectralMultiplier spectral_multiplier(const SpectralDecomposition& decomp,
                                              const Matrix& m) {
  require_same_size(m.rows(), decomp.order(), "spectral_multiplier");
  require_same_size(m.cols(), decomp.order(), "spectral_multiplier");
  Matrix t = decomp.basis().transpose() * m * decomp.basis();
  SpectralMultiplier out;
  out.values = t.diagonal();
  t.diagonal().setZero();
  out.off_diagonal = t.norm();
  return out;
}

// ---------------------------------------------------------------------------
// Polynomial filters H = sum_alpha h_alpha S_1^alpha_1 ... S_L^alpha_L.

using MultiIndex = std::vector<int>;
using PolynomialCoefficients = std::map<MultiIndex, double>;

/// All alpha in Z_+^L with |alpha| <= max_degree, in graded lexicographic
/// order: by total degree, then lexicographically descending.
inline std::vector<MultiIndex> graded_multi_indices(int num_vars, int max_degree) {
  std::vector<MultiIndex> out;
  if (num_vars <= 0 || max_degree < 0) return out;
  MultiIndex cur(static_cast<std::size_t>(num_vars), 0);
  auto fill = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == num_vars - 1) {
      cur[static_cast<std::size_t>(pos)] = remaining;
      out.push_back(cur);
      return;
    }
    for (int a = remaining; a >= 0; --a) {
      cur[static_cast<std::size_t>(pos)] = a;
      self(self, pos + 1, remaining - a);
    }
  };
  for (int deg = 0; deg <= max_degree; ++deg) fill(fill, 0, deg);
  return out;
}

/// prod_l values(l)^alpha_l.
inline double monomial(const Vector& values, const MultiIndex& alpha) {
  double p = 1.0;
  for (std::size_t l = 0; l < alpha.size(); ++l) {
    p *= std::pow(values(static_cast<Index>(l)), alpha[l]);
  }
  return p;
}

namespace detail {

inline void check_coefficients(const PolynomialCoefficients& coeffs, std::size_t num_shifts) {
  for (const auto& [alpha, h] : coeffs) {
    if (alpha.size() != num_shifts) {
      throw InvalidArgument("multi-index length " + std::to_string(alpha.size()) +
                            " does not match the number of shifts " +
                            std::to_string(num_shifts));
    }
    for (int a : alpha) {
      if (a < 0) throw InvalidArgument("multi-index exponents must be nonnegative");
    }
  }
}

}  // namespace detail

/// Applies h(S_1, ..., S_L) to x. With a decomposition the filter is applied
/// as a Fourier multiplier; otherwise monomials are built spatially, each one
/// from a previously computed monomial of degree one lower.
inline Signal apply_polynomial_filter(const ShiftSet& shifts, const PolynomialCoefficients& coeffs,
                                      const Signal& x,
                                      const SpectralDecomposition* decomp = nullptr) {
  require_same_size(x.size(), shifts.order(), "apply_polynomial_filter");
  detail::check_coefficients(coeffs, shifts.size());
  if (decomp != nullptr) {
    require_same_size(decomp->order(), shifts.order(), "apply_polynomial_filter");
    Vector response = Vector::Zero(x.size());
    for (Index k = 0; k < x.size(); ++k) {
      for (const auto& [alpha, h] : coeffs) response(k) += h * monomial(decomp->joint_point(k), alpha);
    }
    return igft(*decomp, response.cwiseProduct(gft(*decomp, x)));
  }

  std::map<MultiIndex, Vector> cache;
  cache.emplace(MultiIndex(shifts.size(), 0), x);
  auto eval = [&](auto&& self, const MultiIndex& alpha) -> const Vector& {
    if (auto it = cache.find(alpha); it != cache.end()) return it->second;
    std::size_t l = 0;
    while (alpha[l] == 0) ++l;
    MultiIndex prev = alpha;
    --prev[l];
    Vector v = shifts[l].matrix() * self(self, prev);
    return cache.emplace(alpha, std::move(v)).first->second;
  };
  Signal out = Signal::Zero(x.size());
  for (const auto& [alpha, h] : coeffs) out += h * eval(eval, alpha);
  return out;
}

struct FilterCheck {
  /// H commutes with every shift within tol.
  bool commutes = false;
  double residual = 0.0;
  /// Commuting is equivalent to being a polynomial filter only when the
  /// joint spectrum is simple.
  bool equivalence_guaranteed = false;
};

inline FilterCheck is_polynomial_filter(const Matrix& h, const ShiftSet& shifts,
                                        const SpectralDecomposition* decomp = nullptr,
                                        std::optional<double> tol = {}) {
  require_same_size(h.rows(), shifts.order(), "is_polynomial_filter");
  require_same_size(h.cols(), shifts.order(), "is_polynomial_filter");
  FilterCheck out;
  for (const auto& s : shifts) {
    out.residual = std::max(out.residual, (h * s.matrix() - s.matrix() * h).norm());
  }
  const double t = tol.value_or(scaled_tolerance(h.norm() * shifts.max_norm()));
  out.commutes = out.residual <= t;
  out.equivalence_guaranteed = decomp != nullptr && decomp->assumption1_holds();
  return out;
}

/// Rank-one spectral projector u_n u_n^T = U E_n U^T.
inline Matrix lagrange_projector(const SpectralDecomposition& decomp, Index n) {
  if (n < 0 || n >= decomp.order()) {
    throw InvalidArgument("frequency index " + std::to_string(n) + " out of range");
  }
  const auto u = decomp.basis().col(n);
  return u * u.transpose();
}

/// The same projector evaluated as the Lagrange interpolation polynomial
/// q_n(T) = prod_{m != n} (T - t_m I) / (t_n - t_m) in T = sum_l d_l S_l,
/// where t_m = d^T lambda(m) are pairwise distinct. Requires a simple joint
/// spectrum.
inline Matrix lagrange_projector_polynomial(const SpectralDecomposition& decomp, Index n,
                                            std::uint64_t seed = 0) {
  if (n < 0 || n >= decomp.order()) {
    throw InvalidArgument("frequency index " + std::to_string(n) + " out of range");
  }
  if (!decomp.assumption1_holds()) {
    throw PreconditionError("projector is a shift polynomial only for a simple joint spectrum");
  }
  std::mt19937_64 rng(seed);
  const Index size = decomp.order();
  for (int attempt = 0; attempt < 32; ++attempt) {
    const Vector d = detail::random_unit_vector(decomp.num_shifts(), rng);
    const Vector t = decomp.eigenvalues().transpose() * d;
    double gap = std::numeric_limits<double>::infinity();
    for (Index a = 0; a < size; ++a) {
      for (Index b = a + 1; b < size; ++b) gap = std::min(gap, std::abs(t(a) - t(b)));
    }
    const double spread = size > 1 ? t.maxCoeff() - t.minCoeff() : 1.0;
    if (size > 1 && !(gap > 1e-8 * spread)) continue;
    Matrix tm = Matrix::Zero(size, size);
    for (Index l = 0; l < decomp.num_shifts(); ++l) {
      tm += d(l) * decomp.shifts()[static_cast<std::size_t>(l)].matrix();
    }
    Matrix p = Matrix::Identity(size, size);
    for (Index m = 0; m < size; ++m) {
      if (m == n) continue;
      Matrix factor = tm;
      factor.diagonal().array() -= t(m);
      p = p * factor / (t(n) - t(m));
    }
    return p;
  }
  throw DistinctnessViolation("no combination of shifts separates the joint spectrum");
}

}  // namespace gsis
