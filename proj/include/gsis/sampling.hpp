#pragma once

// Sampling schemes y = A x + eps, injectivity tests and reconstruction, both
// direct (Fourier-domain least squares on B_Omega) and by the finite-step
// Krylov algorithm on H(Phi).

#include "gsis/core.hpp"
#include "gsis/graph.hpp"
#include "gsis/krylov.hpp"
#include "gsis/spaces.hpp"
#include "gsis/spectral.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace gsis {

struct SubsetProvenance {
  std::vector<Index> vertices;
};
struct DynamicProvenance {
  Matrix state;  // D
  Index vertex = 0;
  Index snapshots = 0;
};
struct CustomProvenance {};
using SamplingProvenance = std::variant<SubsetProvenance, DynamicProvenance, CustomProvenance>;

class SamplingScheme {
 public:
  explicit SamplingScheme(Matrix a, SamplingProvenance provenance = CustomProvenance{})
      : a_(std::move(a)), provenance_(std::move(provenance)) {}

  const Matrix& matrix() const noexcept { return a_; }
  Index rows() const noexcept { return a_.rows(); }
  Index order() const noexcept { return a_.cols(); }
  const SamplingProvenance& provenance() const noexcept { return provenance_; }

  Vector apply(const Signal& x) const {
    require_same_size(x.size(), order(), "sampling");
    return a_ * x;
  }

 private:
  Matrix a_;
  SamplingProvenance provenance_;
};

/// A_W: rows e_i^T for i in W, in increasing vertex order.
inline SamplingScheme subset_sampler(std::vector<Index> w, Index n) {
  if (w.empty()) throw InvalidArgument("sampling set is empty");
  check_index_set(w, n, "sampling set");
  w = sorted_unique(std::move(w));
  Matrix a = Matrix::Zero(static_cast<Index>(w.size()), n);
  for (std::size_t r = 0; r < w.size(); ++r) a(static_cast<Index>(r), w[r]) = 1.0;
  return SamplingScheme(std::move(a), SubsetProvenance{std::move(w)});
}

/// W_P = {floor(N/2) - P, ..., floor(N/2) + P}.
inline std::vector<Index> centered_window(Index n, Index p) {
  const Index c = n / 2;
  if (p < 0 || c - p < 0 || c + p >= n) {
    throw InvalidArgument("window half-width " + std::to_string(p) + " does not fit a graph of order " +
                          std::to_string(n));
  }
  std::vector<Index> w;
  for (Index i = c - p; i <= c + p; ++i) w.push_back(i);
  return w;
}

namespace detail {

inline void require_commuting_state(const SpectralDecomposition& decomp, const Matrix& d) {
  require_same_size(d.rows(), decomp.order(), "state matrix");
  require_same_size(d.cols(), decomp.order(), "state matrix");
  if (!is_polynomial_filter(d, decomp.shifts()).commutes) {
    throw PreconditionError("state matrix D does not commute with the graph shifts");
  }
}

}  // namespace detail

/// Rows m = 0..k-1 are the i0-th row of D^m.
inline SamplingScheme dynamic_sampler(const SpectralDecomposition& decomp, const Matrix& d, Index i0,
                                      Index k) {
  detail::require_commuting_state(decomp, d);
  if (i0 < 0 || i0 >= decomp.order()) throw InvalidArgument("vertex i0 out of range");
  if (k < 1) throw InvalidArgument("dynamic sampling needs at least one snapshot");
  Matrix a(k, decomp.order());
  Eigen::RowVectorXd row = unit_vector(decomp.order(), i0).transpose();
  for (Index m = 0; m < k; ++m) {
    a.row(m) = row;
    row = row * d;
  }
  return SamplingScheme(std::move(a), DynamicProvenance{d, i0, k});
}

/// A is injective on span(F) iff rank(F) == rank(A F).
inline bool check_injective(const Matrix& a, const Matrix& frame, double tol = 1e-10) {
  require_same_size(a.cols(), frame.rows(), "check_injective");
  // Rows are rescaled to unit norm first (injectivity ignores row scaling, and
  // powers of a state matrix give rows of wildly different size). Then A * frame
  // is judged against ||A|| ||frame||, not its own norm: a sampling that crushes
  // the whole frame must not look full rank.
  const Index r = numerical_rank(frame, tol);
  if (r == 0) return true;
  Matrix eq = a;
  for (Index i = 0; i < eq.rows(); ++i) {
    const double nrm = eq.row(i).norm();
    if (nrm > 0.0) eq.row(i) /= nrm;
  }
  const double scale = spectral_norm(eq) * singular_values(frame)(0);
  return rank_at_scale(eq * frame, tol * scale) == r;
}

inline bool check_injective(const SamplingScheme& scheme, const Matrix& frame, double tol = 1e-10) {
  return check_injective(scheme.matrix(), frame, tol);
}

/// Subset sampling on W is injective on B_Omega iff [u_n(i)]_{i in W, n in
/// Omega} has rank #Omega.
inline bool check_bandlimited_injective(const SpectralDecomposition& decomp,
                                        std::vector<Index> omega, std::vector<Index> w,
                                        double tol = 1e-10) {
  omega = sorted_unique(std::move(omega));
  w = sorted_unique(std::move(w));
  check_index_set(omega, decomp.order(), "frequency set");
  check_index_set(w, decomp.order(), "sampling set");
  if (omega.empty()) return true;
  if (w.size() < omega.size()) return false;
  Matrix m(static_cast<Index>(w.size()), static_cast<Index>(omega.size()));
  for (std::size_t r = 0; r < w.size(); ++r) {
    for (std::size_t c = 0; c < omega.size(); ++c) {
      m(static_cast<Index>(r), static_cast<Index>(c)) = decomp.basis()(w[r], omega[c]);
    }
  }
  // Orthonormal columns: entries are O(1), so the threshold is absolute.
  return rank_at_scale(m, tol) == static_cast<Index>(omega.size());
}

enum class DynamicDiagnosis { injective, insufficient_snapshots, repeated_eigenvalues, vanishing_component };

inline const char* to_string(DynamicDiagnosis d) {
  switch (d) {
    case DynamicDiagnosis::injective: return "injective";
    case DynamicDiagnosis::insufficient_snapshots: return "insufficient snapshots";
    case DynamicDiagnosis::repeated_eigenvalues: return "repeated eigenvalues of D on omega";
    case DynamicDiagnosis::vanishing_component: return "vanishing eigenvector component at i0";
  }
  return "unknown";
}

struct DynamicInjectivity {
  bool injective = false;
  DynamicDiagnosis diagnosis = DynamicDiagnosis::injective;
};

/// Dynamic sampling (D, i0, k) is injective on B_Omega iff k >= #Omega,
/// lambda_D is distinct on Omega and u_n(i0) != 0 for n in Omega.
inline DynamicInjectivity check_dynamic_injective(const SpectralDecomposition& decomp,
                                                  std::vector<Index> omega, const Matrix& d,
                                                  Index i0, Index k, double tol = 1e-10) {
  detail::require_commuting_state(decomp, d);
  omega = sorted_unique(std::move(omega));
  check_index_set(omega, decomp.order(), "frequency set");
  if (i0 < 0 || i0 >= decomp.order()) throw InvalidArgument("vertex i0 out of range");
  if (k < static_cast<Index>(omega.size())) return {false, DynamicDiagnosis::insufficient_snapshots};
  const Vector lam = spectral_multiplier(decomp, d).values;
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
  for (std::size_t a = 0; a < omega.size(); ++a) {
    for (std::size_t b = a + 1; b < omega.size(); ++b) {
      if (std::abs(lam(omega[a]) - lam(omega[b])) <= tol * scale) {
        return {false, DynamicDiagnosis::repeated_eigenvalues};
      }
    }
  }
  for (Index n : omega) {
    if (std::abs(decomp.basis()(i0, n)) <= tol) return {false, DynamicDiagnosis::vanishing_component};
  }
  return {true, DynamicDiagnosis::injective};
}

struct NoiseMeta {
  std::string distribution = "uniform";
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

struct Observation {
  Vector y;
  std::optional<NoiseMeta> noise;
};

/// i.i.d. uniform noise on [-sigma, sigma].
inline Vector uniform_noise(Index m, double sigma, std::mt19937_64& rng) {
  if (!(sigma >= 0.0)) throw InvalidArgument("noise level must be nonnegative");
  Vector eps = Vector::Zero(m);
  if (sigma == 0.0) return eps;
  std::uniform_real_distribution<double> dist(-sigma, sigma);
  for (Index i = 0; i < m; ++i) eps(i) = dist(rng);
  return eps;
}

/// y = A x + eps with eps uniform on [-sigma, sigma].
inline Observation observe(const SamplingScheme& scheme, const Signal& x, double sigma = 0.0,
                           std::uint64_t seed = 0) {
  Observation obs{scheme.apply(x), std::nullopt};
  if (sigma > 0.0) {
    std::mt19937_64 rng(seed);
    obs.y += uniform_noise(obs.y.size(), sigma, rng);
    obs.noise = NoiseMeta{"uniform", sigma, seed};
  } else if (sigma < 0.0) {
    throw InvalidArgument("noise level must be nonnegative");
  }
  return obs;
}

/// Least-squares reconstruction in B_Omega:
/// x = U_Omega (U_Omega^T A^T A U_Omega)^(-1) U_Omega^T A^T y.
inline Signal reconstruct_direct(const SpectralDecomposition& decomp, std::vector<Index> omega,
                                 const Matrix& a, const Vector& y) {
  omega = sorted_unique(std::move(omega));
  check_index_set(omega, decomp.order(), "frequency set");
  require_same_size(a.cols(), decomp.order(), "sampling matrix");
  require_same_size(y.size(), a.rows(), "observation");
  if (omega.empty()) return Signal::Zero(decomp.order());
  Matrix u(decomp.order(), static_cast<Index>(omega.size()));
  for (std::size_t c = 0; c < omega.size(); ++c) u.col(static_cast<Index>(c)) = decomp.basis().col(omega[c]);
  const Matrix b = a * u;
  const Vector s = singular_values(b);
  const double smin = s.size() == u.cols() ? s(s.size() - 1) : 0.0;
  // u has orthonormal columns, so ||A|| bounds s(0); conditioning is judged
  // against it so that a uniformly tiny A u still counts as non-injective.
  const double smax = std::max(s(0), spectral_norm(a));
  if (!(smin > 0.0) || (smax / smin) * (smax / smin) > 1e12) {
    throw NonInjectiveSampling("sampling is not injective on the bandlimited space (Gram matrix "
                               "condition number above 1e12)");
  }
  const Matrix gram = b.transpose() * b;
  return u * gram.ldlt().solve(b.transpose() * y);
}

inline Signal reconstruct_direct(const SpectralDecomposition& decomp, std::vector<Index> omega,
                                 const SamplingScheme& scheme, const Vector& y) {
  return reconstruct_direct(decomp, std::move(omega), scheme.matrix(), y);
}

struct KrylovReconstructionOptions {
  /// Stop once ||y - A x||_2 <= delta.
  double delta = 0.0;
  /// Highest Krylov level to build; defaults to N - 1.
  std::optional<Index> max_level;
  DegeneratePolicy policy = DegeneratePolicy::error;
  /// Keep x_n for every level n reached.
  bool record_iterates = false;
};

struct ReconstructionResult {
  Signal x_out;
  Vector e_final;
  double residual_norm = 0.0;
  /// Krylov level of the final iterate.
  Index depth = 0;
  /// dim H_n(Phi), n = 0..depth.
  std::vector<Index> dims_trace;
  /// ||y - A x_n||_2, n = 0..depth.
  std::vector<double> residual_trace;
  std::vector<Signal> iterates;
  std::vector<std::string> warnings;
  /// Candidates dropped for zero sampled norm (drop policy only).
  Index degenerate_candidates = 0;
};

/// Finite-step Krylov reconstruction. Level n extends an <.,.>_A-orthonormal
/// basis of H_{n-1}(Phi) to H_n(Phi) and updates x_n = sum_m <y, A w_m> w_m,
/// the least-squares fit to y over H_n(Phi).
inline ReconstructionResult reconstruct_krylov(const ShiftSet& shifts, const GeneratorFamily& phis,
                                               const Matrix& a, const Vector& y,
                                               const KrylovReconstructionOptions& opts = {}) {
  require_same_size(a.cols(), shifts.order(), "sampling matrix");
  require_same_size(y.size(), a.rows(), "observation");
  if (!(opts.delta >= 0.0)) throw InvalidArgument("delta must be nonnegative");
  const Index cap = std::min(opts.max_level.value_or(shifts.order() - 1), shifts.order() - 1);
  if (cap < 0) throw InvalidArgument("max_level must be nonnegative");

  KrylovChain chain(shifts, phis, a, opts.policy);
  ReconstructionResult out;
  out.warnings = chain.warnings();
  Signal x = Signal::Zero(shifts.order());
  Vector ax = Vector::Zero(a.rows());
  auto absorb = [&] {
    const auto& basis = chain.basis();
    for (Index m = chain.newest().first; m < chain.newest().second; ++m) {
      const double c = y.dot(basis.sampled(m));
      x += c * basis.vector(m);
      ax += c * basis.sampled(m);
    }
    out.dims_trace.push_back(chain.dim());
    out.residual_trace.push_back((y - ax).norm());
    if (opts.record_iterates) out.iterates.push_back(x);
  };
  absorb();
  while (out.residual_trace.back() > opts.delta && chain.level() < cap) {
    if (!chain.advance()) break;
    absorb();
  }
  out.depth = static_cast<Index>(out.dims_trace.size()) - 1;
  out.x_out = std::move(x);
  out.e_final = y - a * out.x_out;
  out.residual_norm = out.e_final.norm();
  out.degenerate_candidates = chain.degenerate_count();
  return out;
}

inline ReconstructionResult reconstruct_krylov(const ShiftSet& shifts, const GeneratorFamily& phis,
                                               const SamplingScheme& scheme, const Vector& y,
                                               const KrylovReconstructionOptions& opts = {}) {
  return reconstruct_krylov(shifts, phis, scheme.matrix(), y, opts);
}

/// For one shift S with A^T A S = S A^T A, dim H_n(phi0) grows by exactly one
/// per level under <.,.>_A until it saturates.
inline bool degenerate_dimension_check(const ShiftSet& shifts, const Signal& phi0, const Matrix& a) {
  if (shifts.size() != 1) throw PreconditionError("dimension check needs exactly one shift");
  require_same_size(a.cols(), shifts.order(), "sampling matrix");
  const Matrix ata = a.transpose() * a;
  const Matrix& s = shifts[0].matrix();
  if ((ata * s - s * ata).norm() > scaled_tolerance(ata.norm() * s.norm())) {
    throw PreconditionError("A^T A does not commute with the shift");
  }
  const auto dims = krylov_subspace(shifts, {phi0}, shifts.order() - 1, {a, DegeneratePolicy::drop}).dims;
  bool saturated = false;
  for (std::size_t n = 1; n < dims.size(); ++n) {
    const Index step = dims[n] - dims[n - 1];
    if (saturated) {
      if (step != 0) return false;
    } else if (step == 0) {
      saturated = true;
    } else if (step != 1) {
      return false;
    }
  }
  return true;
}

inline bool degenerate_dimension_check(const ShiftSet& shifts, const Signal& phi0,
                                       const SamplingScheme& scheme) {
  return degenerate_dimension_check(shifts, phi0, scheme.matrix());
}

}  // namespace gsis
