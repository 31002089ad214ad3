#pragma once

// Orthonormal bases of nested Krylov spaces H_n(Phi) = span{S^alpha phi :
// |alpha| <= n} under the sampling inner product <x, y>_A = x^T A^T A y.

#include "gsis/core.hpp"
#include "gsis/graph.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gsis {

/// What to do with a candidate that is nonzero in R^N but has zero
/// <.,.>_A-norm, i.e. evidence that A is not injective on the span.
enum class DegeneratePolicy { error, drop };

/// Gram-Schmidt under <.,.>_A (Euclidean when no sampling matrix is given).
/// Each candidate is reorthogonalized until stable; candidates whose A-norm falls
/// below drop_tol times the largest raw candidate A-norm seen are discarded.
class SampledOrthonormalBasis {
 public:
  enum class Outcome { added, dependent, degenerate };

  explicit SampledOrthonormalBasis(Index n, std::optional<Matrix> sampling = std::nullopt,
                                   DegeneratePolicy policy = DegeneratePolicy::error,
                                   double drop_tol = 1e-10)
      : n_(n), sampling_(std::move(sampling)), policy_(policy), drop_tol_(drop_tol) {
    if (sampling_ && sampling_->cols() != n) {
      throw DimensionMismatch("sampling matrix has " + std::to_string(sampling_->cols()) +
                              " columns, expected " + std::to_string(n));
    }
  }

  Vector sample(const Vector& x) const { return sampling_ ? Vector(*sampling_ * x) : x; }

  double inner(const Vector& a, const Vector& b) const { return sample(a).dot(sample(b)); }

  Outcome add(const Vector& candidate) {
    require_same_size(candidate.size(), n_, "orthonormal basis candidate");
    Vector v = candidate;
    Vector av = sample(v);
    max_seen_ = std::max(max_seen_, av.norm());
    // Classical Gram-Schmidt, repeated until a pass no longer cancels more than
    // half the vector. Two passes are not enough when a Krylov candidate is
    // nearly inside the span (clustered spectra at high levels). A v is
    // recomputed each pass so it cannot drift away from v.
    double before = av.norm();
    for (int pass = 0; pass < 5 && !vectors_.empty(); ++pass) {
      for (std::size_t m = 0; m < vectors_.size(); ++m) v -= sampled_[m].dot(av) * vectors_[m];
      av = sample(v);
      const double after = av.norm();
      if (pass >= 1 && after > 0.5 * before) break;
      before = after;
    }
    const double norm_a = av.norm();
    if (norm_a <= drop_tol_ * max_seen_) {
      if (sampling_ && v.norm() > 1e-6 * candidate.norm()) {
        if (policy_ == DegeneratePolicy::error) {
          throw DegenerateInnerProduct(
              "sampling inner product vanishes on a nonzero candidate; the sampling is not "
              "injective on this space");
        }
        return Outcome::degenerate;
      }
      return Outcome::dependent;
    }
    vectors_.push_back(v / norm_a);
    sampled_.push_back(av / norm_a);
    return Outcome::added;
  }

  Index size() const noexcept { return static_cast<Index>(vectors_.size()); }
  Index order() const noexcept { return n_; }
  const Vector& vector(Index m) const { return vectors_.at(static_cast<std::size_t>(m)); }
  /// A * vector(m).
  const Vector& sampled(Index m) const { return sampled_.at(static_cast<std::size_t>(m)); }

  Matrix matrix() const {
    Matrix out(n_, size());
    for (Index m = 0; m < size(); ++m) out.col(m) = vector(m);
    return out;
  }

 private:
  Index n_;
  std::optional<Matrix> sampling_;
  DegeneratePolicy policy_;
  double drop_tol_;
  double max_seen_ = 0.0;
  std::vector<Vector> vectors_;
  std::vector<Vector> sampled_;
};

/// Level-by-level growth of H_0(Phi) c H_1(Phi) c ... . Level n only shifts
/// the basis vectors added at level n-1, since S_l H_{n-2} c H_{n-1}.
/// Candidates within a level are ordered by shift index, then basis index.
/// The shift set must outlive the chain.
class KrylovChain {
 public:
  KrylovChain(const ShiftSet& shifts, const std::vector<Signal>& generators,
              std::optional<Matrix> sampling = std::nullopt,
              DegeneratePolicy policy = DegeneratePolicy::error)
      : shifts_(shifts), basis_(shifts.order(), std::move(sampling), policy) {
    if (generators.empty()) throw InvalidArgument("at least one generator is required");
    for (std::size_t r = 0; r < generators.size(); ++r) {
      require_same_size(generators[r].size(), shifts.order(), "generator");
      const auto outcome = basis_.add(generators[r]);
      if (outcome != SampledOrthonormalBasis::Outcome::added) {
        warnings_.push_back("generator " + std::to_string(r) +
                            " is dependent on earlier generators and was dropped");
      }
    }
    newest_ = {0, basis_.size()};
    dims_.push_back(basis_.size());
  }

  /// Builds the next level. Returns false when no new direction appears.
  bool advance() {
    const Index start = basis_.size();
    for (const auto& s : shifts_) {
      for (Index m = newest_.first; m < newest_.second; ++m) {
        const auto outcome = basis_.add(s.matrix() * basis_.vector(m));
        if (outcome == SampledOrthonormalBasis::Outcome::degenerate) ++degenerate_;
      }
    }
    ++level_;
    newest_ = {start, basis_.size()};
    dims_.push_back(basis_.size());
    return basis_.size() > start;
  }

  Index level() const noexcept { return level_; }
  Index dim() const noexcept { return basis_.size(); }
  /// Basis indices [first, second) added at the latest level.
  std::pair<Index, Index> newest() const noexcept { return newest_; }
  const std::vector<Index>& dims() const noexcept { return dims_; }
  const SampledOrthonormalBasis& basis() const noexcept { return basis_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  /// Number of candidates discarded for vanishing A-norm (drop policy only).
  Index degenerate_count() const noexcept { return degenerate_; }

 private:
  const ShiftSet& shifts_;
  SampledOrthonormalBasis basis_;
  Index level_ = 0;
  std::pair<Index, Index> newest_{0, 0};
  std::vector<Index> dims_;
  std::vector<std::string> warnings_;
  Index degenerate_ = 0;
};

}  // namespace gsis
