#pragma once

// Fixtures and independent oracles shared by the unit tests.

#include "gsis/gsis.hpp"

#include <memory>
#include <random>
#include <vector>

namespace gsis::testing {

inline GraphPtr path3() {
  return std::make_shared<const Graph>(3, std::vector<Edge>{{0, 1, 1.0}, {1, 2, 1.0}});
}

inline ShiftSet single_shift(const GraphPtr& g, ShiftKind kind) {
  return ShiftSet({build_standard_shift(g, kind)});
}

/// Connected random graph: a path backbone plus Erdos-Renyi edges, with
/// weights uniform in [0.5, 1.5] when weighted.
inline GraphPtr random_graph(Index n, double p, std::uint64_t seed, bool weighted = true) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0), weight(0.5, 1.5);
  std::vector<Edge> edges;
  for (Index i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, weighted ? weight(rng) : 1.0});
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 2; j < n; ++j) {
      if (coin(rng) < p) edges.push_back({i, j, weighted ? weight(rng) : 1.0});
    }
  }
  return std::make_shared<const Graph>(n, std::move(edges));
}

inline Vector random_vector(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

/// Stacked Krylov vectors S_{l_1} ... S_{l_k} phi over all words of length
/// <= level, built by plain repeated multiplication.
inline Matrix krylov_words(const ShiftSet& shifts, const std::vector<Vector>& phis, int level) {
  std::vector<Vector> all, frontier(phis.begin(), phis.end());
  all = frontier;
  for (int d = 1; d <= level; ++d) {
    std::vector<Vector> next;
    for (const auto& v : frontier) {
      for (const auto& s : shifts) next.push_back(s.matrix() * v);
    }
    frontier = std::move(next);
    all.insert(all.end(), frontier.begin(), frontier.end());
  }
  Matrix m(shifts.order(), static_cast<Index>(all.size()));
  for (std::size_t k = 0; k < all.size(); ++k) m.col(static_cast<Index>(k)) = all[k];
  return m;
}

/// Columns S_1^a_1 ... S_L^a_L phi for all |a| <= level (commuting shifts),
/// each computed from scratch by repeated multiplication.
inline Matrix krylov_monomials(const ShiftSet& shifts, const std::vector<Vector>& phis, int level) {
  const auto l_count = static_cast<int>(shifts.size());
  std::vector<Vector> cols;
  std::vector<int> alpha(static_cast<std::size_t>(l_count), 0);
  auto emit = [&](auto&& self, int l, int budget) -> void {
    if (l == l_count) {
      for (const auto& phi : phis) {
        Vector v = phi;
        for (int k = l_count - 1; k >= 0; --k) {
          for (int r = 0; r < alpha[static_cast<std::size_t>(k)]; ++r) {
            v = shifts[static_cast<std::size_t>(k)].matrix() * v;
          }
        }
        cols.push_back(v);
      }
      return;
    }
    for (int a = 0; a <= budget; ++a) {
      alpha[static_cast<std::size_t>(l)] = a;
      self(self, l + 1, budget - a);
    }
    alpha[static_cast<std::size_t>(l)] = 0;
  };
  emit(emit, 0, level);
  Matrix m(shifts.order(), static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) m.col(static_cast<Index>(k)) = cols[k];
  return m;
}

/// span{p(S) phi : deg p <= level, phi in phis} through Chebyshev polynomials
/// of S mapped onto [-1, 1] by its Gershgorin interval. Far better conditioned
/// than raw powers once level approaches N.
inline Matrix chebyshev_krylov(const Matrix& s, const std::vector<Vector>& phis, int level) {
  const Index n = s.rows();
  double lo = 1e300, hi = -1e300;
  for (Index i = 0; i < n; ++i) {
    const double off = s.row(i).cwiseAbs().sum() - std::abs(s(i, i));
    lo = std::min(lo, s(i, i) - off);
    hi = std::max(hi, s(i, i) + off);
  }
  const double c = 0.5 * (lo + hi), r = std::max(0.5 * (hi - lo), 1e-300);
  const Matrix t = (s - c * Matrix::Identity(n, n)) / r;
  Matrix out(n, static_cast<Index>(phis.size()) * (level + 1));
  Index col = 0;
  for (const auto& phi : phis) {
    Vector prev = phi, cur = t * phi;
    out.col(col++) = phi;
    for (int k = 1; k <= level; ++k) {
      out.col(col++) = cur;
      Vector next = 2.0 * t * cur - prev;
      prev = std::move(cur);
      cur = std::move(next);
    }
  }
  return out;
}

/// Rank from a column-pivoting QR, a different factorization than the SVD
/// used inside the library.
inline Index qr_rank(const Matrix& m, double rel = 1e-9) {
  if (m.size() == 0) return 0;
  Eigen::ColPivHouseholderQR<Matrix> qr(m);
  qr.setThreshold(rel);
  return qr.rank();
}

/// Eigenvectors of the P3 Laplacian for eigenvalues 0, 1, 3.
inline Matrix path3_eigenvectors() {
  Matrix u(3, 3);
  u.col(0) << 1, 1, 1;
  u.col(1) << 1, 0, -1;
  u.col(2) << 1, -2, 1;
  u.col(0) /= std::sqrt(3.0);
  u.col(1) /= std::sqrt(2.0);
  u.col(2) /= std::sqrt(6.0);
  return u;
}

}  // namespace gsis::testing
