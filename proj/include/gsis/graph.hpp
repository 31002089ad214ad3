#pragma once

// Undirected graphs, graph shifts and the circulant family C(N, Q).

#include "gsis/core.hpp"

#include <iosfwd>
#include <istream>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace gsis {

struct Edge {
  Index u = 0;
  Index v = 0;
  double weight = 1.0;
};

/// Undirected graph on vertices 0..N-1 with nonnegative edge weights.
/// Self-loops and duplicate edges are rejected.
class Graph {
 public:
  Graph(Index n_vertices, std::vector<Edge> edges) : n_(n_vertices) {
    if (n_vertices <= 0) throw InvalidArgument("graph order must be positive");
    adjacency_ = Matrix::Zero(n_, n_);
    edges_.reserve(edges.size());
    for (Edge e : edges) {
      if (e.u < 0 || e.u >= n_ || e.v < 0 || e.v >= n_) {
        throw InvalidArgument("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                              ") has a vertex outside [0, " + std::to_string(n_) + ")");
      }
      if (e.u == e.v) throw InvalidArgument("self-loop at vertex " + std::to_string(e.u));
      if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
        throw InvalidArgument("edge weights must be finite and nonnegative");
      }
      if (e.u > e.v) std::swap(e.u, e.v);
      if (has_edge_flag(e.u, e.v)) {
        throw InvalidArgument("duplicate edge (" + std::to_string(e.u) + "," +
                              std::to_string(e.v) + ")");
      }
      edges_.push_back(e);
      present_.emplace(std::make_pair(e.u, e.v), true);
      adjacency_(e.u, e.v) = e.weight;
      adjacency_(e.v, e.u) = e.weight;
    }
  }

  Index order() const noexcept { return n_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  bool has_edge(Index i, Index j) const {
    if (i == j) return false;
    if (i > j) std::swap(i, j);
    return has_edge_flag(i, j);
  }

  /// Dense symmetric weight matrix.
  const Matrix& adjacency() const noexcept { return adjacency_; }

  Vector degrees() const { return adjacency_.rowwise().sum(); }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.adjacency_ == b.adjacency_ && a.present_ == b.present_;
  }

 private:
  bool has_edge_flag(Index i, Index j) const { return present_.count({i, j}) != 0; }

  Index n_;
  std::vector<Edge> edges_;
  std::map<std::pair<Index, Index>, bool> present_;
  Matrix adjacency_;
};

using GraphPtr = std::shared_ptr<const Graph>;

/// True iff m is symmetric within tol and every off-graph, off-diagonal entry
/// has magnitude at most tol.
inline bool validate_shift(const Matrix& m, const Graph& g, std::optional<double> tol = {}) {
  if (m.rows() != g.order() || m.cols() != g.order()) {
    throw DimensionMismatch("shift is " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + " but graph has order " +
                            std::to_string(g.order()));
  }
  const double t = tol.value_or(scaled_tolerance(m.norm()));
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > t) return false;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (i != j && !g.has_edge(i, j) && std::abs(m(i, j)) > t) return false;
    }
  }
  return true;
}

/// A graph shift: a symmetric matrix whose off-diagonal support lies in the
/// edge set of its graph. Stored exactly symmetric.
class ShiftMatrix {
 public:
  ShiftMatrix(Matrix entries, GraphPtr graph, std::optional<double> tol = {})
      : graph_(std::move(graph)) {
    if (!graph_) throw InvalidArgument("shift requires a graph");
    if (!validate_shift(entries, *graph_, tol)) {
      throw InvalidShift("matrix is not a graph shift: asymmetric or nonzero off the edge set");
    }
    entries_ = 0.5 * (entries + entries.transpose());
    for (Index i = 0; i < entries_.rows(); ++i) {
      for (Index j = 0; j < entries_.cols(); ++j) {
        if (i != j && !graph_->has_edge(i, j)) entries_(i, j) = 0.0;
      }
    }
  }

  const Matrix& matrix() const noexcept { return entries_; }
  const GraphPtr& graph() const noexcept { return graph_; }
  Index order() const noexcept { return entries_.rows(); }

 private:
  Matrix entries_;
  GraphPtr graph_;
};

enum class ShiftKind { adjacency, laplacian, normalized_laplacian };

inline ShiftMatrix build_standard_shift(const GraphPtr& graph, ShiftKind kind) {
  const Matrix& a = graph->adjacency();
  const Vector deg = graph->degrees();
  switch (kind) {
    case ShiftKind::adjacency:
      return ShiftMatrix(a, graph);
    case ShiftKind::laplacian: {
      Matrix l = -a;
      l.diagonal() += deg;
      return ShiftMatrix(l, graph);
    }
    case ShiftKind::normalized_laplacian: {
      for (Index i = 0; i < deg.size(); ++i) {
        if (!(deg(i) > 0.0)) {
          throw DegenerateGraph("normalized Laplacian undefined: vertex " + std::to_string(i) +
                                " has zero degree");
        }
      }
      const Vector s = deg.cwiseSqrt().cwiseInverse();
      Matrix l = -a;
      l.diagonal() += deg;
      l = s.asDiagonal() * l * s.asDiagonal();
      return ShiftMatrix(l, graph);
    }
  }
  throw InvalidArgument("unknown shift kind");
}

/// An ordered family of graph shifts on one graph. The largest pairwise
/// commutator norm is recorded at construction.
class ShiftSet {
 public:
  explicit ShiftSet(std::vector<ShiftMatrix> shifts) : shifts_(std::move(shifts)) {
    if (shifts_.empty()) throw InvalidArgument("shift set must contain at least one shift");
    const GraphPtr& g0 = shifts_.front().graph();
    for (const auto& s : shifts_) {
      if (s.graph() != g0 && !(*s.graph() == *g0)) {
        throw InvalidArgument("all shifts in a set must share one graph");
      }
    }
    residual_ = 0.0;
    for (std::size_t a = 0; a < shifts_.size(); ++a) {
      for (std::size_t b = a + 1; b < shifts_.size(); ++b) {
        const Matrix& x = shifts_[a].matrix();
        const Matrix& y = shifts_[b].matrix();
        residual_ = std::max(residual_, (x * y - y * x).norm());
      }
    }
  }

  std::size_t size() const noexcept { return shifts_.size(); }
  const ShiftMatrix& operator[](std::size_t l) const { return shifts_.at(l); }
  auto begin() const noexcept { return shifts_.begin(); }
  auto end() const noexcept { return shifts_.end(); }
  const GraphPtr& graph() const noexcept { return shifts_.front().graph(); }
  Index order() const noexcept { return shifts_.front().order(); }
  double commutativity_residual() const noexcept { return residual_; }

  double max_norm() const {
    double m = 0.0;
    for (const auto& s : shifts_) m = std::max(m, s.matrix().norm());
    return m;
  }

  /// Default tolerance 1e-10 * max(1, max_l ||S_l||_F).
  double default_tolerance() const { return scaled_tolerance(max_norm()); }

 private:
  std::vector<ShiftMatrix> shifts_;
  double residual_ = 0.0;
};

struct CommutativityReport {
  bool commutative = false;
  double residual = 0.0;
};

inline CommutativityReport check_commutative(const ShiftSet& shifts,
                                             std::optional<double> tol = {}) {
  const double t = tol.value_or(shifts.default_tolerance());
  return {shifts.commutativity_residual() <= t, shifts.commutativity_residual()};
}

struct Circulant {
  GraphPtr graph;
  ShiftSet shifts;
  /// gcd(q_1, ..., q_L, N) == 1. Construction proceeds either way.
  bool generators_coprime = true;
};

/// Unweighted circulant graph C(N, Q) with one shift per generator q_l:
/// diagonal 1 and -1/2 at offsets +-q_l mod N.
inline Circulant build_circulant(Index n, std::vector<Index> q_set) {
  if (n <= 0) throw InvalidArgument("circulant order must be positive");
  if (q_set.empty()) throw InvalidArgument("circulant graph needs at least one generator");
  std::sort(q_set.begin(), q_set.end());
  for (std::size_t k = 0; k < q_set.size(); ++k) {
    const Index q = q_set[k];
    if (q < 1 || 2 * q >= n) {
      throw InvalidGenerator("circulant generator " + std::to_string(q) +
                             " must satisfy 1 <= q < N/2 for N = " + std::to_string(n));
    }
    if (k > 0 && q_set[k - 1] == q) {
      throw InvalidGenerator("circulant generators must be distinct");
    }
  }
  std::vector<Edge> edges;
  for (Index q : q_set) {
    for (Index i = 0; i < n; ++i) edges.push_back({i, (i + q) % n, 1.0});
  }
  auto graph = std::make_shared<const Graph>(n, std::move(edges));

  std::vector<ShiftMatrix> shifts;
  for (Index q : q_set) {
    Matrix s = Matrix::Identity(n, n);
    for (Index i = 0; i < n; ++i) {
      s(i, (i + q) % n) = -0.5;
      s(i, (i - q % n + n) % n) = -0.5;
    }
    shifts.emplace_back(std::move(s), graph);
  }
  Index g = n;
  for (Index q : q_set) g = std::gcd(g, q);
  return {graph, ShiftSet(std::move(shifts)), g == 1};
}

// ---------------------------------------------------------------------------
// Edge-list text format:
//   N <count>
//   i j [w]
// 0-indexed vertices, one edge per line. Blank lines and lines starting with
// '#' are ignored.

inline Graph read_edge_list(std::istream& in) {
  std::string line;
  std::optional<Index> n;
  std::vector<Edge> edges;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    if (!n) {
      std::string tag;
      Index count = 0;
      if (!(ls >> tag >> count) || tag != "N" || count <= 0) {
        throw IngestionError("edge list line " + std::to_string(lineno) +
                             ": expected header 'N <count>'");
      }
      n = count;
      continue;
    }
    Edge e;
    if (!(ls >> e.u >> e.v)) {
      throw IngestionError("edge list line " + std::to_string(lineno) + ": expected 'i j [w]'");
    }
    double w = 1.0;
    if (ls >> w) e.weight = w;
    edges.push_back(e);
  }
  if (!n) throw IngestionError("edge list is missing the 'N <count>' header");
  try {
    return Graph(*n, std::move(edges));
  } catch (const InvalidArgument& ex) {
    throw IngestionError(std::string("edge list: ") + ex.what());
  }
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
  out << "N " << g.order() << '\n';
  out.precision(17);
  for (const Edge& e : g.edges()) {
    out << e.u << ' ' << e.v;
    if (e.weight != 1.0) out << ' ' << e.weight;
    out << '\n';
  }
}

}  // namespace gsis
