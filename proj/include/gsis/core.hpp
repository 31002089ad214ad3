#pragma once

// Common aliases, error types and small dense linear-algebra helpers shared
// by every gsis header.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsis {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// A graph signal, one real value per vertex. Its graph Fourier transform is
/// also held in a Signal indexed by frequency.
using Signal = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidShift : public Error {
 public:
  using Error::Error;
};

class DegenerateGraph : public Error {
 public:
  using Error::Error;
};

class InvalidGenerator : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class DiagonalizationFailure : public Error {
 public:
  DiagonalizationFailure(const std::string& what, double worst_residual)
      : Error(what), worst_residual_(worst_residual) {}
  double worst_residual() const noexcept { return worst_residual_; }

 private:
  double worst_residual_;
};

class DistinctnessViolation : public Error {
 public:
  using Error::Error;
};

class SizeLimitError : public Error {
 public:
  using Error::Error;
};

class NonInjectiveSampling : public Error {
 public:
  using Error::Error;
};

class DegenerateInnerProduct : public Error {
 public:
  using Error::Error;
};

class IngestionError : public Error {
 public:
  using Error::Error;
};

inline void require_same_size(Index a, Index b, const char* what) {
  if (a != b) {
    throw DimensionMismatch(std::string(what) + ": expected size " + std::to_string(b) +
                            ", got " + std::to_string(a));
  }
}

/// Scale-aware tolerance used for symmetry, sparsity and commutativity checks.
inline double scaled_tolerance(double frobenius_norm, double rel = 1e-10) {
  return rel * std::max(1.0, frobenius_norm);
}

/// Singular values in decreasing order.
inline Vector singular_values(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return Vector();
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues();
}

/// Numerical rank with threshold rel_tol * sigma_max * max(rows, cols).
inline Index numerical_rank(const Matrix& m, double rel_tol = 1e-10) {
  const Vector s = singular_values(m);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double thr = rel_tol * s(0) * static_cast<double>(std::max(m.rows(), m.cols()));
  Index r = 0;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > thr) ++r;
  }
  return r;
}

inline double spectral_norm(const Matrix& m) {
  const Vector s = singular_values(m);
  return s.size() == 0 ? 0.0 : s(0);
}

/// Singular values of m above abs_tol * max(rows, cols); for rank questions
/// whose scale comes from outside m itself.
inline Index rank_at_scale(const Matrix& m, double abs_tol) {
  const Vector s = singular_values(m);
  const double thr = abs_tol * static_cast<double>(std::max(m.rows(), m.cols()));
  Index r = 0;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > thr) ++r;
  }
  return r;
}

/// Columns rescaled to unit Euclidean norm; zero columns are left untouched.
inline Matrix normalize_columns(Matrix m) {
  for (Index j = 0; j < m.cols(); ++j) {
    const double n = m.col(j).norm();
    if (n > 0.0) m.col(j) /= n;
  }
  return m;
}

inline Vector unit_vector(Index n, Index i) {
  Vector e = Vector::Zero(n);
  e(i) = 1.0;
  return e;
}

/// Flips the sign of v so that its first entry with magnitude above `floor`
/// is positive.
inline void normalize_sign(Eigen::Ref<Vector> v, double floor = 1e-8) {
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > floor) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

inline void check_index_set(const std::vector<Index>& idx, Index n, const char* what) {
  for (Index i : idx) {
    if (i < 0 || i >= n) {
      throw InvalidArgument(std::string(what) + ": index " + std::to_string(i) +
                            " outside [0, " + std::to_string(n) + ")");
    }
  }
}

/// Sorted copy with duplicates removed.
inline std::vector<Index> sorted_unique(std::vector<Index> idx) {
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

}  // namespace gsis
