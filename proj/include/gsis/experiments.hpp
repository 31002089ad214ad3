#pragma once

// Damped-cosine reconstruction experiments on circulant graphs, best
// sup-norm approximation from Krylov spaces, adaptive vs nonadaptive model
// comparison and CSV signal ingestion.

#include "gsis/core.hpp"
#include "gsis/graph.hpp"
#include "gsis/krylov.hpp"
#include "gsis/sampling.hpp"
#include "gsis/spaces.hpp"
#include "gsis/spectral.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace gsis {

/// x0(i) = amp * exp(-decay |i - c|) * cos(freq |i - c|), c = floor(N/2).
inline Signal damped_cosine_signal(Index n, double amp, double decay, double freq) {
  if (n < 1) throw InvalidArgument("signal order must be positive");
  Signal x(n);
  const Index c = n / 2;
  for (Index i = 0; i < n; ++i) {
    const double d = static_cast<double>(std::abs(i - c));
    x(i) = amp * std::exp(-decay * d) * std::cos(freq * d);
  }
  return x;
}

struct ExperimentConfig {
  Index n = 100;
  std::vector<Index> q{1, 3};
  double amp = 1.0;
  double decay = 0.25;
  double freq = 2.0 * 3.14159265358979323846 / 5.0;
  double sigma = 0.1;
  int trials = 100;
  std::vector<Index> p_values;
  std::vector<Index> levels;
  std::uint64_t seed = 0;
  double delta = 0.0;

  void validate() const {
    if (n < 1) throw InvalidArgument("graph order must be positive");
    if (!(sigma >= 0.0)) throw InvalidArgument("noise level must be nonnegative");
    if (trials < 1) throw InvalidArgument("at least one trial is required");
    if (p_values.empty()) throw InvalidArgument("sampling range is empty");
    if (levels.empty()) throw InvalidArgument("level range is empty");
    for (Index p : p_values) {
      if (p < 0 || n / 2 - p < 0 || n / 2 + p >= n) {
        throw InvalidArgument("sampling half-width " + std::to_string(p) + " out of range");
      }
    }
    for (Index l : levels) {
      if (l < 0) throw InvalidArgument("Krylov levels must be nonnegative");
    }
    if (!(delta >= 0.0)) throw InvalidArgument("delta must be nonnegative");
  }
};

/// RE = log10(raw + 1e-6) with raw = ||x_n - x0||_inf / ||x0||_inf; SE is the
/// same on the samples.
inline double log_error(double raw) { return std::log10(raw + 1e-6); }

struct MetricsCell {
  Index level = 0;
  Index p = 0;
  double re_log_mean = 0.0;
  double se_log_mean = 0.0;
  double re_raw_mean = 0.0;
  double se_raw_mean = 0.0;
  std::vector<double> re_raw;
  std::vector<double> se_raw;
};

struct MetricsTable {
  std::vector<Index> levels;
  std::vector<Index> p_values;
  /// P-major: cells[ip * levels.size() + in].
  std::vector<MetricsCell> cells;

  const MetricsCell& at(Index level, Index p) const {
    for (const auto& c : cells) {
      if (c.level == level && c.p == p) return c;
    }
    throw InvalidArgument("no cell for (n, P) = (" + std::to_string(level) + ", " +
                          std::to_string(p) + ")");
  }
};

/// Per-trial seed derived from (master, P, trial). One trial reconstructs once
/// and reads x_n off every level, so all n in a column share the noise draw.
inline std::uint64_t trial_seed(std::uint64_t master, Index p, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(trial)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

inline MetricsTable run_circulant_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto circ = build_circulant(cfg.n, cfg.q);
  const Signal x0 = damped_cosine_signal(cfg.n, cfg.amp, cfg.decay, cfg.freq);
  const double x0_sup = x0.cwiseAbs().maxCoeff();
  if (!(x0_sup > 0.0)) throw InvalidArgument("damped cosine signal is identically zero");
  const GeneratorFamily phis{unit_vector(cfg.n, cfg.n / 2)};
  const Index top = *std::max_element(cfg.levels.begin(), cfg.levels.end());

  MetricsTable table;
  table.levels = cfg.levels;
  table.p_values = cfg.p_values;
  for (Index p : cfg.p_values) {
    const auto scheme = subset_sampler(centered_window(cfg.n, p), cfg.n);
    const Vector ax0 = scheme.apply(x0);
    const double ax0_sup = ax0.cwiseAbs().maxCoeff();
    std::vector<MetricsCell> column(cfg.levels.size());
    for (std::size_t k = 0; k < cfg.levels.size(); ++k) {
      column[k].level = cfg.levels[k];
      column[k].p = p;
    }
    for (int t = 0; t < cfg.trials; ++t) {
      std::mt19937_64 rng(trial_seed(cfg.seed, p, t));
      const Vector y = ax0 + uniform_noise(ax0.size(), cfg.sigma, rng);
      KrylovReconstructionOptions opts;
      opts.delta = cfg.delta;
      opts.max_level = top;
      opts.policy = DegeneratePolicy::drop;
      opts.record_iterates = true;
      const auto res = reconstruct_krylov(circ.shifts, phis, scheme, y, opts);
      for (std::size_t k = 0; k < cfg.levels.size(); ++k) {
        const auto idx = std::min<std::size_t>(static_cast<std::size_t>(cfg.levels[k]),
                                               res.iterates.size() - 1);
        const Signal& xn = res.iterates[idx];
        const double re = (xn - x0).cwiseAbs().maxCoeff() / x0_sup;
        const double se = (scheme.apply(xn) - ax0).cwiseAbs().maxCoeff() / ax0_sup;
        column[k].re_raw.push_back(re);
        column[k].se_raw.push_back(se);
      }
    }
    for (auto& cell : column) {
      const double m = static_cast<double>(cfg.trials);
      for (std::size_t t = 0; t < cell.re_raw.size(); ++t) {
        cell.re_log_mean += log_error(cell.re_raw[t]) / m;
        cell.se_log_mean += log_error(cell.se_raw[t]) / m;
        cell.re_raw_mean += cell.re_raw[t] / m;
        cell.se_raw_mean += cell.se_raw[t] / m;
      }
      table.cells.push_back(std::move(cell));
    }
  }
  return table;
}

namespace detail {

/// argmin_t max_i |r_i - t a_i| by golden-section search on the convex
/// objective; the minimizer lies within 2 ||r||_inf / ||a||_inf of zero.
inline double sup_norm_line_search(const Vector& r, const Vector& a) {
  const double amax = a.cwiseAbs().maxCoeff();
  if (amax == 0.0) return 0.0;
  const double span = 2.0 * r.cwiseAbs().maxCoeff() / amax;
  auto f = [&](double t) { return (r - t * a).cwiseAbs().maxCoeff(); };
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = -span, hi = span;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 90 && hi - lo > 1e-15 * std::max(1.0, span); ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  const double t = 0.5 * (lo + hi);
  return f(t) < f(0.0) ? t : 0.0;
}

}  // namespace detail

/// Upper bounds on E_n = inf_{x in H_n} ||x0 - x||_inf / ||x0||_inf for every
/// level of a Krylov chain. Each level starts from the better of the l2
/// projection and the previous level's approximant, then runs coordinate
/// descent on the sup norm, so the values are nonincreasing in n.
inline std::vector<double> approximation_error(const KrylovSubspace& chain, const Signal& x0,
                                               int max_passes = 40) {
  require_same_size(x0.size(), chain.basis.rows(), "approximation_error");
  const double sup = x0.cwiseAbs().maxCoeff();
  if (!(sup > 0.0)) throw InvalidArgument("approximation error needs a nonzero signal");
  std::vector<double> out;
  Vector prev;  // coefficients of the previous approximant
  for (Index d : chain.dims) {
    const Matrix q = chain.basis.leftCols(d);
    Vector c = q.transpose() * x0;
    double best = (x0 - q * c).cwiseAbs().maxCoeff();
    if (prev.size() > 0) {
      Vector warm = Vector::Zero(d);
      warm.head(prev.size()) = prev;
      const double w = (x0 - q * warm).cwiseAbs().maxCoeff();
      if (w < best) {
        best = w;
        c = warm;
      }
    }
    Vector r = x0 - q * c;
    for (int pass = 0; pass < max_passes && d > 0; ++pass) {
      const double before = best;
      for (Index j = 0; j < d; ++j) {
        const double t = detail::sup_norm_line_search(r, q.col(j));
        if (t != 0.0) {
          c(j) += t;
          r -= t * q.col(j);
        }
      }
      best = r.cwiseAbs().maxCoeff();
      if (!(best < before * (1.0 - 1e-12))) break;
    }
    prev = c;
    out.push_back(best / sup);
  }
  return out;
}

enum class GeneratorRuleKind { adaptive, nonadaptive };

struct GeneratorRule {
  GeneratorRuleKind kind = GeneratorRuleKind::adaptive;
  Index k = 3;
  /// Explicit vertices for the nonadaptive rule; empty means the k vertices of
  /// largest mean magnitude over the dataset.
  std::vector<Index> vertices;
};

struct ModelComparison {
  std::vector<Index> levels;
  /// Dataset means of F_{K,n} = ||x - x_{K;n}||_inf and F_{B,n}.
  std::vector<double> mean_fk;
  std::vector<double> mean_fb;
  /// Per signal (rows) and level (columns).
  Matrix fk;
  Matrix fb;
  Matrix dims;
};

namespace detail {

inline std::vector<Index> top_k_vertices(const Vector& score, Index k) {
  std::vector<Index> idx(static_cast<std::size_t>(score.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return score(a) > score(b); });
  idx.resize(static_cast<std::size_t>(std::min<Index>(k, score.size())));
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace detail

/// Compares Krylov approximation from delta generators against the
/// lowest-frequency bandlimited space of equal dimension. Frequencies are
/// ranked by the eigenvalue of base_shift.
inline ModelComparison run_model_comparison(const SpectralDecomposition& decomp,
                                            const Matrix& base_shift,
                                            const std::vector<Signal>& dataset,
                                            const GeneratorRule& rule, std::vector<Index> levels) {
  const Index n = decomp.order();
  if (levels.empty()) throw InvalidArgument("level list is empty");
  if (rule.k < 1 && rule.vertices.empty()) throw InvalidArgument("need at least one generator");
  for (const auto& x : dataset) require_same_size(x.size(), n, "dataset signal");
  for (Index l : levels) {
    if (l < 0) throw InvalidArgument("Krylov levels must be nonnegative");
  }
  const auto mult = spectral_multiplier(decomp, base_shift);
  std::vector<Index> freq(static_cast<std::size_t>(n));
  std::iota(freq.begin(), freq.end(), Index{0});
  std::stable_sort(freq.begin(), freq.end(),
                   [&](Index a, Index b) { return mult.values(a) < mult.values(b); });

  std::vector<Index> fixed = rule.vertices;
  if (rule.kind == GeneratorRuleKind::nonadaptive && fixed.empty()) {
    Vector mean = Vector::Zero(n);
    for (const auto& x : dataset) mean += x.cwiseAbs();
    fixed = detail::top_k_vertices(mean, rule.k);
  }
  check_index_set(fixed, n, "generator vertices");

  const auto rows = static_cast<Index>(dataset.size());
  const auto cols = static_cast<Index>(levels.size());
  ModelComparison out{levels, std::vector<double>(levels.size(), 0.0),
                      std::vector<double>(levels.size(), 0.0), Matrix::Zero(rows, cols),
                      Matrix::Zero(rows, cols), Matrix::Zero(rows, cols)};
  const Index top = *std::max_element(levels.begin(), levels.end());
  const Matrix identity = Matrix::Identity(n, n);
  for (Index s = 0; s < rows; ++s) {
    const Signal& x = dataset[static_cast<std::size_t>(s)];
    const auto verts = rule.kind == GeneratorRuleKind::adaptive
                           ? detail::top_k_vertices(x.cwiseAbs(), rule.k)
                           : fixed;
    GeneratorFamily phis;
    for (Index v : verts) phis.push_back(unit_vector(n, v));
    KrylovReconstructionOptions opts;
    opts.max_level = top;
    opts.record_iterates = true;
    const auto res = reconstruct_krylov(decomp.shifts(), phis, identity, x, opts);
    for (Index c = 0; c < cols; ++c) {
      const auto idx = std::min<std::size_t>(static_cast<std::size_t>(levels[static_cast<std::size_t>(c)]),
                                             res.iterates.size() - 1);
      const Index dim = res.dims_trace[idx];
      out.fk(s, c) = (x - res.iterates[idx]).cwiseAbs().maxCoeff();
      Matrix ub(n, dim);
      for (Index j = 0; j < dim; ++j) ub.col(j) = decomp.basis().col(freq[static_cast<std::size_t>(j)]);
      out.fb(s, c) = (x - ub * (ub.transpose() * x)).cwiseAbs().maxCoeff();
      out.dims(s, c) = static_cast<double>(dim);
    }
  }
  for (Index c = 0; c < cols; ++c) {
    if (rows > 0) {
      out.mean_fk[static_cast<std::size_t>(c)] = out.fk.col(c).mean();
      out.mean_fb[static_cast<std::size_t>(c)] = out.fb.col(c).mean();
    }
  }
  return out;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ls(line);
  while (std::getline(ls, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline bool parse_index(const std::string& s, Index& out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    const long long v = std::stoll(s, &pos);
    out = static_cast<Index>(v);
  } catch (const std::exception&) {
    return false;
  }
  return pos == s.size();
}

}  // namespace detail

/// One signal per data row; the header names vertices. When every header
/// cell is an integer in [0, N) the columns are mapped to those vertices,
/// otherwise columns are taken in vertex order and there must be N of them.
inline std::vector<Signal> ingest_signals_csv(std::istream& in, Index n) {
  std::vector<Signal> out;
  std::string line;
  std::size_t lineno = 0;
  std::vector<Index> column_vertex;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = detail::split_csv_line(line);
    if (column_vertex.empty()) {
      std::vector<Index> ids;
      bool numeric = true;
      for (const auto& c : cells) {
        Index v = 0;
        if (!detail::parse_index(c, v) || v < 0 || v >= n) {
          numeric = false;
          break;
        }
        ids.push_back(v);
      }
      if (numeric) {
        if (sorted_unique(ids).size() != ids.size()) {
          throw IngestionError("CSV header repeats a vertex label");
        }
        column_vertex = ids;
      } else {
        column_vertex.resize(cells.size());
        std::iota(column_vertex.begin(), column_vertex.end(), Index{0});
      }
      if (static_cast<Index>(column_vertex.size()) != n) {
        throw IngestionError("CSV header has " + std::to_string(column_vertex.size()) +
                             " columns but the graph has " + std::to_string(n) + " vertices");
      }
      continue;
    }
    if (cells.size() != column_vertex.size()) {
      throw IngestionError("CSV row " + std::to_string(lineno) + " has " +
                           std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(column_vertex.size()));
    }
    Signal x(n);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      std::size_t pos = 0;
      bool ok = !cells[c].empty();
      if (ok) {
        try {
          v = std::stod(cells[c], &pos);
        } catch (const std::exception&) {
          ok = false;
        }
      }
      if (!ok || pos != cells[c].size() || !std::isfinite(v)) {
        throw IngestionError("CSV row " + std::to_string(lineno) + ", column " +
                             std::to_string(c + 1) + ": '" + cells[c] + "' is not a finite number");
      }
      x(column_vertex[c]) = v;
    }
    out.push_back(std::move(x));
  }
  return out;
}

inline std::vector<Signal> ingest_signals_csv(const std::string& path, Index n) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open " + path);
  return ingest_signals_csv(in, n);
}

}  // namespace gsis
