#pragma once

// CSV and JSON serialization of matrices, decompositions, spaces, kernels,
// reconstructions and experiment tables.

#include "gsis/core.hpp"
#include "gsis/experiments.hpp"
#include "gsis/kernels.hpp"
#include "gsis/sampling.hpp"
#include "gsis/spaces.hpp"
#include "gsis/spectral.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

namespace gsis::io {

using Json = nlohmann::json;

/// Shortest round-trip text for a double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_matrix_csv(std::ostream& out, const Matrix& m,
                             const std::vector<std::string>& header = {}) {
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  if (!header.empty()) out << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
}

inline void write_vector_csv(std::ostream& out, const Vector& v, const std::string& name = "value") {
  out << "index," << name << '\n';
  for (Index i = 0; i < v.size(); ++i) out << i << ',' << format_double(v(i)) << '\n';
}

inline Json to_json(const Vector& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

inline Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) rows.push_back(to_json(Vector(m.row(i).transpose())));
  return rows;
}

inline Matrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw IngestionError("matrix JSON must be an array of rows");
  const auto rows = static_cast<Index>(j.size());
  const Index cols = rows ? static_cast<Index>(j.at(0).size()) : 0;
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& r = j.at(static_cast<std::size_t>(i));
    if (!r.is_array() || static_cast<Index>(r.size()) != cols) {
      throw IngestionError("matrix JSON rows must have equal length");
    }
    for (Index c = 0; c < cols; ++c) m(i, c) = r.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

inline Json to_json(const SpectralDecomposition& d) {
  Json clusters = Json::array();
  for (const auto& c : d.joint_clusters()) {
    if (c.size() > 1) clusters.push_back(c);
  }
  return {{"order", d.order()},
          {"num_shifts", d.num_shifts()},
          {"eigenvalues", to_json(d.eigenvalues())},
          {"assumption1_holds", d.assumption1_holds()},
          {"min_spectral_gap", d.min_spectral_gap()},
          {"max_relative_residual", d.max_relative_residual()},
          {"repeated_points", clusters}};
}

inline Json to_json(const SignalSpace& s) {
  Json provenance;
  if (std::holds_alternative<BandlimitedOrigin>(s.origin())) {
    provenance = {{"kind", "bandlimited"}};
  } else if (const auto* g = std::get_if<GeneratorOrigin>(&s.origin())) {
    provenance = {{"kind", "gsis_generators"}, {"num_generators", g->generators.size()}};
  } else {
    provenance = {{"kind", "pgsis"}};
  }
  return {{"omega", s.omega()}, {"dim", s.dim()}, {"provenance", provenance}};
}

inline Json to_json(const ShiftInvariantKernel& k) {
  return {{"spectrum", to_json(k.spectrum())}, {"omega", k.omega()}};
}

inline Json to_json(const ReconstructionResult& r) {
  return {{"residual_norm", r.residual_norm},
          {"depth", r.depth},
          {"dims_trace", r.dims_trace},
          {"residual_trace", r.residual_trace},
          {"warnings", r.warnings},
          {"degenerate_candidates", r.degenerate_candidates}};
}

/// Tidy rows n,P,metric,value with metrics RE, SE (log10 means) and
/// RE_raw, SE_raw (raw means).
inline void write_metrics_csv(std::ostream& out, const MetricsTable& t) {
  out << "n,P,metric,value\n";
  for (const auto& c : t.cells) {
    out << c.level << ',' << c.p << ",RE," << format_double(c.re_log_mean) << '\n';
    out << c.level << ',' << c.p << ",SE," << format_double(c.se_log_mean) << '\n';
    out << c.level << ',' << c.p << ",RE_raw," << format_double(c.re_raw_mean) << '\n';
    out << c.level << ',' << c.p << ",SE_raw," << format_double(c.se_raw_mean) << '\n';
  }
}

/// One row per (n, P, trial) with raw errors.
inline void write_trials_csv(std::ostream& out, const MetricsTable& t) {
  out << "n,P,trial,re_raw,se_raw\n";
  for (const auto& c : t.cells) {
    for (std::size_t k = 0; k < c.re_raw.size(); ++k) {
      out << c.level << ',' << c.p << ',' << k << ',' << format_double(c.re_raw[k]) << ','
          << format_double(c.se_raw[k]) << '\n';
    }
  }
}

inline void write_comparison_csv(std::ostream& out, const ModelComparison& m) {
  out << "n,F_K,F_B\n";
  for (std::size_t c = 0; c < m.levels.size(); ++c) {
    out << m.levels[c] << ',' << format_double(m.mean_fk[c]) << ',' << format_double(m.mean_fb[c])
        << '\n';
  }
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  f << content;
  if (!f) throw Error("failed writing " + path);
}

}  // namespace gsis::io
