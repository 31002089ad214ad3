#include "gsis/gsis.hpp"
#include "gsis/io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using gsis::Index;
using gsis::Matrix;
using gsis::Vector;
using gsis::io::Json;

namespace {

struct GraphOpts {
  std::string path;
  Index circulant = 0;
  std::string q = "1,3";
  std::string shift = "normalized";
};

void add_graph_options(CLI::App* cmd, GraphOpts& g) {
  cmd->add_option("--graph", g.path, "edge list ('N <count>' header, then 'i j [w]')");
  cmd->add_option("--circulant", g.circulant, "build C(N, Q) instead of reading a file");
  cmd->add_option("--q", g.q, "circulant generator set, e.g. 1,3");
  cmd->add_option("--shift", g.shift, "shift for file graphs: adjacency|laplacian|normalized")
      ->check(CLI::IsMember({"adjacency", "laplacian", "normalized"}));
}

std::vector<Index> parse_list(const std::string& s) {
  std::vector<Index> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t pos = 0;
      out.push_back(static_cast<Index>(std::stoll(item, &pos)));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw gsis::InvalidArgument("not an integer list: '" + s + "'");
    }
  }
  return out;
}

/// "a:b" inclusive.
std::vector<Index> parse_range(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) return parse_list(s);
  const auto a = parse_list(s.substr(0, colon));
  const auto b = parse_list(s.substr(colon + 1));
  if (a.size() != 1 || b.size() != 1 || b[0] < a[0]) {
    throw gsis::InvalidArgument("bad range '" + s + "', expected a:b with a <= b");
  }
  std::vector<Index> out;
  for (Index i = a[0]; i <= b[0]; ++i) out.push_back(i);
  return out;
}

gsis::ShiftKind parse_kind(const std::string& s) {
  if (s == "adjacency") return gsis::ShiftKind::adjacency;
  if (s == "laplacian") return gsis::ShiftKind::laplacian;
  return gsis::ShiftKind::normalized_laplacian;
}

gsis::ShiftSet load_shifts(const GraphOpts& g) {
  if (g.circulant > 0) return gsis::build_circulant(g.circulant, parse_list(g.q)).shifts;
  if (g.path.empty()) throw gsis::InvalidArgument("give --graph FILE or --circulant N");
  std::ifstream in(g.path);
  if (!in) throw gsis::IngestionError("cannot open " + g.path);
  auto graph = std::make_shared<const gsis::Graph>(gsis::read_edge_list(in));
  return gsis::ShiftSet({gsis::build_standard_shift(graph, parse_kind(g.shift))});
}

/// Numeric CSV rows; a first line that does not parse is taken as a header.
std::vector<std::vector<double>> read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw gsis::IngestionError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool ok = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        row.push_back(std::stod(cell, &pos));
        ok = ok && cell.find_first_not_of(" \t\r", pos) == std::string::npos && std::isfinite(row.back());
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok) {
      if (rows.empty() && lineno == 1) continue;
      throw gsis::IngestionError(path + " line " + std::to_string(lineno) + ": non-numeric cell");
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw gsis::IngestionError(path + " line " + std::to_string(lineno) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix read_matrix(const std::string& path) {
  const auto rows = read_numeric_csv(path);
  if (rows.empty()) throw gsis::IngestionError(path + " holds no matrix");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

/// One value per row, last column (accepts the index,value layout we write).
Vector read_vector(const std::string& path) {
  const Matrix m = read_matrix(path);
  return m.col(m.cols() - 1);
}

struct GeneratorOpts {
  std::string vertices;
  std::string file;
};

void add_generator_options(CLI::App* cmd, GeneratorOpts& g) {
  cmd->add_option("--generators", g.vertices, "delta generators at these vertices, e.g. 3,7");
  cmd->add_option("--generator-file", g.file, "one generator signal as CSV");
}

gsis::GeneratorFamily load_generators(const GeneratorOpts& g, Index n) {
  gsis::GeneratorFamily phis;
  for (Index v : parse_list(g.vertices)) {
    if (v < 0 || v >= n) throw gsis::InvalidArgument("generator vertex " + std::to_string(v) + " out of range");
    phis.push_back(gsis::unit_vector(n, v));
  }
  if (!g.file.empty()) {
    Vector phi = read_vector(g.file);
    gsis::require_same_size(phi.size(), n, "generator file");
    phis.push_back(std::move(phi));
  }
  if (phis.empty()) throw gsis::InvalidArgument("give --generators or --generator-file");
  return phis;
}

/// Writes into --out when given; the JSON summary always goes to stdout.
class Output {
 public:
  explicit Output(std::string dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) fs::create_directories(dir_);
  }
  bool enabled() const { return !dir_.empty(); }

  template <class Writer>
  void file(const std::string& name, Writer&& w) const {
    if (!enabled()) return;
    std::ostringstream s;
    w(s);
    gsis::io::write_file((fs::path(dir_) / name).string(), s.str());
  }

  void json(const std::string& name, const Json& j) const {
    file(name, [&](std::ostream& s) { s << j.dump(2) << '\n'; });
  }

  void finish(const Json& summary) const {
    json("summary.json", summary);
    std::cout << summary.dump(2) << '\n';
  }

 private:
  std::string dir_;
};

std::string out_dir;

// ---------------------------------------------------------------------------

void cmd_graph_export(const GraphOpts& g) {
  const auto shifts = load_shifts(g);
  const Output out(out_dir);
  out.file("edges.txt", [&](std::ostream& s) { gsis::write_edge_list(s, *shifts.graph()); });
  for (std::size_t l = 0; l < shifts.size(); ++l) {
    out.file("shift_" + std::to_string(l) + ".csv",
             [&](std::ostream& s) { gsis::io::write_matrix_csv(s, shifts[l].matrix()); });
  }
  const auto comm = gsis::check_commutative(shifts);
  out.finish({{"order", shifts.order()},
              {"edges", shifts.graph()->edges().size()},
              {"num_shifts", shifts.size()},
              {"commutative", comm.commutative},
              {"commutator_residual", comm.residual}});
}

void cmd_spectral_export(const GraphOpts& g, std::uint64_t seed) {
  const auto shifts = load_shifts(g);
  gsis::DiagonalizationOptions opts;
  opts.seed = seed;
  const auto d = gsis::diagonalize_simultaneously(shifts, opts);
  const Output out(out_dir);
  out.file("basis.csv", [&](std::ostream& s) { gsis::io::write_matrix_csv(s, d->basis()); });
  out.finish(gsis::io::to_json(*d));
}

void emit_space(const gsis::SignalSpace& space) {
  const Output out(out_dir);
  out.file("basis.csv", [&](std::ostream& s) { gsis::io::write_matrix_csv(s, space.basis()); });
  out.finish(gsis::io::to_json(space));
}

void cmd_space_gsis(const GraphOpts& g, const GeneratorOpts& gen, double tol) {
  const auto shifts = load_shifts(g);
  const auto d = gsis::diagonalize_simultaneously(shifts);
  emit_space(gsis::gsis_from_generators(d, load_generators(gen, shifts.order()), tol));
}

void cmd_space_bandlimited(const GraphOpts& g, const std::string& omega) {
  const auto d = gsis::diagonalize_simultaneously(load_shifts(g));
  emit_space(gsis::bandlimited_space(d, parse_list(omega)));
}

void cmd_space_bounds(const GraphOpts& g, const GeneratorOpts& gen, const std::string& omega,
                      int max_degree, std::uint64_t seed) {
  const auto shifts = load_shifts(g);
  const auto d = gsis::diagonalize_simultaneously(shifts);
  Json j;
  Vector phi0;
  if (!omega.empty()) {
    // Canonical single generator of B_omega, with Riesz bounds for its shift.
    const auto c = gsis::canonical_generator(d, parse_list(omega), seed);
    const auto r = gsis::riesz_bounds(*d, c.shift, c.phi0, parse_list(omega));
    phi0 = c.phi0;
    j["riesz"] = {{"sigma_min", r.sigma_min}, {"sigma_max", r.sigma_max}};
    j["krylov_rank"] = c.krylov_rank;
    const Output out(out_dir);
    out.file("phi0.csv", [&](std::ostream& s) { gsis::io::write_vector_csv(s, phi0); });
    out.file("shift.csv", [&](std::ostream& s) { gsis::io::write_matrix_csv(s, c.shift); });
  } else {
    const auto phis = load_generators(gen, shifts.order());
    if (phis.size() != 1) throw gsis::InvalidArgument("frame bounds take exactly one generator");
    phi0 = phis.front();
  }
  const auto f = gsis::frame_bounds(*d, phi0, max_degree);
  j["frame"] = {{"max_degree", max_degree},
                {"sigma_min_plus", f.sigma_min_plus},
                {"sigma_max", f.sigma_max},
                {"rank", f.rank}};
  Output(out_dir).finish(j);
}

void cmd_space_uncertainty(const GraphOpts& g, const GeneratorOpts& gen, double tol) {
  const auto shifts = load_shifts(g);
  const auto phis = load_generators(gen, shifts.order());
  if (phis.size() != 1) throw gsis::InvalidArgument("the uncertainty check takes one generator");
  const auto d = gsis::diagonalize_simultaneously(shifts);
  const auto r = gsis::uncertainty_check(d, phis.front(), tol);
  Output(out_dir).finish({{"support_size", r.support_size},
                          {"space_dim", r.space_dim},
                          {"product", r.support_size * r.space_dim},
                          {"lower_bound", r.lower_bound},
                          {"exact_norm", r.exact_norm},
                          {"holds", r.holds}});
}

void cmd_kernel_make(const GraphOpts& g, const std::string& family, double param, int steps,
                     std::size_t base) {
  const auto shifts = load_shifts(g);
  const auto d = gsis::diagonalize_simultaneously(shifts);
  gsis::KernelParams p{gsis::KernelFamily::diffusion, param, steps};
  if (family == "random-walk") p.family = gsis::KernelFamily::random_walk;
  if (family == "regularization") p.family = gsis::KernelFamily::regularization;
  if (family == "spline") p.family = gsis::KernelFamily::spline;
  if (base >= shifts.size()) throw gsis::InvalidArgument("--base names a shift that does not exist");
  const auto k = gsis::make_kernel(d, p, shifts[base]);
  const Output out(out_dir);
  out.file("kernel.csv", [&](std::ostream& s) { gsis::io::write_matrix_csv(s, k.matrix()); });
  Json j = gsis::io::to_json(k);
  j["family"] = family;
  j["param"] = param;
  out.finish(j);
}

struct SampleOpts {
  std::string vertices;
  Index window = -1;
  std::size_t state = 0;
  Index vertex = 0;
  Index snapshots = 1;
  std::string signal;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::string omega;
  double tol = 1e-10;
};

void cmd_sample(const GraphOpts& g, const SampleOpts& o, bool dynamic) {
  const auto shifts = load_shifts(g);
  const Index n = shifts.order();
  const auto d = gsis::diagonalize_simultaneously(shifts);
  std::optional<gsis::SamplingScheme> scheme;
  Json j;
  if (dynamic) {
    if (o.state >= shifts.size()) throw gsis::InvalidArgument("--state names a shift that does not exist");
    scheme = gsis::dynamic_sampler(*d, shifts[o.state].matrix(), o.vertex, o.snapshots);
    j["provenance"] = {{"kind", "dynamic"}, {"vertex", o.vertex}, {"snapshots", o.snapshots}};
  } else {
    const auto w = o.window >= 0 ? gsis::centered_window(n, o.window) : parse_list(o.vertices);
    scheme = gsis::subset_sampler(w, n);
    j["provenance"] = {{"kind", "subset"}, {"vertices", std::get<gsis::SubsetProvenance>(scheme->provenance()).vertices}};
  }
  j["rows"] = scheme->rows();
  const Output out(out_dir);
  out.file("sampling.csv", [&](std::ostream& s) { gsis::io::write_matrix_csv(s, scheme->matrix()); });
  if (!o.omega.empty()) {
    const auto omega = parse_list(o.omega);
    j["injective_on_bandlimited"] = gsis::check_injective(*scheme, gsis::bandlimited_space(d, omega).basis(), o.tol);
    if (dynamic) {
      const auto r = gsis::check_dynamic_injective(*d, omega, shifts[o.state].matrix(), o.vertex, o.snapshots, o.tol);
      j["diagnosis"] = gsis::to_string(r.diagnosis);
    }
  }
  if (!o.signal.empty()) {
    const Vector x = read_vector(o.signal);
    gsis::require_same_size(x.size(), n, "signal file");
    const auto obs = gsis::observe(*scheme, x, o.sigma, o.seed);
    out.file("observations.csv", [&](std::ostream& s) { gsis::io::write_vector_csv(s, obs.y, "y"); });
    j["noise"] = obs.noise ? Json{{"distribution", obs.noise->distribution},
                                  {"sigma", obs.noise->sigma},
                                  {"seed", obs.noise->seed}}
                           : Json(nullptr);
  }
  out.finish(j);
}

void emit_reconstruction(const Vector& x, Json j) {
  const Output out(out_dir);
  out.file("x.csv", [&](std::ostream& s) { gsis::io::write_vector_csv(s, x, "x"); });
  if (!out.enabled()) j["x"] = gsis::io::to_json(x);
  out.finish(j);
}

void cmd_reconstruct_direct(const GraphOpts& g, const std::string& sampling, const std::string& obs,
                            const std::string& omega) {
  const auto d = gsis::diagonalize_simultaneously(load_shifts(g));
  const Matrix a = read_matrix(sampling);
  const Vector y = read_vector(obs);
  const Vector x = gsis::reconstruct_direct(*d, parse_list(omega), a, y);
  emit_reconstruction(x, {{"method", "direct"}, {"residual_norm", (y - a * x).norm()}});
}

void cmd_reconstruct_krylov(const GraphOpts& g, const GeneratorOpts& gen, const std::string& sampling,
                            const std::string& obs, double delta, Index max_level, bool drop) {
  const auto shifts = load_shifts(g);
  const Matrix a = read_matrix(sampling);
  const Vector y = read_vector(obs);
  gsis::KrylovReconstructionOptions opts;
  opts.delta = delta;
  if (max_level >= 0) opts.max_level = max_level;
  opts.policy = drop ? gsis::DegeneratePolicy::drop : gsis::DegeneratePolicy::error;
  const auto r = gsis::reconstruct_krylov(shifts, load_generators(gen, shifts.order()), a, y, opts);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  Json j = gsis::io::to_json(r);
  j["method"] = "krylov";
  emit_reconstruction(r.x_out, j);
}

struct ExperimentOpts {
  gsis::ExperimentConfig cfg;
  std::string q = "1,3";
  std::string p_range = "1:45";
  std::string level_range = "1:18";
};

void cmd_experiment(ExperimentOpts& o) {
  auto& cfg = o.cfg;
  cfg.q = parse_list(o.q);
  cfg.p_values = parse_range(o.p_range);
  cfg.levels = parse_range(o.level_range);
  const auto t0 = std::chrono::steady_clock::now();
  const auto table = gsis::run_circulant_experiment(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const Output out(out_dir);
  out.file("metrics.csv", [&](std::ostream& s) { gsis::io::write_metrics_csv(s, table); });
  out.file("trials.csv", [&](std::ostream& s) { gsis::io::write_trials_csv(s, table); });
  Json cells = Json::array();
  for (const auto& c : table.cells) {
    cells.push_back({{"n", c.level}, {"P", c.p}, {"RE", c.re_log_mean}, {"SE", c.se_log_mean},
                     {"RE_raw", c.re_raw_mean}, {"SE_raw", c.se_raw_mean}});
  }
  Json j{{"config",
          {{"n", cfg.n}, {"q", cfg.q}, {"amp", cfg.amp}, {"decay", cfg.decay}, {"freq", cfg.freq},
           {"sigma", cfg.sigma}, {"trials", cfg.trials}, {"p_values", cfg.p_values},
           {"levels", cfg.levels}, {"seed", cfg.seed}, {"delta", cfg.delta}}},
         {"seconds", secs}};
  // Keep stdout readable for big grids; the full table is in metrics.csv.
  if (!out.enabled() || cells.size() <= 64) j["cells"] = cells;
  out.finish(j);
}

void cmd_model_compare(const GraphOpts& g, const std::string& signals, const std::string& rule_text,
                       const std::string& levels) {
  const auto shifts = load_shifts(g);
  const auto d = gsis::diagonalize_simultaneously(shifts);
  const auto data = gsis::ingest_signals_csv(signals, shifts.order());
  if (data.empty()) throw gsis::IngestionError(signals + " holds no signals");
  gsis::GeneratorRule rule;
  const auto colon = rule_text.find(':');
  const std::string kind = rule_text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "3" : rule_text.substr(colon + 1);
  if (kind == "adaptive" || kind == "nonadaptive") {
    rule.kind = kind == "adaptive" ? gsis::GeneratorRuleKind::adaptive : gsis::GeneratorRuleKind::nonadaptive;
    const auto k = parse_list(arg);
    if (k.size() != 1) throw gsis::InvalidArgument("generator rule needs one count, e.g. adaptive:3");
    rule.k = k.front();
  } else if (kind == "vertices") {
    rule.kind = gsis::GeneratorRuleKind::nonadaptive;
    rule.vertices = parse_list(arg);
  } else {
    throw gsis::InvalidArgument("generator rule must be adaptive:K, nonadaptive:K or vertices:i,j");
  }
  const auto cmp = gsis::run_model_comparison(*d, shifts[0].matrix(), data, rule, parse_range(levels));
  const Output out(out_dir);
  out.file("comparison.csv", [&](std::ostream& s) { gsis::io::write_comparison_csv(s, cmp); });
  Json rows = Json::array();
  for (std::size_t c = 0; c < cmp.levels.size(); ++c) {
    rows.push_back({{"n", cmp.levels[c]}, {"F_K", cmp.mean_fk[c]}, {"F_B", cmp.mean_fb[c]}});
  }
  out.finish({{"signals", data.size()}, {"rule", rule_text}, {"levels", rows}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph shift-invariant spaces: spaces, kernels, sampling and Krylov reconstruction"};
  app.require_subcommand(1);
  app.fallthrough();  // --out may follow the verb
  app.add_option("--out", out_dir, "directory for CSV/JSON output")->capture_default_str();

  GraphOpts graph;
  GeneratorOpts gen;
  std::uint64_t seed = 0;
  double tol = 1e-10;

  auto* graph_cmd = app.add_subcommand("graph", "graph construction")->require_subcommand(1);
  auto* graph_export = graph_cmd->add_subcommand("export", "write edge list and shift matrices");
  add_graph_options(graph_export, graph);
  graph_export->callback([&] { cmd_graph_export(graph); });

  auto* spectral = app.add_subcommand("spectral", "joint spectral decomposition")->require_subcommand(1);
  auto* spectral_export = spectral->add_subcommand("export", "write U and the joint spectrum");
  add_graph_options(spectral_export, graph);
  spectral_export->add_option("--seed", seed, "seed for the random combination of shifts");
  spectral_export->callback([&] { cmd_spectral_export(graph, seed); });

  auto* space = app.add_subcommand("space", "signal spaces")->require_subcommand(1);
  auto* space_gsis = space->add_subcommand("gsis", "space generated by shifts of generators");
  add_graph_options(space_gsis, graph);
  add_generator_options(space_gsis, gen);
  space_gsis->add_option("--tol", tol, "spectral support tolerance");
  space_gsis->callback([&] { cmd_space_gsis(graph, gen, tol); });

  std::string omega;
  auto* space_band = space->add_subcommand("bandlimited", "span of selected eigenvectors");
  add_graph_options(space_band, graph);
  space_band->add_option("--omega", omega, "frequency indices, e.g. 0,1,2")->required();
  space_band->callback([&] { cmd_space_bandlimited(graph, omega); });

  int max_degree = 2;
  auto* space_bounds = space->add_subcommand("bounds", "frame bounds, or Riesz bounds of a canonical generator");
  add_graph_options(space_bounds, graph);
  add_generator_options(space_bounds, gen);
  space_bounds->add_option("--omega", omega, "use the canonical generator of B_omega");
  space_bounds->add_option("--max-degree", max_degree, "frame level M");
  space_bounds->add_option("--seed", seed, "seed for the canonical generator");
  space_bounds->callback([&] { cmd_space_bounds(graph, gen, omega, max_degree, seed); });

  auto* space_unc = space->add_subcommand("uncertainty", "support size times dimension against the bound");
  add_graph_options(space_unc, graph);
  add_generator_options(space_unc, gen);
  space_unc->add_option("--tol", tol, "support tolerance");
  space_unc->callback([&] { cmd_space_uncertainty(graph, gen, tol); });

  std::string family = "diffusion";
  double param = 1.0;
  int steps = 1;
  std::size_t base = 0;
  auto* kernel = app.add_subcommand("kernel", "shift-invariant kernels")->require_subcommand(1);
  auto* kernel_make = kernel->add_subcommand("make", "kernel from a spectral family");
  add_graph_options(kernel_make, graph);
  kernel_make->add_option("--family", family)
      ->check(CLI::IsMember({"diffusion", "random-walk", "regularization", "spline"}));
  kernel_make->add_option("--param", param, "sigma, a or alpha depending on the family");
  kernel_make->add_option("--steps", steps, "random-walk steps p");
  kernel_make->add_option("--base", base, "index of the shift whose spectrum drives the kernel");
  kernel_make->callback([&] { cmd_kernel_make(graph, family, param, steps, base); });

  SampleOpts so;
  auto* sample = app.add_subcommand("sample", "sampling schemes and observations")->require_subcommand(1);
  auto* sample_subset = sample->add_subcommand("subset", "sample on a vertex subset");
  auto* sample_dynamic = sample->add_subcommand("dynamic", "snapshots x, Dx, ... at one vertex");
  for (auto* cmd : {sample_subset, sample_dynamic}) {
    add_graph_options(cmd, graph);
    cmd->add_option("--signal", so.signal, "signal CSV to observe");
    cmd->add_option("--sigma", so.sigma, "uniform noise level");
    cmd->add_option("--seed", so.seed, "noise seed");
    cmd->add_option("--omega", so.omega, "report injectivity on B_omega");
    cmd->add_option("--tol", so.tol, "injectivity tolerance");
  }
  sample_subset->add_option("--vertices", so.vertices, "vertex list, e.g. 0,4,9");
  sample_subset->add_option("--window", so.window, "centered window of half-width P");
  sample_subset->callback([&] { cmd_sample(graph, so, false); });
  sample_dynamic->add_option("--state", so.state, "index of the shift used as D");
  sample_dynamic->add_option("--vertex", so.vertex, "observed vertex i0")->required();
  sample_dynamic->add_option("--snapshots", so.snapshots, "number of snapshots k")->required();
  sample_dynamic->callback([&] { cmd_sample(graph, so, true); });

  std::string sampling_file, obs_file;
  double delta = 0.0;
  Index max_level = -1;
  bool drop = false;
  auto* recon = app.add_subcommand("reconstruct", "recover a signal from samples")->require_subcommand(1);
  auto* recon_direct = recon->add_subcommand("direct", "least squares on B_omega");
  auto* recon_krylov = recon->add_subcommand("krylov", "level-by-level Krylov reconstruction");
  for (auto* cmd : {recon_direct, recon_krylov}) {
    add_graph_options(cmd, graph);
    cmd->add_option("--sampling", sampling_file, "sampling matrix CSV")->required();
    cmd->add_option("--observations", obs_file, "observation vector CSV")->required();
  }
  recon_direct->add_option("--omega", omega, "frequency indices")->required();
  recon_direct->callback([&] { cmd_reconstruct_direct(graph, sampling_file, obs_file, omega); });
  add_generator_options(recon_krylov, gen);
  recon_krylov->add_option("--delta", delta, "stop once the residual is at most delta");
  recon_krylov->add_option("--max-level", max_level, "highest Krylov level");
  recon_krylov->add_flag("--drop-degenerate", drop, "drop degenerate directions instead of failing");
  recon_krylov->callback([&] { cmd_reconstruct_krylov(graph, gen, sampling_file, obs_file, delta, max_level, drop); });

  ExperimentOpts eo;
  auto* experiment = app.add_subcommand("experiment", "seeded experiment grids")->require_subcommand(1);
  auto* damped = experiment->add_subcommand("damped-cosine", "damped cosine on a circulant graph");
  damped->add_option("--n", eo.cfg.n);
  damped->add_option("--q", eo.q);
  damped->add_option("--amp", eo.cfg.amp);
  damped->add_option("--decay", eo.cfg.decay);
  damped->add_option("--freq", eo.cfg.freq);
  damped->add_option("--sigma", eo.cfg.sigma);
  damped->add_option("--trials", eo.cfg.trials);
  damped->add_option("--p-range", eo.p_range, "sampling half-widths a:b");
  damped->add_option("--level-range", eo.level_range, "Krylov levels a:b");
  damped->add_option("--seed", eo.cfg.seed);
  damped->add_option("--delta", eo.cfg.delta);
  damped->callback([&] { cmd_experiment(eo); });

  std::string signals, rule = "adaptive:3", levels = "0:8";
  auto* compare = app.add_subcommand("model-compare", "Krylov against bandlimited approximation of a dataset");
  add_graph_options(compare, graph);
  compare->add_option("--signals", signals, "CSV, header of vertex labels, one signal per row")->required();
  compare->add_option("--generators", rule, "adaptive:K, nonadaptive:K or vertices:i,j");
  compare->add_option("--levels", levels, "Krylov levels a:b");
  compare->callback([&] { cmd_model_compare(graph, signals, rule, levels); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const gsis::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
