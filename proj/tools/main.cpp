#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Core>
#include <boost/version.hpp>

#include "output.hpp"
#include "unigraph/absorption_theory.hpp"
#include "unigraph/bond_scattering.hpp"
#include "unigraph/defaults.hpp"
#include "unigraph/doublets.hpp"
#include "unigraph/ensemble.hpp"
#include "unigraph/errors.hpp"
#include "unigraph/graph_io.hpp"
#include "unigraph/parallel.hpp"
#include "unigraph/reference.hpp"
#include "unigraph/scattering.hpp"
#include "unigraph/secular.hpp"
#include "unigraph/spectral_stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace unigraph;
using namespace unigraph::cli;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNumeric = 2;

struct Options {
  std::string graph;
  std::string band = "2e9:8e9";
  double grid_step = 0.0;  // 0 = command default
  std::optional<std::size_t> n;
  std::uint64_t seed = defaults::kSeed;
  double absorption = defaults::kAbsorption;
  double delta_max = defaults::kDeltaMax;
  std::string edges;
  std::string out = "unigraph_out";
  std::string format = "csv";
  bool force = false;

  // command specific
  bool golden = false;
  std::string spectra;
  std::size_t ws_n = defaults::kEnhancementRealizations;
  double window = defaults::kEnhancementWindowHz;
  std::string bands = "2e9:4e9,4e9:6e9,6e9:8e9";
  bool dump_s = false;
  std::optional<double> mean_r;
  std::string s_file;
  bool keep_direct = false;
  int beta = 2;
};

double parse_number(std::string_view text) {
  double scale = 1.0;
  std::string s(text);
  if (s.size() > 2 && s.substr(s.size() - 2) == "Hz") s.resize(s.size() - 2);
  if (!s.empty()) {
    switch (s.back()) {
      case 'k': scale = 1e3; s.pop_back(); break;
      case 'M': scale = 1e6; s.pop_back(); break;
      case 'G': scale = 1e9; s.pop_back(); break;
      default: break;
    }
  }
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParameterError("cannot parse number '" + std::string(text) + "'");
  return v * scale;
}

Band parse_band(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ParameterError("band must be LO:HI, got '" + std::string(text) + "'");
  Band b{parse_number(text.substr(0, colon)), parse_number(text.substr(colon + 1))};
  if (!(b.lo_hz >= 0.0) || !(b.hi_hz > b.lo_hz) || !std::isfinite(b.hi_hz))
    throw ParameterError("band needs 0 <= LO < HI, got '" + std::string(text) + "'");
  return b;
}

std::vector<Band> parse_bands(std::string_view text) {
  std::vector<Band> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    out.push_back(parse_band(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Format parse_format(const std::string& f) {
  if (f == "csv") return Format::csv;
  if (f == "json") return Format::json;
  throw ParameterError("format must be csv or json");
}

/// Shared state of one command invocation: config hash, output directory, manifest.
class Run {
 public:
  Run(std::string command, const Options& opt)
      : opt_(opt), format_(parse_format(opt.format)), start_(std::chrono::steady_clock::now()) {
    info_.command = std::move(command);
    info_.seed = opt.seed;
  }

  void add_config(std::string key, std::string value) { info_.config.emplace_back(std::move(key), std::move(value)); }
  void add_config(std::string key, double value) { add_config(std::move(key), format_double(value)); }

  void add_graph(const std::string& path) {
    graph_hash_ = hash_file(path);
    add_config("graph_hash", graph_hash_);
    graph_path_ = path;
  }

  /// Freezes the config and opens the output directory.
  void open(const std::vector<std::string>& planned) {
    info_.finalize();
    dir_ = std::make_unique<OutputDir>(opt_.out, opt_.force);
    std::vector<std::string> names = planned;
    names.push_back("manifest.json");
    names.push_back("diagnostics.txt");
    dir_->check_free(names);
  }

  std::string table_name(const std::string& stem) const { return stem + (format_ == Format::csv ? ".csv" : ".json"); }

  void table(const Table& t) { dir_->write_table(t, format_, info_); }

  void document(const std::string& name, json doc) {
    doc["meta"] = info_.meta();
    dir_->write_json(name, doc);
  }

  void diagnose(std::string line) { diagnostics_.push_back(std::move(line)); }
  void diagnose_all(const std::vector<std::string>& lines, const std::string& prefix = "") {
    for (const auto& l : lines) diagnose(prefix + l);
  }

  void finish() {
    if (!dir_) return;
    if (!diagnostics_.empty()) {
      std::string text = info_.comment_line() + "\n";
      for (const auto& d : diagnostics_) text += d + "\n";
      dir_->write_text("diagnostics.txt", text);
    }
    json m = info_.meta();
    json inputs = json::object();
    for (const auto& [k, v] : info_.config) inputs[k] = v;
    m["inputs"] = inputs;
    if (!graph_path_.empty()) m["graph"] = {{"path", graph_path_}, {"fnv1a64", graph_hash_}};
    m["versions"] = {{"unigraph", UNIGRAPH_VERSION},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                   "." + std::to_string(EIGEN_MINOR_VERSION)},
                     {"boost", std::to_string(BOOST_VERSION / 100000) + "." +
                                   std::to_string(BOOST_VERSION / 100 % 1000) + "." +
                                   std::to_string(BOOST_VERSION % 100)},
                     {"compiler", __VERSION__}};
    m["workers"] = worker_count();
    m["files"] = dir_->written();
    m["diagnostic_count"] = diagnostics_.size();
    m["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    dir_->write_text("manifest.json", m.dump(2) + "\n");
  }

  /// Best effort after a numeric failure: the diagnostics file is always written.
  void fail(const std::string& message) {
    diagnose("error: " + message);
    try {
      if (info_.config_hash.empty()) info_.finalize();
      OutputDir dir(opt_.out, true);
      std::string text = info_.comment_line() + "\n";
      for (const auto& d : diagnostics_) text += d + "\n";
      dir.write_text("diagnostics.txt", text);
    } catch (const std::exception&) {
    }
  }

  Format format() const { return format_; }
  const Options& options() const { return opt_; }

 private:
  Options opt_;
  Format format_;
  RunInfo info_;
  std::unique_ptr<OutputDir> dir_;
  std::vector<std::string> diagnostics_;
  std::string graph_path_;
  std::string graph_hash_;
  std::chrono::steady_clock::time_point start_;
};

SolverConfig solver_config(const Options& opt) {
  SolverConfig cfg;
  if (opt.grid_step > 0.0) cfg.grid_step_hz = opt.grid_step;
  cfg.validate();
  return cfg;
}

void add_solver_config(Run& run, const SolverConfig& cfg) {
  run.add_config("grid_step_hz", cfg.grid_step_hz);
  run.add_config("refine_tolerance_hz", cfg.refine_tolerance_hz);
  run.add_config("pair_threshold_hz", cfg.pair_threshold_hz);
  run.add_config("resolution_hz", cfg.resolution_hz);
}

std::pair<std::size_t, std::size_t> shifter_edges(const GraphSpec& g, const std::string& spec) {
  if (!spec.empty()) {
    const auto comma = spec.find(',');
    if (comma == std::string::npos) throw ParameterError("--edges needs two edge ids separated by a comma");
    return {g.edge_index(spec.substr(0, comma)), g.edge_index(spec.substr(comma + 1))};
  }
  const auto ps = g.phase_shifter_edges();
  if (ps.size() != 2)
    throw ParameterError("graph has " + std::to_string(ps.size()) +
                         " phase-shifter edges; pass --edges A,B to choose the pair");
  return {ps[0], ps[1]};
}

struct Realization {
  int id = 0;
  double shift_m = 0.0;
  SpectrumResult spectrum;
  DoubletSet doublets;
};

struct EnsembleSetup {
  std::vector<GraphSpec> graphs;
  std::vector<double> shifts;
  std::size_t edge_a = 0;
  std::size_t edge_b = 0;
};

EnsembleSetup make_ensemble(Run& run, const GraphSpec& g, const Options& opt, std::size_t n) {
  if (n < 1) throw ParameterError("--n must be at least 1");
  if (!(opt.delta_max >= 0.0)) throw ParameterError("--delta-max must be non-negative");
  EnsembleSetup e;
  std::tie(e.edge_a, e.edge_b) = shifter_edges(g, opt.edges);
  run.add_config("n", std::to_string(n));
  run.add_config("seed", std::to_string(opt.seed));
  run.add_config("delta_max_m", opt.delta_max);
  run.add_config("edges", g.edges()[e.edge_a].id + "," + g.edges()[e.edge_b].id);
  e.graphs = generate_ensemble(g, e.edge_a, e.edge_b, n, opt.delta_max, opt.seed);
  e.shifts = ensemble_shifts(n, opt.delta_max, opt.seed);
  return e;
}

std::vector<Realization> solve_ensemble(const EnsembleSetup& e, Band band, const SolverConfig& cfg) {
  return parallel_map<Realization>(e.graphs.size(), [&](std::size_t i) {
    Realization r;
    r.id = static_cast<int>(i);
    r.shift_m = e.shifts[i];
    r.spectrum = find_spectrum(e.graphs[i], band, cfg, r.id);
    r.doublets = pair_doublets(r.spectrum, cfg);
    return r;
  });
}

Table spectrum_table(const std::vector<Realization>& rs, bool with_id) {
  Table t{"spectrum", {}, {}};
  if (with_id) t.columns.push_back("realization_id");
  for (const char* c : {"index", "frequency_hz", "width_hz"}) t.columns.push_back(c);
  for (const auto& r : rs)
    for (std::size_t i = 0; i < r.spectrum.resonances.size(); ++i) {
      std::vector<double> row;
      if (with_id) row.push_back(r.id);
      row.push_back(static_cast<double>(i));
      row.push_back(r.spectrum.resonances[i].frequency_hz);
      row.push_back(r.spectrum.resonances[i].width_hz);
      t.rows.push_back(std::move(row));
    }
  return t;
}

Table doublet_table(const std::vector<Realization>& rs, bool with_id) {
  Table t{"doublets", {}, {}};
  if (with_id) t.columns.push_back("realization_id");
  for (const char* c : {"nu_low_hz", "nu_high_hz", "splitting_hz"}) t.columns.push_back(c);
  for (const auto& r : rs)
    for (const auto& d : r.doublets.doublets) {
      std::vector<double> row;
      if (with_id) row.push_back(r.id);
      row.insert(row.end(), {d.nu_low_hz, d.nu_high_hz, d.splitting_hz});
      t.rows.push_back(std::move(row));
    }
  return t;
}

// ---- validate ----

int cmd_validate(const Options& opt) {
  Run run("validate", opt);
  const GraphParts parts = read_graph_parts(opt.graph);
  bool ok = true;
  const auto issues = check_graph(parts);
  for (const auto& issue : issues) {
    std::cout << "FAIL " << (issue.kind == IssueKind::structure ? "structure" : "validation") << ": "
              << issue.message << "\n";
    ok = false;
  }
  json report;
  report["graph"] = opt.graph;
  report["issues"] = json::array();
  for (const auto& issue : issues) report["issues"].push_back(issue.message);
  if (issues.empty()) {
    std::cout << "PASS graph invariants (" << parts.vertices.size() << " vertices, " << parts.edges.size()
              << " edges, " << parts.leads.size() << " leads)\n";
    const GraphSpec g(parts);
    const auto sg = build_bond_scattering(g);
    const double defect = g.is_closed() ? unitarity_defect(sg.matrix) : -min_eigenvalue_of_loss(sg.matrix);
    const bool bond_ok = defect < 1e-12;
    std::cout << (bond_ok ? "PASS" : "FAIL") << " bond scattering matrix is "
              << (g.is_closed() ? "unitary" : "sub-unitary") << " (" << defect << ")\n";
    ok = ok && bond_ok;
    report["bond_matrix_defect"] = defect;
    if (opt.golden || parts.name == "gamma") {
      const CMatrix ref = gamma_reference_matrix();
      double dev = std::numeric_limits<double>::infinity();
      if (sg.matrix.rows() == ref.rows() && sg.matrix.cols() == ref.cols())
        dev = (sg.matrix - ref).cwiseAbs().maxCoeff();
      const bool golden_ok = dev < 1e-12;
      std::cout << (golden_ok ? "PASS" : "FAIL") << " bond scattering matrix matches the reference table (max |diff| = "
                << dev << ")\n";
      for (const auto& e : gamma_reference_errata())
        std::cout << "note: reference entry (" << e.row << ", " << e.col << ") corrected from " << e.tabulated
                  << " to " << e.corrected << "\n";
      report["golden_deviation"] = dev;
      ok = ok && golden_ok;
    }
  }
  report["pass"] = ok;
  if (!opt.out.empty()) {
    run.add_graph(opt.graph);
    run.open({"validate.json"});
    run.document("validate.json", report);
    run.finish();
  }
  std::cout << (ok ? "PASS" : "FAIL") << " " << opt.graph << "\n";
  return ok ? 0 : kExitValidation;
}

// ---- spectrum ----

int cmd_spectrum(const Options& opt, Run& run) {
  const GraphSpec g = load_graph(opt.graph);
  const Band band = parse_band(opt.band);
  const SolverConfig cfg = solver_config(opt);
  run.add_graph(opt.graph);
  run.add_config("band", opt.band);
  add_solver_config(run, cfg);
  run.open({run.table_name("spectrum"), run.table_name("doublets"), "summary.json"});

  Realization r;
  r.spectrum = find_spectrum(g, band, cfg, 0);
  r.doublets = pair_doublets(r.spectrum, cfg);
  run.diagnose_all(r.spectrum.diagnostics);
  const std::vector<Realization> rs{r};
  run.table(spectrum_table(rs, false));
  run.table(doublet_table(rs, false));

  const int degeneracy = g.is_closed() ? 1 : 2;
  json s;
  s["resonances"] = r.spectrum.resonances.size();
  s["solver"] = r.spectrum.solver == SolverKind::eigenphase ? "eigenphase" : "complex_root";
  s["doublets"] = r.doublets.doublets.size();
  s["unpaired"] = r.doublets.unpaired.size();
  s["mean_splitting_hz"] = r.doublets.mean_splitting_hz;
  s["weyl_count"] = weyl_count(g.total_optical_length(), band, degeneracy);
  s["unconverged_seeds"] = r.spectrum.unconverged_seeds.size();
  run.document("summary.json", s);
  run.finish();
  std::cout << r.spectrum.resonances.size() << " resonances, " << r.doublets.doublets.size() << " doublets\n";
  return 0;
}

// ---- ensemble ----

int cmd_ensemble(const Options& opt, Run& run) {
  const GraphSpec g = load_graph(opt.graph);
  const Band band = parse_band(opt.band);
  const SolverConfig cfg = solver_config(opt);
  run.add_graph(opt.graph);
  run.add_config("band", opt.band);
  add_solver_config(run, cfg);
  const auto setup = make_ensemble(run, g, opt, opt.n.value_or(defaults::kSpectrumRealizations));
  run.open({run.table_name("realizations"), run.table_name("spectrum"), run.table_name("doublets")});

  const auto rs = solve_ensemble(setup, band, cfg);
  Table real{"realizations",
             {"realization_id", "shift_m", "length_a_m", "length_b_m", "resonances", "doublets", "unpaired"},
             {}};
  for (const auto& r : rs) {
    run.diagnose_all(r.spectrum.diagnostics, "realization " + std::to_string(r.id) + ": ");
    const auto& edges = setup.graphs[static_cast<std::size_t>(r.id)].edges();
    real.rows.push_back({static_cast<double>(r.id), r.shift_m, edges[setup.edge_a].optical_length_m,
                         edges[setup.edge_b].optical_length_m, static_cast<double>(r.spectrum.resonances.size()),
                         static_cast<double>(r.doublets.doublets.size()),
                         static_cast<double>(r.doublets.unpaired.size())});
  }
  run.table(real);
  run.table(spectrum_table(rs, true));
  run.table(doublet_table(rs, true));
  run.finish();
  std::size_t total = 0;
  for (const auto& r : rs) total += r.spectrum.resonances.size();
  std::cout << rs.size() << " realizations, " << total << " resonances\n";
  return 0;
}

// ---- stats ----

/// Reads a spectrum table written by `spectrum` or `ensemble` (CSV or JSON).
std::vector<SpectrumResult> read_spectra(const std::string& path, Band band) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path);
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  if (fs::path(path).extension() == ".json") {
    json doc;
    try {
      doc = json::parse(in);
      columns = doc.at("columns").get<std::vector<std::string>>();
      rows = doc.at("rows").get<std::vector<std::vector<double>>>();
    } catch (const json::exception& e) {
      throw ParseError(path + ": " + e.what());
    }
  } else {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      if (columns.empty()) {
        columns = cells;
        continue;
      }
      if (cells.size() != columns.size())
        throw ParseError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(columns.size()) +
                         " fields");
      std::vector<double> row;
      for (const auto& c : cells) {
        double v = 0.0;
        const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
        if (res.ec != std::errc() || res.ptr != c.data() + c.size())
          throw ParseError(path + ":" + std::to_string(line_no) + ": bad number '" + c + "'");
        row.push_back(v);
      }
      rows.push_back(std::move(row));
    }
  }
  auto col = [&](const std::string& name) -> std::optional<std::size_t> {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) return std::nullopt;
    return static_cast<std::size_t>(it - columns.begin());
  };
  const auto c_freq = col("frequency_hz");
  if (!c_freq) throw ParseError(path + ": no frequency_hz column");
  const auto c_id = col("realization_id");
  const auto c_width = col("width_hz");
  std::map<int, SpectrumResult> by_id;
  for (const auto& row : rows) {
    const int id = c_id ? static_cast<int>(row[*c_id]) : 0;
    auto& s = by_id[id];
    s.realization_id = id;
    s.band = band;
    s.resonances.push_back({row[*c_freq], c_width ? row[*c_width] : 0.0});
  }
  std::vector<SpectrumResult> out;
  for (auto& [id, s] : by_id) {
    std::sort(s.resonances.begin(), s.resonances.end(),
              [](const Resonance& a, const Resonance& b) { return a.frequency_hz < b.frequency_hz; });
    out.push_back(std::move(s));
  }
  if (out.empty()) throw DataError(path + " contains no resonances");
  return out;
}

Table nnsd_table(const std::string& name, const Histogram& h, double phi) {
  Table t{name, {"s_lo", "s_hi", "density", "poisson", "goe", "gue", "gue_missing"}, {}};
  for (std::size_t i = 0; i + 1 < h.edges.size(); ++i) {
    const double s = h.center(i);
    t.rows.push_back({h.edges[i], h.edges[i + 1], h.density[i], spacing_density(s, RmtEnsemble::poisson),
                      spacing_density(s, RmtEnsemble::goe), spacing_density(s, RmtEnsemble::gue),
                      missing_nnsd(s, phi)});
  }
  return t;
}

Table delta3_table(const std::string& name, const Delta3Result& d, double phi) {
  Table t{name, {"l", "delta3", "windows", "poisson", "goe", "gue", "gue_missing"}, {}};
  for (const auto& p : d.points)
    t.rows.push_back({p.l, p.value, static_cast<double>(p.windows), delta3_theory(p.l, RmtEnsemble::poisson),
                      delta3_theory(p.l, RmtEnsemble::goe), delta3_theory(p.l, RmtEnsemble::gue),
                      delta3_missing(p.l, phi, RmtEnsemble::gue)});
  return t;
}

json distances(const Histogram& h) {
  json j;
  for (const auto e : {RmtEnsemble::poisson, RmtEnsemble::goe, RmtEnsemble::gue})
    j[std::string(to_string(e))] = l1_distance(h, [e](double s) { return spacing_density(s, e); });
  return j;
}

int cmd_stats(const Options& opt, Run& run) {
  const GraphSpec g = load_graph(opt.graph);
  const Band band = parse_band(opt.band);
  const SolverConfig cfg = solver_config(opt);
  run.add_graph(opt.graph);
  run.add_config("band", opt.band);
  add_solver_config(run, cfg);
  std::optional<EnsembleSetup> setup;
  if (!opt.spectra.empty())
    run.add_config("spectra_hash", hash_file(opt.spectra));
  else
    setup = make_ensemble(run, g, opt, opt.n.value_or(defaults::kSpectrumRealizations));
  run.open({run.table_name("nnsd_full"), run.table_name("nnsd_singlets"), run.table_name("delta3_full"),
            run.table_name("delta3_singlets"), run.table_name("doublet_distribution"), "stats.json"});
  std::vector<SpectrumResult> spectra;
  if (setup) {
    for (auto& r : solve_ensemble(*setup, band, cfg)) {
      run.diagnose_all(r.spectrum.diagnostics, "realization " + std::to_string(r.id) + ": ");
      spectra.push_back(std::move(r.spectrum));
    }
  } else {
    spectra = read_spectra(opt.spectra, band);
  }

  const double l_tot = g.total_optical_length();
  const int degeneracy = g.is_closed() ? 1 : 2;
  std::vector<UnfoldedSpectrum> full, singlets;
  std::vector<DoubletSet> sets;
  std::size_t full_count = 0, singlet_count = 0;
  for (const auto& s : spectra) {
    full.push_back(unfold(s.frequencies(), l_tot, degeneracy, "full"));
    const auto merged = merge_unresolved(s, cfg.resolution_hz);
    singlets.push_back(unfold(merged.frequencies(), l_tot, 1, "singlets"));
    sets.push_back(pair_doublets(s, cfg));
    full_count += s.resonances.size();
    singlet_count += merged.resonances.size();
  }
  const double n_real = static_cast<double>(spectra.size());
  const double phi_full = observed_fraction(full_count, n_real * weyl_count(l_tot, band, degeneracy));
  const double phi_singlets = observed_fraction(singlet_count, n_real * weyl_count(l_tot, band, 1));

  std::vector<double> ls;
  for (int i = 1; i <= 40; ++i) ls.push_back(0.5 * i);
  const auto h_full = nnsd(std::span<const UnfoldedSpectrum>(full));
  const auto h_single = nnsd(std::span<const UnfoldedSpectrum>(singlets));
  const auto d_full = delta3_empirical(std::span<const UnfoldedSpectrum>(full), ls);
  const auto d_single = delta3_empirical(std::span<const UnfoldedSpectrum>(singlets), ls);
  run.diagnose_all(d_full.diagnostics, "delta3 full: ");
  run.diagnose_all(d_single.diagnostics, "delta3 singlets: ");
  run.table(nnsd_table("nnsd_full", h_full, phi_full));
  run.table(nnsd_table("nnsd_singlets", h_single, phi_singlets));
  run.table(delta3_table("delta3_full", d_full, phi_full));
  run.table(delta3_table("delta3_singlets", d_single, phi_singlets));

  const auto pooled = pool_doublets(sets);
  json doc;
  doc["realizations"] = spectra.size();
  doc["resonances"] = full_count;
  doc["singlets"] = singlet_count;
  doc["observed_fraction"] = {{"full", phi_full}, {"singlets", phi_singlets}};
  doc["l1_distance"] = {{"full", distances(h_full)}, {"singlets", distances(h_single)}};
  doc["doublets"] = pooled.doublets.size();
  Table dt{"doublet_distribution", {"delta_lo", "delta_hi", "density", "exponential"}, {}};
  if (!pooled.doublets.empty()) {
    const auto dd = doublet_distribution(pooled);
    run.diagnose_all(dd.diagnostics, "doublets: ");
    for (std::size_t i = 0; i + 1 < dd.histogram.edges.size(); ++i)
      dt.rows.push_back({dd.histogram.edges[i], dd.histogram.edges[i + 1], dd.histogram.density[i],
                         std::exp(-dd.histogram.center(i))});
    doc["mean_splitting_hz"] = pooled.mean_splitting_hz;
    doc["ks_exponential"] = dd.ks_exponential;
  } else {
    run.diagnose("doublets: none found, distribution left empty");
  }
  run.table(dt);
  run.document("stats.json", doc);
  run.finish();
  std::cout << spectra.size() << " spectra, " << pooled.doublets.size() << " doublets\n";
  return 0;
}

// ---- scatter ----

Histogram fixed_histogram(const std::vector<double>& x, double lo, double hi, std::size_t bins) {
  Histogram h;
  const double w = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) h.edges.push_back(lo + w * static_cast<double>(i));
  std::vector<double> counts(bins, 0.0);
  for (const double v : x) {
    if (!(v >= lo && v < hi)) continue;
    counts[std::min(bins - 1, static_cast<std::size_t>((v - lo) / w))] += 1.0;
  }
  h.samples = x.size();
  for (const double c : counts) h.density.push_back(x.empty() ? 0.0 : c / (static_cast<double>(x.size()) * w));
  return h;
}

double bin_average(const std::function<double(double)>& f, double a, double b) {
  constexpr int n = 16;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += f(a + (b - a) * (i + 0.5) / n);
  return sum / n;
}

void append_scattering_tables(Table& refl, Table& ldos, json& bands_json, const ScatteringStats& st, int beta) {
  json band;
  band["lo_hz"] = st.band.lo_hz;
  band["hi_hz"] = st.band.hi_hz;
  band["gamma"] = st.gamma_fit;
  for (int p = 0; p < 2; ++p) {
    const auto& ps = st.port[p];
    band["ports"].push_back({{"port", p + 1},
                             {"mean_r", ps.mean_r},
                             {"gamma", ps.gamma},
                             {"samples", ps.r_samples.size()},
                             {"invalid_v", ps.invalid_v}});
    const auto hr = fixed_histogram(ps.r_samples, 0.0, 1.0, 25);
    for (std::size_t i = 0; i + 1 < hr.edges.size(); ++i)
      refl.rows.push_back({st.band.lo_hz, st.band.hi_hz, static_cast<double>(p + 1), hr.edges[i], hr.edges[i + 1],
                           hr.density[i],
                           bin_average([&](double r) { return theory_p_r(r, ps.gamma, beta); }, hr.edges[i],
                                       hr.edges[i + 1])});
    const auto hv = fixed_histogram(ps.v_samples, 0.0, 3.0, 30);
    for (std::size_t i = 0; i + 1 < hv.edges.size(); ++i)
      ldos.rows.push_back({st.band.lo_hz, st.band.hi_hz, static_cast<double>(p + 1), hv.edges[i], hv.edges[i + 1],
                           hv.density[i],
                           beta == 2 ? bin_average([&](double v) { return theory_p_v(v, ps.gamma); }, hv.edges[i],
                                                   hv.edges[i + 1])
                                     : std::nan("")});
  }
  bands_json.push_back(band);
}

Table s_table(const std::vector<TwoPortS>& ts) {
  Table t{"s_matrix",
          {"realization_id", "frequency_hz", "s11_re", "s11_im", "s12_re", "s12_im", "s21_re", "s21_im", "s22_re",
           "s22_im"},
          {}};
  for (const auto& r : ts)
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
      const auto& m = r.values[i];
      t.rows.push_back({static_cast<double>(r.realization_id), r.grid[i], m(0, 0).real(), m(0, 0).imag(),
                        m(0, 1).real(), m(0, 1).imag(), m(1, 0).real(), m(1, 0).imag(), m(1, 1).real(),
                        m(1, 1).imag()});
    }
  return t;
}

int cmd_scatter(const Options& opt, Run& run) {
  const GraphSpec g = load_graph(opt.graph);
  const Band band = parse_band(opt.band);
  const auto bands = parse_bands(opt.bands);
  const double step = opt.grid_step > 0.0 ? opt.grid_step : defaults::kScatterGridStepHz;
  if (!(opt.absorption >= 0.0)) throw ParameterError("--absorption must be non-negative");
  if (opt.beta != 1 && opt.beta != 2) throw ParameterError("--beta must be 1 or 2");
  run.add_graph(opt.graph);
  run.add_config("band", opt.band);
  run.add_config("bands", opt.bands);
  run.add_config("grid_step_hz", step);
  run.add_config("absorption_per_m", opt.absorption);
  run.add_config("window_hz", opt.window);
  run.add_config("ws_n", std::to_string(opt.ws_n));
  run.add_config("beta", std::to_string(opt.beta));
  run.add_config("dump_s", opt.dump_s ? "1" : "0");
  const auto setup = make_ensemble(run, g, opt, opt.n.value_or(defaults::kScatterRealizations));
  std::vector<std::string> planned{run.table_name("enhancement"), run.table_name("reflection"),
                                   run.table_name("ldos"), "scatter.json"};
  if (opt.dump_s) planned.push_back(run.table_name("s_matrix"));
  run.open(planned);

  const auto grid = frequency_grid(band, step);
  auto sweeps = parallel_map<TwoPortS>(setup.graphs.size(), [&](std::size_t i) {
    return sweep_two_port(setup.graphs[i], grid, opt.absorption, static_cast<int>(i));
  });
  for (const auto& s : sweeps) run.diagnose_all(s.diagnostics, "realization " + std::to_string(s.realization_id) + ": ");
  if (opt.dump_s) run.table(s_table(sweeps));

  const std::size_t ws_n = std::min(opt.ws_n, sweeps.size());
  const std::vector<TwoPortS> ws_set(sweeps.begin(), sweeps.begin() + static_cast<std::ptrdiff_t>(ws_n));
  const auto windows = enhancement_factor(ws_set, band, opt.window);
  const auto limits = enhancement_limits(opt.beta);
  Table enh{"enhancement", {"lo_hz", "hi_hz", "center_hz", "w_s", "strong_limit", "weak_limit"}, {}};
  json ws_json = json::array();
  for (const auto& w : windows) {
    enh.rows.push_back({w.lo_hz, w.hi_hz, w.center_hz(), w.w_s.value_or(std::nan("")), limits.strong_absorption,
                        limits.weak_absorption});
    ws_json.push_back({{"lo_hz", w.lo_hz}, {"hi_hz", w.hi_hz}, {"w_s", w.w_s ? json(*w.w_s) : json(nullptr)}});
    if (!w.w_s) run.diagnose("window at " + format_double(w.center_hz()) + " Hz: var(S12) vanishes");
  }
  run.table(enh);

  const auto reduced = remove_direct(sweeps);
  Table refl{"reflection", {"band_lo_hz", "band_hi_hz", "port", "r_lo", "r_hi", "density", "theory"}, {}};
  Table ldos{"ldos", {"band_lo_hz", "band_hi_hz", "port", "v_lo", "v_hi", "density", "theory"}, {}};
  json bands_json = json::array();
  for (const auto& b : bands) append_scattering_tables(refl, ldos, bands_json, scattering_stats(reduced, b, opt.beta), opt.beta);
  const auto overall = scattering_stats(reduced, band, opt.beta);
  run.table(refl);
  run.table(ldos);

  json doc;
  doc["realizations"] = sweeps.size();
  doc["ws_realizations"] = ws_n;
  doc["grid_points"] = grid.size();
  doc["gamma"] = overall.gamma_fit;
  doc["bands"] = bands_json;
  doc["enhancement"] = ws_json;
  run.document("scatter.json", doc);
  run.finish();
  std::cout << "gamma " << overall.gamma_fit << "\n";
  for (const auto& w : windows)
    std::cout << "W_S [" << w.lo_hz << ", " << w.hi_hz << "] " << (w.w_s ? format_double(*w.w_s) : "n/a") << "\n";
  return 0;
}

// ---- fit-gamma ----

std::vector<TwoPortS> read_s_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path);
  std::string line;
  std::vector<std::string> columns;
  std::map<int, TwoPortS> by_id;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (columns.empty()) {
      columns = cells;
      if (columns.size() != 10 || columns[0] != "realization_id" || columns[1] != "frequency_hz")
        throw ParseError(path + ": expected the s_matrix column layout");
      continue;
    }
    if (cells.size() != 10) throw ParseError(path + ":" + std::to_string(line_no) + ": expected 10 fields");
    double v[10];
    for (int i = 0; i < 10; ++i) {
      const auto& c = cells[static_cast<std::size_t>(i)];
      const auto res = std::from_chars(c.data(), c.data() + c.size(), v[i]);
      if (res.ec != std::errc() || res.ptr != c.data() + c.size())
        throw ParseError(path + ":" + std::to_string(line_no) + ": bad number '" + c + "'");
    }
    auto& t = by_id[static_cast<int>(v[0])];
    t.realization_id = static_cast<int>(v[0]);
    Matrix2c m;
    m << cplx(v[2], v[3]), cplx(v[4], v[5]), cplx(v[6], v[7]), cplx(v[8], v[9]);
    t.grid.push_back(v[1]);
    t.values.push_back(m);
  }
  std::vector<TwoPortS> out;
  for (auto& [id, t] : by_id) out.push_back(std::move(t));
  if (out.empty()) throw DataError(path + " contains no samples");
  for (const auto& t : out)
    if (t.grid != out.front().grid) throw DataError(path + ": realizations use different frequency grids");
  return out;
}

int cmd_fit_gamma(const Options& opt, Run& run) {
  if (opt.beta != 1 && opt.beta != 2) throw ParameterError("--beta must be 1 or 2");
  run.add_config("beta", std::to_string(opt.beta));
  json doc;
  double gamma = 0.0;
  if (opt.mean_r) {
    if (!opt.s_file.empty()) throw ParameterError("pass either --mean-r or --s, not both");
    run.add_config("mean_r", *opt.mean_r);
    run.open({"fit_gamma.json"});
    gamma = fit_gamma(*opt.mean_r, opt.beta);
    doc["mean_r"] = *opt.mean_r;
  } else {
    if (opt.s_file.empty()) throw ParameterError("fit-gamma needs --mean-r or --s");
    run.add_config("s_hash", hash_file(opt.s_file));
    run.add_config("keep_direct", opt.keep_direct ? "1" : "0");
    run.open({"fit_gamma.json"});
    auto ts = read_s_table(opt.s_file);
    if (!opt.keep_direct) ts = remove_direct(ts);
    const Band band{ts.front().grid.front(), ts.front().grid.back()};
    const auto st = scattering_stats(ts, band, opt.beta);
    gamma = st.gamma_fit;
    doc["realizations"] = ts.size();
    doc["ports"] = json::array();
    for (int p = 0; p < 2; ++p)
      doc["ports"].push_back({{"port", p + 1}, {"mean_r", st.port[p].mean_r}, {"gamma", st.port[p].gamma}});
  }
  doc["gamma"] = gamma;
  run.document("fit_gamma.json", doc);
  run.finish();
  std::cout << "gamma " << format_double(gamma) << "\n";
  return 0;
}

void add_common(CLI::App* sub, Options& opt, bool ensemble, bool needs_graph = true) {
  auto* g = sub->add_option("--graph", opt.graph, "graph JSON file");
  if (needs_graph) g->required();
  sub->add_option("--band", opt.band, "frequency band LO:HI in Hz (k/M/G suffixes allowed)");
  sub->add_option("--grid-step", opt.grid_step, "frequency grid step in Hz");
  sub->add_option("--out", opt.out, "output directory");
  sub->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_flag("--force", opt.force, "overwrite existing outputs");
  if (ensemble) {
    sub->add_option("--n", opt.n, "number of realizations");
    sub->add_option("--seed", opt.seed, "ensemble seed");
    sub->add_option("--delta-max", opt.delta_max, "largest length transfer between the shifter edges (m)");
    sub->add_option("--edges", opt.edges, "ids of the two edges exchanging length (default: phase shifters)");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unigraph: quantum graph spectra and scattering"};
  app.require_subcommand(1);
  app.set_version_flag("--version", UNIGRAPH_VERSION);
  Options opt;
  std::string validate_out;

  auto* validate = app.add_subcommand("validate", "check graph invariants and the reference bond matrix");
  validate->add_option("--graph", opt.graph, "graph JSON file")->required();
  validate->add_flag("--golden", opt.golden, "compare with the reference bond matrix regardless of graph name");
  validate->add_option("--out", validate_out, "directory for validate.json");
  validate->add_flag("--force", opt.force, "overwrite existing outputs");

  auto* spectrum = app.add_subcommand("spectrum", "resonances of one graph");
  add_common(spectrum, opt, false);

  auto* ensemble = app.add_subcommand("ensemble", "resonances of a fixed-length phase-shifter ensemble");
  add_common(ensemble, opt, true);

  auto* stats = app.add_subcommand("stats", "spacing, rigidity and doublet statistics");
  add_common(stats, opt, true);
  stats->add_option("--spectra", opt.spectra, "previously written spectrum table instead of a fresh ensemble");

  auto* scatter = app.add_subcommand("scatter", "two-port scattering ensemble statistics");
  add_common(scatter, opt, true);
  scatter->add_option("--absorption", opt.absorption, "uniform absorption (1/m)");
  scatter->add_option("--ws-n", opt.ws_n, "realizations used for the enhancement factor");
  scatter->add_option("--window", opt.window, "enhancement window width (Hz)");
  scatter->add_option("--bands", opt.bands, "comma-separated bands for P(R) and P(v)");
  scatter->add_option("--beta", opt.beta, "symmetry index used by the theory curves");
  scatter->add_flag("--dump-s", opt.dump_s, "also write the raw S matrices");

  auto* fit = app.add_subcommand("fit-gamma", "absorption strength from <R>");
  fit->add_option("--mean-r", opt.mean_r, "mean reflection coefficient");
  fit->add_option("--s", opt.s_file, "s_matrix CSV written by scatter --dump-s");
  fit->add_flag("--keep-direct", opt.keep_direct, "skip direct-process removal");
  fit->add_option("--beta", opt.beta, "symmetry index");
  fit->add_option("--out", opt.out, "output directory");
  fit->add_flag("--force", opt.force, "overwrite existing outputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  std::unique_ptr<Run> run;
  try {
    if (validate->parsed()) {
      opt.out = validate_out;
      return cmd_validate(opt);
    }
    if (spectrum->parsed()) return cmd_spectrum(opt, *(run = std::make_unique<Run>("spectrum", opt)));
    if (ensemble->parsed()) return cmd_ensemble(opt, *(run = std::make_unique<Run>("ensemble", opt)));
    if (stats->parsed()) return cmd_stats(opt, *(run = std::make_unique<Run>("stats", opt)));
    if (scatter->parsed()) return cmd_scatter(opt, *(run = std::make_unique<Run>("scatter", opt)));
    if (fit->parsed()) return cmd_fit_gamma(opt, *(run = std::make_unique<Run>("fit-gamma", opt)));
  } catch (const NumericError& e) {
    if (run) run->fail(e.what());
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DataError& e) {
    if (run) run->fail(e.what());
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DomainError& e) {
    if (run) run->fail(e.what());
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}
