#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "unigraph/absorption_theory.hpp"
#include "unigraph/bond_scattering.hpp"
#include "unigraph/defaults.hpp"
#include "unigraph/doublets.hpp"
#include "unigraph/ensemble.hpp"
#include "unigraph/errors.hpp"
#include "unigraph/graph_io.hpp"
#include "unigraph/reference.hpp"
#include "unigraph/scattering.hpp"
#include "unigraph/secular.hpp"
#include "unigraph/spectral_stats.hpp"

namespace py = pybind11;
using namespace unigraph;

namespace {

Band to_band(std::pair<double, double> b) { return {b.first, b.second}; }

RmtEnsemble ensemble_arg(const std::string& name) { return rmt_ensemble_from_string(name); }

std::vector<std::string> issues_of(const std::filesystem::path& path) {
  std::vector<std::string> out;
  for (const auto& i : check_graph(read_graph_parts(path))) out.push_back(i.message);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Quantum graph spectra, doublets, spectral statistics and scattering";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<StructureError>(m, "StructureError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
  py::register_exception<ContractError>(m, "ContractError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  m.attr("SPEED_OF_LIGHT") = kSpeedOfLight;
  m.attr("DEFAULT_DELTA_MAX") = defaults::kDeltaMax;
  m.attr("DEFAULT_ABSORPTION") = defaults::kAbsorption;

  py::class_<GraphSpec>(m, "Graph")
      .def_property_readonly("name", &GraphSpec::name)
      .def_property_readonly("edge_count", &GraphSpec::edge_count)
      .def_property_readonly("is_closed", &GraphSpec::is_closed)
      .def_property_readonly("total_optical_length", &GraphSpec::total_optical_length)
      .def_property_readonly("edge_lengths", &GraphSpec::edge_lengths)
      .def_property_readonly("edge_ids",
                             [](const GraphSpec& g) {
                               std::vector<std::string> ids;
                               for (const auto& e : g.edges()) ids.push_back(e.id);
                               return ids;
                             })
      .def_property_readonly("phase_shifter_edges", &GraphSpec::phase_shifter_edges)
      .def("with_edge_lengths",
           [](const GraphSpec& g, const std::vector<double>& l) { return g.with_edge_lengths(l); })
      .def("to_json", [](const GraphSpec& g) { return graph_to_json(g.parts()); })
      .def("__repr__", [](const GraphSpec& g) {
        return "<Graph " + g.name() + ": " + std::to_string(g.edge_count()) + " edges, " +
               std::to_string(g.leads().size()) + " leads>";
      });

  m.def("load_graph", &load_graph, py::arg("path"), "Parse and validate a graph JSON file.");
  m.def("parse_graph", [](const std::string& text) { return GraphSpec(parse_graph_parts(text)); }, py::arg("text"));
  m.def("graph_issues", &issues_of, py::arg("path"), "Every violated invariant of a graph file (empty = valid).");

  m.def("bond_scattering_matrix", [](const GraphSpec& g) { return build_bond_scattering(g).matrix; },
        py::arg("graph"));
  m.def("reference_bond_matrix", &gamma_reference_matrix);
  m.def("secular_value", &secular_value, py::arg("graph"), py::arg("k"));

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("grid_step_hz", &SolverConfig::grid_step_hz)
      .def_readwrite("refine_tolerance_hz", &SolverConfig::refine_tolerance_hz)
      .def_readwrite("pair_threshold_hz", &SolverConfig::pair_threshold_hz)
      .def_readwrite("resolution_hz", &SolverConfig::resolution_hz)
      .def_readwrite("max_newton_iterations", &SolverConfig::max_newton_iterations);

  py::class_<SpectrumResult>(m, "Spectrum")
      .def_property_readonly("frequencies", &SpectrumResult::frequencies)
      .def_property_readonly("widths",
                             [](const SpectrumResult& s) {
                               std::vector<double> w;
                               for (const auto& r : s.resonances) w.push_back(r.width_hz);
                               return w;
                             })
      .def_property_readonly("band", [](const SpectrumResult& s) { return std::pair(s.band.lo_hz, s.band.hi_hz); })
      .def_property_readonly(
          "solver", [](const SpectrumResult& s) { return s.solver == SolverKind::eigenphase ? "eigenphase" : "complex_root"; })
      .def_readonly("realization_id", &SpectrumResult::realization_id)
      .def_readonly("diagnostics", &SpectrumResult::diagnostics)
      .def("__len__", [](const SpectrumResult& s) { return s.resonances.size(); });

  m.def("find_spectrum",
        [](const GraphSpec& g, std::pair<double, double> band, const SolverConfig& cfg) {
          py::gil_scoped_release release;
          return find_spectrum(g, to_band(band), cfg);
        },
        py::arg("graph"), py::arg("band"), py::arg("config") = SolverConfig{});

  py::class_<DoubletSet>(m, "Doublets")
      .def_property_readonly("splittings",
                             [](const DoubletSet& d) {
                               std::vector<double> s;
                               for (const auto& x : d.doublets) s.push_back(x.splitting_hz);
                               return s;
                             })
      .def_property_readonly("lower",
                             [](const DoubletSet& d) {
                               std::vector<double> s;
                               for (const auto& x : d.doublets) s.push_back(x.nu_low_hz);
                               return s;
                             })
      .def_readonly("unpaired", &DoubletSet::unpaired)
      .def_readonly("flagged", &DoubletSet::flagged)
      .def_readonly("mean_splitting_hz", &DoubletSet::mean_splitting_hz)
      .def("normalized_splittings", &DoubletSet::normalized_splittings)
      .def("__len__", [](const DoubletSet& d) { return d.doublets.size(); });

  m.def("pair_doublets", &pair_doublets, py::arg("spectrum"), py::arg("config") = SolverConfig{});
  m.def("pool_doublets", &pool_doublets, py::arg("sets"));
  m.def("merge_unresolved", &merge_unresolved, py::arg("spectrum"), py::arg("resolution_hz"));

  m.def("generate_ensemble",
        [](const GraphSpec& g, std::size_t count, double delta_max, std::uint64_t seed) {
          const auto ps = g.phase_shifter_edges();
          if (ps.size() != 2) throw ParameterError("graph needs exactly two phase-shifter edges");
          return generate_ensemble(g, ps[0], ps[1], count, delta_max, seed);
        },
        py::arg("graph"), py::arg("count"), py::arg("delta_max") = defaults::kDeltaMax,
        py::arg("seed") = defaults::kSeed);
  m.def("ensemble_shifts", &ensemble_shifts, py::arg("count"), py::arg("delta_max"), py::arg("seed"));

  m.def("s_matrix",
        [](const GraphSpec& g, double nu, double a) { return ScatteringSolver(g).s_matrix(nu, a); },
        py::arg("graph"), py::arg("nu_hz"), py::arg("absorption") = 0.0);
  m.def("enhancement_factor",
        [](const std::vector<GraphSpec>& graphs, std::pair<double, double> band, double step, double window,
           double a) {
          std::vector<TwoPortS> sweeps;
          {
            py::gil_scoped_release release;
            const auto grid = frequency_grid(to_band(band), step);
            for (std::size_t i = 0; i < graphs.size(); ++i)
              sweeps.push_back(sweep_two_port(graphs[i], grid, a, static_cast<int>(i)));
          }
          std::vector<std::tuple<double, double, std::optional<double>>> out;
          for (const auto& w : enhancement_factor(sweeps, to_band(band), window)) out.emplace_back(w.lo_hz, w.hi_hz, w.w_s);
          return out;
        },
        py::arg("graphs"), py::arg("band"), py::arg("step_hz"), py::arg("window_hz"), py::arg("absorption"));

  // spectral statistics
  m.def("wigner_surmise", &wigner_surmise, py::arg("s"), py::arg("beta"));
  m.def("spacing_density", [](double s, const std::string& e) { return spacing_density(s, ensemble_arg(e)); },
        py::arg("s"), py::arg("ensemble"));
  m.def("norm_constants", [](int n, int mu) {
    const auto c = norm_constants(n, mu);
    return std::pair(c.gamma, c.kappa);
  });
  m.def("missing_nnsd", &missing_nnsd, py::arg("s"), py::arg("phi"));
  m.def("delta3_theory", [](double l, const std::string& e) { return delta3_theory(l, ensemble_arg(e)); },
        py::arg("l"), py::arg("ensemble"));
  m.def("delta3_missing",
        [](double l, double phi, const std::string& e) { return delta3_missing(l, phi, ensemble_arg(e)); },
        py::arg("l"), py::arg("phi"), py::arg("ensemble"));
  m.def("delta3_empirical",
        [](const std::vector<double>& levels, const std::vector<double>& ls) {
          UnfoldedSpectrum u{levels, "levels", 1};
          std::vector<std::pair<double, double>> out;
          for (const auto& p : delta3_empirical(u, ls).points) out.emplace_back(p.l, p.value);
          return out;
        },
        py::arg("levels"), py::arg("l_values"), "Delta_3 of already unfolded levels.");
  m.def("unfold",
        [](const std::vector<double>& f, double l_tot, int factor) { return unfold(f, l_tot, factor).epsilons; },
        py::arg("frequencies"), py::arg("total_length"), py::arg("factor") = 1);
  m.def("ks_exponential", [](const DoubletSet& d) { return doublet_distribution(d).ks_exponential; });

  // absorption theory
  m.def("theory_p_r", &theory_p_r, py::arg("r"), py::arg("gamma"), py::arg("beta") = 2);
  m.def("theory_p_v", &theory_p_v, py::arg("v"), py::arg("gamma"));
  m.def("mean_reflection", &mean_reflection, py::arg("gamma"), py::arg("beta") = 2);
  m.def("fit_gamma", &fit_gamma, py::arg("mean_r"), py::arg("beta") = 2);
  m.def("wigner_v", [](cplx s) { return wigner_v(s.real(), s.imag()); }, py::arg("s"));
}
