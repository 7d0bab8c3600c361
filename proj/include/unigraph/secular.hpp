#pragma once

#include <string>
#include <vector>

#include "unigraph/bond_scattering.hpp"
#include "unigraph/graph.hpp"
#include "unigraph/types.hpp"

namespace unigraph {

struct SolverConfig {
  double grid_step_hz = 1e5;
  double refine_tolerance_hz = 1.0;
  double pair_threshold_hz = 10e6;
  double resolution_hz = 15e6;
  int max_newton_iterations = 60;

  void validate() const;
};

enum class SolverKind { eigenphase, complex_root };

struct Resonance {
  double frequency_hz = 0.0;
  double width_hz = 0.0;
};

/// Resonances of one realization in increasing frequency. The eigenphase solver reports
/// every crossing, so exactly degenerate levels appear as repeated frequencies.
struct SpectrumResult {
  std::vector<Resonance> resonances;
  Band band;
  SolverKind solver = SolverKind::eigenphase;
  int realization_id = 0;
  std::vector<std::string> diagnostics;
  std::vector<cplx> unconverged_seeds;  // wavenumbers (1/m)

  std::vector<double> frequencies() const;
};

/// xi(k) = det(I - L(k) S_G) with the graph's S_G and bond lengths cached.
class SecularFunction {
 public:
  explicit SecularFunction(const GraphSpec& graph);

  cplx value(cplx k) const;
  /// L(k) S_G
  CMatrix propagator(cplx k) const;
  /// Real-valued eigenphase staircase: differences between two k are the number of
  /// eigenphase crossings of 0 mod 2pi in between (exact integers up to rounding).
  double phase_count(double k) const;

  const BondScatteringMatrix& bond_matrix() const { return bond_; }
  const RVector& lengths() const { return lengths_; }
  double total_bond_length() const { return lengths_.sum(); }

 private:
  BondScatteringMatrix bond_;
  RVector lengths_;
};

cplx secular_value(const GraphSpec& graph, cplx k);

/// Closed graphs: eigenphase crossings of the unitary L(k) S_G, each bisected to
/// refine_tolerance. Throws ContractError if S_G is not unitary.
SpectrumResult find_spectrum_closed(const GraphSpec& graph, Band band, const SolverConfig& config,
                                    int realization_id = 0);

/// Open graphs: complex zeros of xi(k) seeded from the real-axis scan and refined by
/// Newton iteration; width = -2 Im(k) c / 2pi.
SpectrumResult find_spectrum_open(const GraphSpec& graph, Band band, const SolverConfig& config,
                                  int realization_id = 0);

/// Dispatches on graph.is_closed().
SpectrumResult find_spectrum(const GraphSpec& graph, Band band, const SolverConfig& config,
                             int realization_id = 0);

/// Weyl estimate degeneracy * L_tot * (nu_max - nu_min) / c.
double weyl_count(double total_length_m, Band band, int degeneracy_factor);

}  // namespace unigraph
