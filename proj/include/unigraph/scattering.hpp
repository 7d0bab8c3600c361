#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "unigraph/bond_scattering.hpp"
#include "unigraph/graph.hpp"
#include "unigraph/types.hpp"

namespace unigraph {

using Matrix2c = Eigen::Matrix2cd;

/// Lead-space S matrix of an open graph:
///   S(nu) = S_ll + S_li L(k) (I - S_G L(k))^{-1} S_il,  k = 2 pi nu / c + i a.
class ScatteringSolver {
 public:
  explicit ScatteringSolver(const GraphSpec& graph);

  /// `regularized` is set when the resolvent was singular at nu and nu had to be nudged.
  CMatrix s_matrix(double nu_hz, double absorption_per_m, bool* regularized = nullptr) const;
  std::size_t lead_count() const { return static_cast<std::size_t>(coupling_.lead_lead.rows()); }

 private:
  BondScatteringMatrix bond_;
  LeadCoupling coupling_;
  RVector lengths_;
};

/// Two-port S(nu); requires exactly two leads.
Matrix2c two_port_s(const GraphSpec& graph, double nu_hz, double absorption_per_m);

struct TwoPortS {
  std::vector<double> grid;  // Hz
  std::vector<Matrix2c> values;
  double absorption = 0.0;  // 1/m amplitude attenuation
  int realization_id = 0;
  std::vector<std::string> diagnostics;
};

/// Uniform grid lo, lo + step, ... <= hi.
std::vector<double> frequency_grid(Band band, double step_hz);

TwoPortS sweep_two_port(const GraphSpec& graph, std::span<const double> grid, double absorption_per_m,
                        int realization_id = 0);

/// Pooled variance <|z|^2> - |<z>|^2.
double pooled_variance(std::span<const cplx> z);

struct EnhancementWindow {
  double lo_hz;
  double hi_hz;
  std::optional<double> w_s;  // empty when var(S12) vanishes

  double center_hz() const { return 0.5 * (lo_hz + hi_hz); }
};

/// W_S = sqrt(var S11 var S22) / var S12 over realizations and frequencies in each window;
/// windows tile the band starting at band.lo_hz.
std::vector<EnhancementWindow> enhancement_factor(const std::vector<TwoPortS>& ensemble, Band band,
                                                  double window_hz);

/// Maps each diagonal element through S' = (S - c)/(1 - conj(c) S), where c is the
/// ensemble centre at that frequency: the point that the Moebius map sends to the origin
/// so that <S'> = 0. The first iterate is the arithmetic mean; refinement stops when
/// |<S'>| < 1e-12. Off-diagonal elements are passed through unchanged.
std::vector<TwoPortS> remove_direct(const std::vector<TwoPortS>& ensemble);

struct PortStats {
  std::vector<double> r_samples;
  std::vector<double> v_samples;
  std::size_t invalid_v = 0;
  double mean_r = 0.0;
  double gamma = 0.0;
};

struct ScatteringStats {
  PortStats port[2];
  double gamma_fit = 0.0;  // average of the per-port values
  Band band;
};

/// R = |S'_ii|^2, v = Im K_ii and gamma fits over grid points inside `band`.
ScatteringStats scattering_stats(const std::vector<TwoPortS>& reduced, Band band, int beta = 2);

}  // namespace unigraph
