#include "unigraph/scattering.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "unigraph/absorption_theory.hpp"
#include "unigraph/errors.hpp"

namespace unigraph {

ScatteringSolver::ScatteringSolver(const GraphSpec& graph)
    : bond_(build_bond_scattering(graph)), coupling_(build_lead_coupling(graph)), lengths_(bond_lengths(graph)) {}

CMatrix ScatteringSolver::s_matrix(double nu, double absorption, bool* regularized) const {
  if (!(absorption >= 0.0)) throw ParameterError("absorption must be non-negative");
  if (regularized) *regularized = false;
  const auto n = bond_.matrix.rows();
  for (int attempt = 0; attempt < 8; ++attempt) {
    const cplx k(wavenumber(nu), absorption);
    const CVector phase = (cplx(0.0, 1.0) * k * lengths_.cast<cplx>().array()).exp().matrix();
    const CMatrix a = CMatrix::Identity(n, n) - bond_.matrix * phase.asDiagonal();
    const Eigen::PartialPivLU<CMatrix> lu(a);
    if (lu.rcond() > 64.0 * std::numeric_limits<double>::epsilon()) {
      const CMatrix inner = lu.solve(coupling_.internal_lead);
      return coupling_.lead_lead + coupling_.lead_internal * phase.asDiagonal() * inner;
    }
    // exactly on a bound state of the lossless graph
    if (regularized) *regularized = true;
    nu += std::max(1e-10 * std::abs(nu), 1e-3);
  }
  throw NumericError("resolvent singular at nu = " + std::to_string(nu) + " Hz");
}

Matrix2c two_port_s(const GraphSpec& graph, double nu, double absorption) {
  if (graph.leads().size() != 2) throw ContractError("two_port_s needs exactly two leads");
  return ScatteringSolver(graph).s_matrix(nu, absorption);
}

std::vector<double> frequency_grid(Band band, double step) {
  if (!(step > 0.0)) throw ParameterError("grid step must be positive");
  if (band.hi_hz < band.lo_hz) throw ParameterError("invalid band");
  const auto n = static_cast<std::size_t>(std::floor(band.width() / step * (1.0 + 1e-12))) + 1;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = band.lo_hz + step * static_cast<double>(i);
  return out;
}

TwoPortS sweep_two_port(const GraphSpec& graph, std::span<const double> grid, double absorption,
                        int realization_id) {
  if (graph.leads().size() != 2) throw ContractError("two-port sweep needs exactly two leads");
  const ScatteringSolver solver(graph);
  TwoPortS out;
  out.grid.assign(grid.begin(), grid.end());
  out.values.reserve(grid.size());
  out.absorption = absorption;
  out.realization_id = realization_id;
  for (const double nu : grid) {
    bool nudged = false;
    out.values.push_back(solver.s_matrix(nu, absorption, &nudged));
    if (nudged) {
      std::ostringstream os;
      os.precision(15);
      os << "resolvent singular at " << nu << " Hz; evaluated at a nudged frequency";
      out.diagnostics.push_back(os.str());
    }
  }
  return out;
}

double pooled_variance(std::span<const cplx> z) {
  if (z.empty()) return 0.0;
  double sq = 0.0;
  cplx mean(0.0);
  for (const auto& v : z) {
    sq += std::norm(v);
    mean += v;
  }
  const double n = static_cast<double>(z.size());
  mean /= n;
  return std::max(0.0, sq / n - std::norm(mean));
}

std::vector<EnhancementWindow> enhancement_factor(const std::vector<TwoPortS>& ensemble, Band band,
                                                  double window) {
  if (ensemble.size() < 2) throw ParameterError("enhancement factor needs at least two realizations");
  if (!(window > 0.0) || window > band.width() * (1.0 + 1e-12))
    throw ParameterError("window must be positive and no wider than the band");
  const auto count = static_cast<std::size_t>(std::floor(band.width() / window * (1.0 + 1e-12)));
  std::vector<EnhancementWindow> out;
  for (std::size_t w = 0; w < count; ++w) {
    const double lo = band.lo_hz + window * static_cast<double>(w);
    const double hi = w + 1 == count ? band.hi_hz : lo + window;
    std::vector<cplx> s11, s22, s12;
    for (const auto& r : ensemble) {
      for (std::size_t i = 0; i < r.grid.size(); ++i) {
        const double nu = r.grid[i];
        if (nu < lo || (w + 1 == count ? nu > hi : nu >= hi)) continue;
        s11.push_back(r.values[i](0, 0));
        s22.push_back(r.values[i](1, 1));
        s12.push_back(r.values[i](0, 1));
      }
    }
    EnhancementWindow ew{lo, hi, std::nullopt};
    const double v12 = pooled_variance(s12);
    if (v12 > 0.0) ew.w_s = std::sqrt(pooled_variance(s11) * pooled_variance(s22)) / v12;
    out.push_back(ew);
  }
  return out;
}

namespace {

cplx moebius(cplx s, cplx c) { return (s - c) / (1.0 - std::conj(c) * s); }

// Centre c with mean of moebius(z, c) = 0; c <- phi_c^{-1}(<phi_c(z)>).
cplx ensemble_centre(const std::vector<cplx>& z) {
  cplx c(0.0);
  for (const auto& v : z) c += v;
  c /= static_cast<double>(z.size());
  if (!(std::abs(c) < 1.0)) throw DataError("ensemble mean of a diagonal S element has modulus >= 1");
  for (int it = 0; it < 200; ++it) {
    cplx d(0.0);
    for (const auto& v : z) d += moebius(v, c);
    d /= static_cast<double>(z.size());
    if (std::abs(d) < 1e-12) break;
    c = (d + c) / (1.0 + std::conj(c) * d);
  }
  return c;
}

}  // namespace

std::vector<TwoPortS> remove_direct(const std::vector<TwoPortS>& ensemble) {
  if (ensemble.size() < 10) throw ParameterError("direct-process removal needs at least 10 realizations");
  const auto n = ensemble.front().grid.size();
  for (const auto& r : ensemble)
    if (r.grid.size() != n) throw ParameterError("realizations must share one frequency grid");
  std::vector<TwoPortS> out = ensemble;
  std::vector<cplx> z(ensemble.size());
  for (std::size_t f = 0; f < n; ++f) {
    for (int p = 0; p < 2; ++p) {
      for (std::size_t r = 0; r < ensemble.size(); ++r) z[r] = ensemble[r].values[f](p, p);
      const cplx c = ensemble_centre(z);
      for (std::size_t r = 0; r < ensemble.size(); ++r) out[r].values[f](p, p) = moebius(z[r], c);
    }
  }
  return out;
}

ScatteringStats scattering_stats(const std::vector<TwoPortS>& reduced, Band band, int beta) {
  ScatteringStats st;
  st.band = band;
  for (int p = 0; p < 2; ++p) {
    auto& ps = st.port[p];
    for (const auto& r : reduced)
      for (std::size_t i = 0; i < r.grid.size(); ++i) {
        if (!band.contains(r.grid[i])) continue;
        const cplx s = r.values[i](p, p);
        ps.r_samples.push_back(std::min(1.0, std::norm(s)));
        try {
          ps.v_samples.push_back(wigner_v(s.real(), s.imag()));
        } catch (const DomainError&) {
          ++ps.invalid_v;
        }
      }
    if (ps.r_samples.empty()) throw ParameterError("no scattering samples inside the band");
    double sum = 0.0;
    for (const double r : ps.r_samples) sum += r;
    ps.mean_r = sum / static_cast<double>(ps.r_samples.size());
    ps.gamma = fit_gamma(ps.mean_r, beta);
  }
  st.gamma_fit = 0.5 * (st.port[0].gamma + st.port[1].gamma);
  return st;
}

}  // namespace unigraph
