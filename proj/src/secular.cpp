#include "unigraph/secular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "unigraph/errors.hpp"

namespace unigraph {

void SolverConfig::validate() const {
  if (!(grid_step_hz > 0.0) || !(refine_tolerance_hz > 0.0) || !(pair_threshold_hz > 0.0) ||
      !(resolution_hz > 0.0))
    throw ParameterError("solver grid step, tolerance, pair threshold and resolution must be positive");
  if (max_newton_iterations < 1) throw ParameterError("max_newton_iterations must be >= 1");
}

std::vector<double> SpectrumResult::frequencies() const {
  std::vector<double> out;
  out.reserve(resonances.size());
  for (const auto& r : resonances) out.push_back(r.frequency_hz);
  return out;
}

SecularFunction::SecularFunction(const GraphSpec& graph)
    : bond_(build_bond_scattering(graph)), lengths_(bond_lengths(graph)) {}

CMatrix SecularFunction::propagator(cplx k) const {
  const cplx ik = cplx(0.0, 1.0) * k;
  const CVector phase = (ik * lengths_.cast<cplx>().array()).exp().matrix();
  return phase.asDiagonal() * bond_.matrix;
}

cplx SecularFunction::value(cplx k) const {
  const auto n = bond_.matrix.rows();
  const CMatrix a = CMatrix::Identity(n, n) - propagator(k);
  return a.partialPivLu().determinant();
}

double SecularFunction::phase_count(double k) const {
  Eigen::ComplexEigenSolver<CMatrix> es(propagator(cplx(k, 0.0)), false);
  double sum = 0.0;
  for (const auto& lambda : es.eigenvalues()) {
    double phi = std::arg(lambda);
    if (phi < 0.0) phi += kTwoPi;
    sum += phi;
  }
  return (total_bond_length() * k - sum) / kTwoPi;
}

cplx secular_value(const GraphSpec& graph, cplx k) { return SecularFunction(graph).value(k); }

double weyl_count(double total_length_m, Band band, int degeneracy_factor) {
  return degeneracy_factor * total_length_m * band.width() / kSpeedOfLight;
}

namespace {

std::string format_hz(double nu) {
  std::ostringstream os;
  os.precision(12);
  os << nu << " Hz";
  return os.str();
}

// Real-k grid over the band with spacing at most `step_hz`; the last node sits a hair
// above the top so that a level exactly on the upper edge is counted (band treated as (lo, hi]).
std::vector<double> k_grid(Band band, double step_hz, const SolverConfig& cfg) {
  const double k_lo = wavenumber(band.lo_hz);
  const double k_hi = wavenumber(band.hi_hz) + wavenumber(cfg.refine_tolerance_hz) * 1e-3;
  const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(band.width() / step_hz)));
  std::vector<double> ks(n + 1);
  for (std::size_t i = 0; i < n; ++i) ks[i] = k_lo + (k_hi - k_lo) * static_cast<double>(i) / static_cast<double>(n);
  ks[n] = k_hi;
  return ks;
}

// The staircase only changes by whole crossings, so it can be sampled on a grid much
// coarser than the level spacing; bisection separates crossings sharing one interval.
double count_step(const SecularFunction& xi, const SolverConfig& cfg) {
  return std::max(cfg.grid_step_hz, kSpeedOfLight / xi.total_bond_length() / 16.0);
}

// Smallest k in (a, b] at which the staircase (relative to `base`) reaches `target`.
double bisect_crossing(const SecularFunction& xi, double a, double b, double base, long target, double tol_k) {
  while (b - a > tol_k) {
    const double m = 0.5 * (a + b);
    if (std::lround(xi.phase_count(m) - base) >= target)
      b = m;
    else
      a = m;
  }
  return 0.5 * (a + b);
}

struct Crossing {
  double k;
};

// All staircase jumps over the grid, each located to tol_k.
std::vector<Crossing> locate_crossings(const SecularFunction& xi, const std::vector<double>& ks,
                                       const std::vector<double>& counts, double tol_k,
                                       std::vector<std::string>& diagnostics) {
  std::vector<Crossing> out;
  for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
    const long jump = std::lround(counts[i + 1] - counts[i]);
    if (jump < 0) {
      diagnostics.push_back("eigenphase staircase decreased near " + format_hz(frequency(ks[i])));
      continue;
    }
    for (long j = 1; j <= jump; ++j)
      out.push_back({bisect_crossing(xi, ks[i], ks[i + 1], counts[i], j, tol_k)});
  }
  return out;
}

}  // namespace

SpectrumResult find_spectrum_closed(const GraphSpec& graph, Band band, const SolverConfig& cfg,
                                    int realization_id) {
  cfg.validate();
  if (band.hi_hz < band.lo_hz || band.lo_hz < 0.0) throw ParameterError("invalid band");
  SecularFunction xi(graph);
  const double defect = unitarity_defect(xi.bond_matrix().matrix);
  if (!graph.is_closed() || !(defect < 1e-10))
    throw ContractError("find_spectrum_closed needs a unitary S_G (closed graph); use find_spectrum_open");

  SpectrumResult res;
  res.band = band;
  res.solver = SolverKind::eigenphase;
  res.realization_id = realization_id;
  if (band.width() == 0.0) return res;

  const auto ks = k_grid(band, count_step(xi, cfg), cfg);
  std::vector<double> counts(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) counts[i] = xi.phase_count(ks[i]);

  const double tol_k = wavenumber(cfg.refine_tolerance_hz);
  for (const auto& c : locate_crossings(xi, ks, counts, tol_k, res.diagnostics))
    res.resonances.push_back({std::clamp(frequency(c.k), band.lo_hz, band.hi_hz), 0.0});
  return res;
}

namespace {

class NewtonSolver {
 public:
  NewtonSolver(const SecularFunction& xi, double h, double tol_k, double max_step, int max_iter)
      : xi_(xi), h_(h), tol_k_(tol_k), max_step_(max_step), max_iter_(max_iter) {}

  /// Newton on xi(k) / prod (k - r_j); the deflation enters only through the log-derivative.
  std::optional<cplx> solve(cplx k, const std::vector<cplx>& deflate) const {
    for (int it = 0; it < max_iter_; ++it) {
      const cplx f = xi_.value(k);
      if (f == cplx(0.0)) return k;
      const cplx fp = (xi_.value(k + h_) - xi_.value(k - h_)) / (2.0 * h_);
      cplx logd = fp / f;
      for (const auto& r : deflate) logd -= 1.0 / (k - r);
      if (!std::isfinite(logd.real()) || !std::isfinite(logd.imag()) || logd == cplx(0.0)) return std::nullopt;
      cplx step = 1.0 / logd;
      if (std::abs(step) > max_step_) step *= max_step_ / std::abs(step);
      k -= step;
      if (std::abs(step) < tol_k_) return k;
    }
    return std::nullopt;
  }

 private:
  const SecularFunction& xi_;
  double h_, tol_k_, max_step_;
  int max_iter_;
};

// Seeds below the real axis from the `count` eigenvalues crossing at kc (several when
// branches cross together): lambda(k) ~ |lambda| e^{i tau (k - kc)} equals 1 at
// k = kc + i ln|lambda| / tau.
std::vector<cplx> branch_seeds(const SecularFunction& xi, double kc, std::size_t count) {
  const CMatrix u = xi.propagator(cplx(kc, 0.0));
  Eigen::ComplexEigenSolver<CMatrix> es(u, true);
  const auto& lam = es.eigenvalues();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(lam.size()));
  for (Eigen::Index j = 0; j < lam.size(); ++j) order[static_cast<std::size_t>(j)] = j;
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return std::abs(std::arg(lam(a))) < std::abs(std::arg(lam(b))); });
  const CMatrix& v = es.eigenvectors();
  const CMatrix w = v.inverse();  // rows are left eigenvectors
  const double mean_length = xi.total_bond_length() / static_cast<double>(xi.lengths().size());
  std::vector<cplx> seeds;
  for (std::size_t i = 0; i < std::min(count, order.size()); ++i) {
    const auto j = order[i];
    const cplx num = (w.row(j).array() * xi.lengths().cast<cplx>().transpose().array() * v.col(j).transpose().array()).sum();
    const cplx den = (w.row(j) * v.col(j))(0, 0);
    double tau = (num / den).real();
    if (!std::isfinite(tau) || tau <= 0.0) tau = mean_length;
    const double mod = std::abs(lam(j));
    seeds.emplace_back(kc, mod > 0.0 ? std::log(mod) / tau : 0.0);
  }
  return seeds;
}

}  // namespace

SpectrumResult find_spectrum_open(const GraphSpec& graph, Band band, const SolverConfig& cfg,
                                  int realization_id) {
  cfg.validate();
  if (band.hi_hz < band.lo_hz || band.lo_hz < 0.0) throw ParameterError("invalid band");
  if (graph.is_closed())
    throw ContractError("find_spectrum_open needs a graph with at least one lead; use find_spectrum_closed");
  SecularFunction xi(graph);

  SpectrumResult res;
  res.band = band;
  res.solver = SolverKind::complex_root;
  res.realization_id = realization_id;
  if (band.width() == 0.0) return res;

  const double mean_spacing_hz = kSpeedOfLight / xi.total_bond_length();
  if (cfg.grid_step_hz > mean_spacing_hz) {
    std::ostringstream os;
    os << "warning: grid step " << cfg.grid_step_hz << " Hz exceeds the mean level spacing "
       << mean_spacing_hz << " Hz; the scan is undersampled";
    res.diagnostics.push_back(os.str());
  }

  const auto ks = k_grid(band, cfg.grid_step_hz, cfg);
  std::vector<double> modulus(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) modulus[i] = std::abs(xi.value(cplx(ks[i], 0.0)));
  std::vector<double> sorted_mod = modulus;
  std::nth_element(sorted_mod.begin(), sorted_mod.begin() + static_cast<long>(sorted_mod.size() / 2), sorted_mod.end());
  const double median_mod = sorted_mod[sorted_mod.size() / 2];
  const double accept_level = 1e-8 * median_mod;

  const auto count_ks = k_grid(band, count_step(xi, cfg), cfg);
  std::vector<double> counts(count_ks.size());
  for (std::size_t i = 0; i < count_ks.size(); ++i) counts[i] = xi.phase_count(count_ks[i]);

  const double grid_k = wavenumber(cfg.grid_step_hz);
  const double tol_k = wavenumber(cfg.refine_tolerance_hz);
  const double spacing_k = wavenumber(mean_spacing_hz);
  const NewtonSolver newton(xi, 1e-4 * grid_k, tol_k, spacing_k, cfg.max_newton_iterations);
  const double dup_k = 10.0 * tol_k;

  std::vector<cplx> roots;
  auto is_new = [&](cplx r) {
    return std::none_of(roots.begin(), roots.end(), [&](cplx q) { return std::abs(q - r) < dup_k; });
  };
  auto acceptable = [&](cplx r) { return r.imag() < spacing_k && std::abs(xi.value(r)) <= accept_level; };
  auto neighbours = [&](cplx seed) {
    std::vector<cplx> out;
    for (const auto& q : roots)
      if (std::abs(q.real() - seed.real()) < 4.0 * spacing_k) out.push_back(q);
    return out;
  };

  std::vector<std::string> scratch;
  const double bisect_k = std::max(tol_k, 1e-3 * grid_k);
  const auto crossings = locate_crossings(xi, count_ks, counts, bisect_k, scratch);
  for (const auto& d : scratch) res.diagnostics.push_back(d);

  std::vector<cplx> failed;
  for (std::size_t i = 0; i < crossings.size();) {
    std::size_t j = i + 1;
    while (j < crossings.size() && crossings[j].k - crossings[i].k < 2.0 * bisect_k) ++j;
    for (const cplx seed : branch_seeds(xi, crossings[i].k, j - i)) {
      auto r = newton.solve(seed, {});
      if (!r || !acceptable(*r) || !is_new(*r)) r = newton.solve(seed, neighbours(seed));
      if (r && acceptable(*r) && is_new(*r))
        roots.push_back(*r);
      else
        failed.push_back(seed);
    }
    i = j;
  }

  // Local minima of |xi| on the real axis.
  for (std::size_t i = 1; i + 1 < ks.size(); ++i) {
    if (!(modulus[i] < modulus[i - 1] && modulus[i] <= modulus[i + 1])) continue;
    const auto r = newton.solve(cplx(ks[i], 0.0), {});
    if (r && acceptable(*r) && is_new(*r)) roots.push_back(*r);
  }

  // A failed seed usually means a close doublet whose broader member attracts neither
  // start; restart the deflated iteration from a lattice around the seed.
  for (const cplx seed : failed) {
    std::vector<cplx> starts;
    for (int a = -6; a <= 6; ++a)
      for (const double b : {0.05, 0.25, 0.5, 1.0}) starts.emplace_back(seed.real() + 0.25 * a * spacing_k, -b * spacing_k);
    std::stable_sort(starts.begin(), starts.end(),
                     [&](cplx x, cplx y) { return std::abs(x - seed) < std::abs(y - seed); });
    bool found = false;
    for (const cplx st : starts) {
      const auto r = newton.solve(st, neighbours(seed));
      if (r && acceptable(*r) && is_new(*r)) {
        roots.push_back(*r);
        found = true;
        break;
      }
    }
    if (!found) res.unconverged_seeds.push_back(seed);
  }

  for (const auto& r : roots) {
    const double nu = frequency(r.real());
    if (nu <= band.lo_hz || nu > band.hi_hz) continue;
    res.resonances.push_back({nu, std::max(0.0, -2.0 * frequency(r.imag()))});
  }
  std::sort(res.resonances.begin(), res.resonances.end(),
            [](const Resonance& a, const Resonance& b) { return a.frequency_hz < b.frequency_hz; });

  if (!res.unconverged_seeds.empty())
    res.diagnostics.push_back(std::to_string(res.unconverged_seeds.size()) +
                              " seed(s) did not converge to a new root");
  const long expected = std::lround(counts.back() - counts.front());
  if (static_cast<long>(res.resonances.size()) != expected)
    res.diagnostics.push_back("found " + std::to_string(res.resonances.size()) + " roots for " +
                              std::to_string(expected) + " eigenphase crossings");
  return res;
}

SpectrumResult find_spectrum(const GraphSpec& graph, Band band, const SolverConfig& config, int realization_id) {
  return graph.is_closed() ? find_spectrum_closed(graph, band, config, realization_id)
                           : find_spectrum_open(graph, band, config, realization_id);
}

}  // namespace unigraph
