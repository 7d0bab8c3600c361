#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "unigraph/doublets.hpp"
#include "unigraph/ensemble.hpp"
#include "unigraph/errors.hpp"
#include "unigraph/secular.hpp"

using namespace unigraph;

namespace {

// Loop edge on a T-junction whose third port is a lead. With z = exp(ikl),
// xi = (1 - z)(1 - z/3): real zeros at kl = 2 pi n and complex ones at kl = 2 pi n - i ln 3.
GraphSpec leaded_ring(double length) {
  GraphParts p;
  p.vertices.push_back(make_tjunction("T"));
  p.edges.push_back({"loop", {0, 0}, {0, 1}, length, ""});
  p.leads.push_back({"L", {0, 2}});
  return GraphSpec(std::move(p));
}

}  // namespace

TEST_CASE("secular function of the circle graph") {
  const double l = 1.3;
  const auto g = fixtures::circle(l);
  for (int n = 1; n <= 5; ++n) CHECK(std::abs(secular_value(g, kTwoPi * n / l)) < 1e-10);
  // xi = (1 - e^{ikl})^2 = 4 at the midpoint
  CHECK(std::abs(secular_value(g, std::numbers::pi / l) - cplx(4.0)) < 1e-12);
}

TEST_CASE("closed solver on the circle graph matches k_n = 2 pi n / l") {
  const double l = 1.0;
  const auto g = fixtures::circle(l);
  SolverConfig cfg;
  cfg.grid_step_hz = 1e6;
  const double top = 10.0 * kSpeedOfLight / l;
  const auto res = find_spectrum_closed(g, {0.0, top}, cfg);
  CHECK(res.solver == SolverKind::eigenphase);
  REQUIRE(res.resonances.size() == 20);

  // brute force: |xi| on a uniform grid, local minima
  const SecularFunction xi(g);
  std::vector<double> minima;
  const int n = 200000;
  double prev2 = 1e300, prev1 = 1e300;
  for (int i = 0; i <= n + 1; ++i) {
    const double nu = top * (i + 0.5) / n;
    const double v = std::abs(xi.value(wavenumber(nu)));
    if (i >= 2 && prev1 < prev2 && prev1 <= v) minima.push_back(top * (i - 0.5) / n);
    prev2 = prev1;
    prev1 = v;
  }
  REQUIRE(minima.size() == 10);
  for (std::size_t i = 0; i < res.resonances.size(); ++i) {
    const double exact = static_cast<double>(i / 2 + 1) * kSpeedOfLight / l;
    CHECK(std::abs(res.resonances[i].frequency_hz - exact) <= cfg.refine_tolerance_hz);
    CHECK(std::abs(res.resonances[i].frequency_hz - minima[i / 2]) <= top / n);
    CHECK(res.resonances[i].width_hz == 0.0);
    CHECK(res.band.contains(res.resonances[i].frequency_hz));
  }
}

TEST_CASE("closed solver contract and edge cases") {
  SolverConfig cfg;
  CHECK(find_spectrum_closed(fixtures::circle(1.0), {1e9, 1e9}, cfg).resonances.empty());
  CHECK_THROWS_AS(find_spectrum_closed(leaded_ring(1.0), {1e9, 2e9}, cfg), ContractError);
  CHECK_THROWS_AS(find_spectrum_open(fixtures::circle(1.0), {1e9, 2e9}, cfg), ContractError);
  SolverConfig bad;
  bad.grid_step_hz = 0.0;
  CHECK_THROWS_AS(find_spectrum(fixtures::circle(1.0), {1e9, 2e9}, bad), ParameterError);
}

TEST_CASE("open solver on the leaded ring finds real and complex zeros") {
  const double l = 1.0;
  const auto g = leaded_ring(l);
  SolverConfig cfg;
  cfg.grid_step_hz = 1e6;
  const double unit = kSpeedOfLight / l;
  const auto res = find_spectrum_open(g, {0.5 * unit, 5.0 * unit}, cfg);
  CHECK(res.solver == SolverKind::complex_root);
  CHECK(res.unconverged_seeds.empty());
  REQUIRE(res.resonances.size() == 10);
  const double width = kSpeedOfLight * std::log(3.0) / (std::numbers::pi * l);
  for (std::size_t i = 0; i < res.resonances.size(); ++i) {
    const auto& r = res.resonances[i];
    CHECK(std::abs(r.frequency_hz - static_cast<double>(i / 2 + 1) * unit) <= cfg.refine_tolerance_hz);
    CHECK(r.width_hz >= 0.0);
  }
  std::size_t bound = 0, leaky = 0;
  for (const auto& r : res.resonances) {
    if (r.width_hz < 1.0) ++bound;
    if (std::abs(r.width_hz - width) < 10.0) ++leaky;
  }
  CHECK(bound == 5);
  CHECK(leaky == 5);
}

TEST_CASE("open solver on the gamma network, 3.0 to 3.3 GHz") {
  const auto& g = fixtures::gamma();
  SolverConfig cfg;
  const Band band{3.0e9, 3.3e9};
  const auto res = find_spectrum_open(g, band, cfg);
  CHECK(res.diagnostics.empty());
  REQUIRE(res.resonances.size() >= 14);
  const SecularFunction xi(g);
  std::vector<double> grid_mod;
  for (double nu = band.lo_hz; nu <= band.hi_hz; nu += cfg.grid_step_hz)
    grid_mod.push_back(std::abs(xi.value(wavenumber(nu))));
  std::nth_element(grid_mod.begin(), grid_mod.begin() + grid_mod.size() / 2, grid_mod.end());
  const double median = grid_mod[grid_mod.size() / 2];
  double prev = band.lo_hz;
  for (const auto& r : res.resonances) {
    CHECK(r.frequency_hz > prev);
    CHECK(r.width_hz >= 0.0);
    prev = r.frequency_hz;
    const cplx k(wavenumber(r.frequency_hz), -wavenumber(0.5 * r.width_hz));
    CHECK(std::abs(xi.value(k)) < 1e-8 * median);
  }
  const auto d = pair_doublets(res, cfg);
  CHECK(d.unpaired.empty());
  for (const auto& dd : d.doublets) {
    CHECK(dd.splitting_hz >= 0.1e6);
    CHECK(dd.splitting_hz <= 8e6);
  }
}

TEST_CASE("open solver reports undersampling and unconverged seeds") {
  const auto& g = fixtures::gamma();
  SolverConfig coarse;
  coarse.grid_step_hz = 50e6;
  const auto res = find_spectrum_open(g, {3.0e9, 3.3e9}, coarse);
  const bool warned = std::any_of(res.diagnostics.begin(), res.diagnostics.end(),
                                  [](const std::string& d) { return d.find("undersampled") != std::string::npos; });
  CHECK(warned);

  SolverConfig starved;
  starved.max_newton_iterations = 1;
  const auto res2 = find_spectrum_open(g, {3.0e9, 3.1e9}, starved);
  CHECK_FALSE(res2.unconverged_seeds.empty());
  CHECK_FALSE(res2.diagnostics.empty());
}

TEST_CASE("close doublet with unequal widths keeps both members") {
  // realization 1 of the seed-7 ensemble: members at 6316.60 MHz (27.6 MHz wide) and
  // 6317.08 MHz (12.6 MHz wide); the argument principle counts two zeros there
  const auto& g = fixtures::gamma();
  const auto ps = g.phase_shifter_edges();
  const auto ens = generate_ensemble(g, ps[0], ps[1], 2, 0.1, 7);
  SolverConfig cfg;
  const auto res = find_spectrum_open(ens[1], {6.28e9, 6.36e9}, cfg);
  CHECK(res.unconverged_seeds.empty());
  CHECK(res.diagnostics.empty());
  int near = 0;
  for (const auto& r : res.resonances)
    if (std::abs(r.frequency_hz - 6316.84e6) < 0.5e6) ++near;
  CHECK(near == 2);
}

TEST_CASE("gamma prime is exactly doubly degenerate") {
  const auto& g = fixtures::gamma_prime();
  SolverConfig cfg;
  const auto res = find_spectrum_closed(g, {2e9, 8e9}, cfg);
  REQUIRE(res.resonances.size() % 2 == 0);
  const double mean_spacing = (res.resonances.back().frequency_hz - res.resonances.front().frequency_hz) /
                              static_cast<double>(res.resonances.size() - 1);
  for (std::size_t i = 0; i + 1 < res.resonances.size(); i += 2)
    CHECK(res.resonances[i + 1].frequency_hz - res.resonances[i].frequency_hz < 1e-6 * mean_spacing);
  CHECK(std::abs(static_cast<double>(res.resonances.size()) - weyl_count(g.total_optical_length(), res.band, 2)) <= 5.0);
}

TEST_CASE("weyl count") {
  CHECK(weyl_count(7.955, {2e9, 8e9}, 2) == doctest::Approx(318.4).epsilon(1e-3));
  CHECK(weyl_count(7.955, {2e9, 2e9}, 2) == 0.0);
  CHECK(weyl_count(7.955 / 2, {2e9, 8e9}, 2) == doctest::Approx(weyl_count(7.955, {2e9, 8e9}, 1)));
}
