#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "fixtures.hpp"
#include "unigraph/errors.hpp"
#include "unigraph/spectral_stats.hpp"

using namespace unigraph;

namespace {

constexpr double kPi = std::numbers::pi;

double integrate_half_line(const std::function<double(double)>& f) {
  boost::math::quadrature::exp_sinh<double> es;
  return es.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-13);
}

UnfoldedSpectrum levels(std::vector<double> eps) {
  UnfoldedSpectrum u;
  u.epsilons = std::move(eps);
  return u;
}

UnfoldedSpectrum poisson_levels(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> e(1.0);
  std::vector<double> eps(n);
  double x = 0.0;
  for (auto& v : eps) v = (x += e(rng));
  return levels(std::move(eps));
}

// Brute-force Delta_3 of a single window: staircase sampled on a fine grid, linear fit by
// ordinary least squares on the samples.
double brute_window_delta3(const std::vector<double>& eps, double a, double l) {
  const int m = 200000;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < m; ++i) {
    const double x = (i + 0.5) / m * l;
    const double y = static_cast<double>(std::upper_bound(eps.begin(), eps.end(), a + x) -
                                         std::lower_bound(eps.begin(), eps.end(), a));
    sx += x, sy += y, sxx += x * x, sxy += x * y, syy += y * y;
  }
  const double n = m;
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double shift = (sy - slope * sx) / n;
  return (syy - 2 * slope * sxy - 2 * shift * sy + slope * slope * sxx + 2 * slope * shift * sx + n * shift * shift) / n;
}

}  // namespace

TEST_CASE("unfolding") {
  const double lt = 7.955;
  const std::vector<double> nu{kSpeedOfLight / lt, 2.0 * kSpeedOfLight / lt};
  const auto u = unfold(nu, lt, 1);
  CHECK(u.epsilons[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(unfold(nu, lt, 2).epsilons[1] == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(unfold(nu, lt / 2.0, 2).epsilons[1] == doctest::Approx(u.epsilons[1]).epsilon(1e-15));
  const std::vector<double> unsorted{2.0, 1.0};
  CHECK_THROWS_AS(unfold(unsorted, lt, 1), ContractError);
  CHECK_THROWS_AS(unfold(nu, lt, 3), ParameterError);
}

TEST_CASE("NNSD histograms are density normalized") {
  const auto p = poisson_levels(5000, 3);
  for (const double bw : {0.05, 0.2, 0.37, 1.0}) CHECK(std::abs(nnsd(p, bw).area() - 1.0) < 1e-10);
  const auto h = nnsd(p, 0.2);
  CHECK(h.edges.back() >= 4.0 - 1e-12);
  const auto sp = p.spacings();
  CHECK(h.edges.back() >= *std::max_element(sp.begin(), sp.end()));

  std::vector<double> fence(100);
  for (std::size_t i = 0; i < fence.size(); ++i) fence[i] = static_cast<double>(i);
  const auto hf = nnsd(levels(fence), 0.2);
  CHECK(std::count_if(hf.density.begin(), hf.density.end(), [](double d) { return d > 0.0; }) == 1);
  for (std::size_t i = 0; i < hf.density.size(); ++i)
    if (hf.density[i] > 0.0) CHECK((hf.edges[i] <= 1.0 && hf.edges[i + 1] > 1.0));
  CHECK_THROWS_AS(nnsd(levels({1.0}), 0.2), ParameterError);
}

TEST_CASE("Poisson-sampled spacings follow exp(-s)") {
  const auto p = poisson_levels(100000, 17);
  CHECK(ks_distance(p.spacings(), [](double s) { return spacing_cdf(s, RmtEnsemble::poisson); }) < 0.02);
  CHECK(l1_distance(nnsd(p, 0.2), poisson_spacing) < 0.05);
  CHECK(l1_distance(nnsd(p, 0.2), poisson_spacing) < l1_distance(nnsd(p, 0.2), [](double s) { return wigner_surmise(s, 2); }));
}

TEST_CASE("Wigner surmises") {
  for (const int beta : {1, 2}) {
    const double area = integrate_half_line([&](double s) { return wigner_surmise(s, beta); });
    const double mean = integrate_half_line([&](double s) { return s * wigner_surmise(s, beta); });
    CHECK(std::abs(area - 1.0) < 1e-10);
    CHECK(std::abs(mean - 1.0) < 1e-10);
    CHECK(wigner_surmise(0.0, beta) == 0.0);
  }
  // Peak of the beta = 2 surmise
  const double peak = std::sqrt(kPi) / 2.0;
  const double h = 1e-5;
  CHECK(wigner_surmise(peak, 2) > wigner_surmise(peak - h, 2));
  CHECK(wigner_surmise(peak, 2) > wigner_surmise(peak + h, 2));
  CHECK(std::abs(integrate_half_line(poisson_spacing) - 1.0) < 1e-10);
  CHECK_THROWS_AS(wigner_surmise(1.0, 4), DomainError);
}

TEST_CASE("spacing CDFs are antiderivatives of the densities") {
  for (const auto e : {RmtEnsemble::poisson, RmtEnsemble::goe, RmtEnsemble::gue}) {
    CHECK(spacing_cdf(0.0, e) == 0.0);
    CHECK(spacing_cdf(40.0, e) == doctest::Approx(1.0).epsilon(1e-14));
    for (const double s : {0.3, 1.0, 2.2}) {
      const double h = 1e-5;
      const double d = (spacing_cdf(s + h, e) - spacing_cdf(s - h, e)) / (2 * h);
      CHECK(d == doctest::Approx(spacing_density(s, e)).epsilon(1e-8));
    }
  }
}

TEST_CASE("missing-level normalization constants") {
  const auto c0 = norm_constants(0, 2);
  CHECK(std::abs(c0.gamma - 32.0 / (kPi * kPi)) < 1e-12);
  CHECK(std::abs(c0.kappa - 4.0 / kPi) < 1e-12);
  for (const int n : {1, 2}) {
    const double area = integrate_half_line([n](double x) { return missing_term(n, x); });
    const double mean = integrate_half_line([n](double x) { return x * missing_term(n, x); });
    CHECK(std::abs(area - 1.0) < 1e-8);
    CHECK(std::abs(mean - (n + 1)) < 1e-8);
  }
}

TEST_CASE("missing-level NNSD") {
  for (double s = 0.0; s <= 5.0; s += 0.01) CHECK(std::abs(missing_nnsd(s, 1.0) - wigner_surmise(s, 2)) <= 1e-14);
  const double peak = std::sqrt(kPi) / 2.0;
  CHECK(missing_nnsd(peak, 0.96) < missing_nnsd(peak, 1.0));
  CHECK(missing_nnsd(2.5, 0.96) > missing_nnsd(2.5, 1.0));
  // truncation after n = 2 leaves a deficit of (1 - phi)^3
  const double area = integrate_half_line([](double s) { return missing_nnsd(s, 0.9); });
  CHECK(std::abs(area - 1.0) < 2e-3);
  CHECK(area == doctest::Approx(1.0 - 0.001).epsilon(1e-8));
  CHECK_THROWS_AS(missing_nnsd(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(missing_nnsd(1.0, 1.1), DomainError);
}

TEST_CASE("cluster functions") {
  CHECK(cluster_function(0.0, RmtEnsemble::gue) == doctest::Approx(1.0));
  CHECK(cluster_function(0.0, RmtEnsemble::goe) == doctest::Approx(1.0));
  CHECK(cluster_function(2.0, RmtEnsemble::gue) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(cluster_function(3.0, RmtEnsemble::poisson) == 0.0);
  // sine integral check: at r = 1/2, s = 2/pi, s' = -4/pi
  const double si_half_pi = 1.3707621681544884;
  const double expected = 4.0 / (kPi * kPi) - 4.0 / kPi * (0.5 - si_half_pi / kPi);
  CHECK(cluster_function(0.5, RmtEnsemble::goe) == doctest::Approx(expected).epsilon(1e-12));
  // near the origin Y_2 = 1 - pi^2 r / 6 + O(r^2) on both sides of the small-r branch
  for (const double r : {0.99e-4, 1.01e-4}) CHECK(std::abs(cluster_function(r, RmtEnsemble::goe) - (1.0 - kPi * kPi * r / 6.0)) < 1e-7);
}

TEST_CASE("theoretical spectral rigidity") {
  CHECK(delta3_theory(15.0, RmtEnsemble::poisson) == 1.0);
  // reference values from an independent 30-digit evaluation of the same integral
  const double ref[][3] = {{0.5, 0.0328221104107871, 0.0324219750742446},
                           {1.0, 0.0606608712916251, 0.0605476984373720},
                           {5.0, 0.140627659974338, 0.173818427207572},
                           {20.0, 0.210794134134849, 0.301415014681468}};
  for (const auto& r : ref) {
    CHECK(delta3_theory(r[0], RmtEnsemble::gue) == doctest::Approx(r[1]).epsilon(1e-10));
    CHECK(delta3_theory(r[0], RmtEnsemble::goe) == doctest::Approx(r[2]).epsilon(1e-10));
  }
  // the curves cross near L = 1.03; GUE is the more rigid one beyond
  for (const double l : {1.1, 2.0, 5.0, 10.0, 20.0})
    CHECK(delta3_theory(l, RmtEnsemble::gue) < delta3_theory(l, RmtEnsemble::goe));
  for (const auto e : {RmtEnsemble::goe, RmtEnsemble::gue})
    CHECK(delta3_theory(1e-3, e) == doctest::Approx(1e-3 / 15.0).epsilon(1e-3));
  // large-L asymptotics
  const double euler = 0.5772156649015329;
  const double l = 50.0;
  const double gue = (std::log(kTwoPi * l) + euler - 1.25) / (2 * kPi * kPi);
  const double goe = (std::log(kTwoPi * l) + euler - 1.25 - kPi * kPi / 8) / (kPi * kPi);
  CHECK(delta3_theory(l, RmtEnsemble::gue) == doctest::Approx(gue).epsilon(1e-2));
  CHECK(delta3_theory(l, RmtEnsemble::goe) == doctest::Approx(goe).epsilon(1e-2));
}

TEST_CASE("missing-level spectral rigidity") {
  for (const auto e : {RmtEnsemble::poisson, RmtEnsemble::goe, RmtEnsemble::gue})
    for (const double l : {0.5, 3.0, 17.0}) CHECK(std::abs(delta3_missing(l, 1.0, e) - delta3_theory(l, e)) <= 1e-12);
  CHECK(delta3_missing(20.0, 1e-9, RmtEnsemble::gue) == doctest::Approx(20.0 / 15.0).epsilon(1e-6));
  const double mid = delta3_missing(20.0, 0.96, RmtEnsemble::gue);
  CHECK(mid > delta3_theory(20.0, RmtEnsemble::gue));
  CHECK(mid < delta3_theory(20.0, RmtEnsemble::poisson));
}

TEST_CASE("empirical spectral rigidity") {
  SUBCASE("closed-form window moments against a brute-force fit") {
    const auto p = poisson_levels(200, 5);
    for (const double l : {3.0, 11.0}) {
      const double a = p.epsilons[20] - 0.3;
      const std::vector<double> ls{l};
      UnfoldedSpectrum w = levels({});
      for (const double e : p.epsilons)
        if (e >= a && e <= a + l) w.epsilons.push_back(e);
      w.epsilons.insert(w.epsilons.begin(), a);  // first window starts on this level
      w.epsilons.push_back(a + l);
      // single window exactly covering [a, a + l]
      const double brute = brute_window_delta3(w.epsilons, a, l);
      const auto res = delta3_empirical(w, ls);
      REQUIRE(res.points.size() == 1);
      CHECK(res.points[0].windows == 1);
      CHECK(res.points[0].value == doctest::Approx(brute).epsilon(1e-3));
    }
  }
  SUBCASE("Poisson levels give L/15") {
    const auto p = poisson_levels(100000, 23);
    const std::vector<double> ls{15.0};
    const auto res = delta3_empirical(p, ls);
    REQUIRE(res.points.size() == 1);
    CHECK(std::abs(res.points[0].value - 1.0) < 0.1);
  }
  SUBCASE("picket fence tends to 1/12") {
    std::vector<double> fence(2000);
    for (std::size_t i = 0; i < fence.size(); ++i) fence[i] = static_cast<double>(i) + 0.5;
    const std::vector<double> ls{50.0};
    const auto res = delta3_empirical(levels(fence), ls);
    CHECK(res.points[0].value == doctest::Approx(1.0 / 12.0).epsilon(0.02));
  }
  SUBCASE("circular unitary eigenphases follow the GUE curve") {
    // 1600 Haar unitaries of size 64, eigenphases unfolded to unit mean spacing
    std::vector<UnfoldedSpectrum> spectra;
    for (unsigned m = 0; m < 1600; ++m) {
      const auto u = fixtures::random_unitary(64, 1000 + m);
      Eigen::ComplexEigenSolver<CMatrix> es(u, false);
      std::vector<double> eps;
      for (const auto& z : es.eigenvalues()) {
        double t = std::arg(z);
        if (t < 0) t += kTwoPi;
        eps.push_back(64.0 * t / kTwoPi);
      }
      std::sort(eps.begin(), eps.end());
      spectra.push_back(levels(std::move(eps)));
    }
    const std::vector<double> ls{2.0, 5.0, 10.0};
    const auto res = delta3_empirical(std::span<const UnfoldedSpectrum>(spectra), ls);
    REQUIRE(res.points.size() == 3);
    for (const auto& pt : res.points) CHECK(pt.value == doctest::Approx(delta3_theory(pt.l, RmtEnsemble::gue)).epsilon(0.1));
  }
  SUBCASE("windows wider than the spectrum are omitted") {
    const std::vector<double> ls{1.0, 500.0};
    const auto res = delta3_empirical(poisson_levels(100, 1), ls);
    CHECK(res.points.size() == 1);
    CHECK(res.diagnostics.size() == 1);
  }
}

TEST_CASE("observed fraction") {
  CHECK(observed_fraction(153, 159.2) == doctest::Approx(153 / 159.2));
  CHECK(observed_fraction(200, 159.2) == 1.0);
  CHECK_THROWS_AS(observed_fraction(0, 10.0), DomainError);
}

TEST_CASE("doublet-size distribution") {
  auto from = [](const std::vector<double>& splits) {
    DoubletSet d;
    double sum = 0;
    for (const double s : splits) {
      d.doublets.push_back({1e9, 1e9 + s, s});
      sum += s;
    }
    d.mean_splitting_hz = sum / static_cast<double>(splits.size());
    return d;
  };
  std::mt19937_64 rng(99);
  std::exponential_distribution<double> e(1.0 / 2e6);
  std::vector<double> s(10000);
  for (auto& x : s) x = e(rng);
  const auto dd = doublet_distribution(from(s));
  CHECK(dd.ks_exponential < 0.02);
  CHECK(std::abs(dd.histogram.area() - 1.0) < 1e-10);
  CHECK(dd.diagnostics.empty());

  const auto spike = doublet_distribution(from(std::vector<double>(200, 1e6)));
  CHECK(spike.ks_exponential > 0.5);
  CHECK(std::count_if(spike.histogram.density.begin(), spike.histogram.density.end(), [](double d) { return d > 0; }) == 1);
  CHECK_THROWS_AS(doublet_distribution(DoubletSet{}), ParameterError);
  CHECK_FALSE(doublet_distribution(from({1e6, 2e6})).diagnostics.empty());
}
