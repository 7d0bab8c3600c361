#include "unigraph/spectral_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/sinc.hpp>

#include "unigraph/errors.hpp"

namespace unigraph {

namespace {

using boost::math::quadrature::gauss_kronrod;
constexpr double kPi = std::numbers::pi;

template <class F>
double integrate(F f, double a, double b, double tol = 1e-13, unsigned depth = 12) {
  double err = 0.0;
  return gauss_kronrod<double, 31>::integrate(f, a, b, depth, tol, &err);
}

double sine_integral(double x) {
  if (x == 0.0) return 0.0;
  // integrate half-periods separately, the integrand changes sign at multiples of pi
  const double sign = x < 0 ? -1.0 : 1.0;
  x = std::abs(x);
  double sum = 0.0, a = 0.0;
  auto f = [](double t) { return boost::math::sinc_pi(t); };
  while (a < x) {
    const double b = std::min(x, a + kPi);
    sum += gauss_kronrod<double, 21>::integrate(f, a, b, 0, 0.0);
    a = b;
  }
  return sign * sum;
}

void check_phi(double phi) {
  if (!(phi > 0.0 && phi <= 1.0)) throw DomainError("fraction of observed levels must lie in (0, 1]");
}

}  // namespace

std::string_view to_string(RmtEnsemble e) {
  switch (e) {
    case RmtEnsemble::poisson:
      return "poisson";
    case RmtEnsemble::goe:
      return "goe";
    case RmtEnsemble::gue:
      return "gue";
  }
  return "poisson";
}

RmtEnsemble rmt_ensemble_from_string(std::string_view name) {
  if (name == "poisson") return RmtEnsemble::poisson;
  if (name == "goe") return RmtEnsemble::goe;
  if (name == "gue") return RmtEnsemble::gue;
  throw ParameterError("unknown ensemble '" + std::string(name) + "'");
}

std::vector<double> UnfoldedSpectrum::spacings() const {
  std::vector<double> s;
  if (epsilons.size() < 2) return s;
  s.reserve(epsilons.size() - 1);
  for (std::size_t i = 0; i + 1 < epsilons.size(); ++i) s.push_back(epsilons[i + 1] - epsilons[i]);
  return s;
}

double UnfoldedSpectrum::mean_spacing() const {
  if (epsilons.size() < 2) return 0.0;
  return (epsilons.back() - epsilons.front()) / static_cast<double>(epsilons.size() - 1);
}

UnfoldedSpectrum unfold(std::span<const double> nu, double total_length, int factor, std::string source) {
  if (factor != 1 && factor != 2) throw ParameterError("unfold factor must be 1 or 2");
  if (!(total_length > 0.0)) throw ParameterError("total length must be positive");
  if (!std::is_sorted(nu.begin(), nu.end())) throw ContractError("unfold requires sorted frequencies");
  UnfoldedSpectrum out;
  out.source = std::move(source);
  out.unfold_factor = factor;
  out.epsilons.reserve(nu.size());
  for (const double v : nu) out.epsilons.push_back(factor * total_length * v / kSpeedOfLight);
  return out;
}

double Histogram::area() const {
  double a = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) a += density[i] * bin_width(i);
  return a;
}

Histogram density_histogram(std::span<const double> samples, double bin_width, double s_max) {
  if (!(bin_width > 0.0)) throw ParameterError("bin width must be positive");
  if (!(s_max > 0.0)) throw ParameterError("histogram range must be positive");
  std::size_t bins = static_cast<std::size_t>(std::ceil(s_max / bin_width - 1e-9));
  for (const double s : samples) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("histogram samples must be finite and non-negative");
    while (s >= bin_width * static_cast<double>(bins)) ++bins;
  }
  Histogram h;
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = bin_width * static_cast<double>(i);
  h.density.assign(bins, 0.0);
  h.samples = samples.size();
  if (samples.empty()) return h;
  for (const double s : samples) {
    auto i = static_cast<std::size_t>(s / bin_width);
    if (i >= bins) i = bins - 1;
    h.density[i] += 1.0;
  }
  const double norm = 1.0 / (static_cast<double>(samples.size()) * bin_width);
  for (auto& d : h.density) d *= norm;
  return h;
}

Histogram nnsd(const UnfoldedSpectrum& spectrum, double bin_width, double s_max) {
  if (spectrum.epsilons.size() < 2) throw ParameterError("NNSD needs at least two levels");
  const auto s = spectrum.spacings();
  return density_histogram(s, bin_width, s_max);
}

Histogram nnsd(std::span<const UnfoldedSpectrum> spectra, double bin_width, double s_max) {
  std::vector<double> s;
  for (const auto& sp : spectra) {
    const auto part = sp.spacings();
    s.insert(s.end(), part.begin(), part.end());
  }
  if (s.empty()) throw ParameterError("NNSD needs at least two levels");
  return density_histogram(s, bin_width, s_max);
}

double wigner_surmise(double s, int beta) {
  if (!(s >= 0.0)) throw DomainError("spacing must be non-negative");
  if (beta == 2) return 32.0 / (kPi * kPi) * s * s * std::exp(-4.0 * s * s / kPi);
  if (beta == 1) return 0.5 * kPi * s * std::exp(-0.25 * kPi * s * s);
  throw DomainError("beta must be 1 or 2");
}

double poisson_spacing(double s) {
  if (!(s >= 0.0)) throw DomainError("spacing must be non-negative");
  return std::exp(-s);
}

double spacing_density(double s, RmtEnsemble e) {
  switch (e) {
    case RmtEnsemble::poisson:
      return poisson_spacing(s);
    case RmtEnsemble::goe:
      return wigner_surmise(s, 1);
    case RmtEnsemble::gue:
      return wigner_surmise(s, 2);
  }
  return 0.0;
}

double spacing_cdf(double s, RmtEnsemble e) {
  if (s <= 0.0) return 0.0;
  switch (e) {
    case RmtEnsemble::poisson:
      return -std::expm1(-s);
    case RmtEnsemble::goe:
      return -std::expm1(-0.25 * kPi * s * s);
    case RmtEnsemble::gue:
      return std::erf(2.0 * s / std::sqrt(kPi)) - 4.0 * s / kPi * std::exp(-4.0 * s * s / kPi);
  }
  return 0.0;
}

NormConstants norm_constants(int n, int mu) {
  if (n < 0 || mu < 0) throw DomainError("norm constants need n >= 0 and mu >= 0");
  using boost::math::tgamma;
  const double g1 = tgamma(0.5 * (mu + 1));
  const double ratio = tgamma(0.5 * (mu + 2)) / ((n + 1) * g1);
  const double kappa = ratio * ratio;
  return {2.0 * std::pow(kappa, 0.5 * (mu + 1)) / g1, kappa};
}

double missing_term(int n, double x) {
  static const int mus[3] = {2, 7, 14};
  static const NormConstants c[3] = {norm_constants(0, 2), norm_constants(1, 7), norm_constants(2, 14)};
  if (n < 0 || n > 2) throw DomainError("missing-level series is truncated at n = 2");
  if (n == 0) return wigner_surmise(x, 2);
  if (x <= 0.0) return 0.0;
  // log form: x^14 alone overflows long before the Gaussian factor underflows
  return c[n].gamma * std::exp(mus[n] * std::log(x) - c[n].kappa * x * x);
}

double missing_nnsd(double s, double phi) {
  check_phi(phi);
  if (!(s >= 0.0)) throw DomainError("spacing must be non-negative");
  const double x = s / phi;
  const double q = 1.0 - phi;
  return missing_term(0, x) + q * missing_term(1, x) + q * q * missing_term(2, x);
}

double cluster_function(double r, RmtEnsemble e) {
  if (e == RmtEnsemble::poisson) return 0.0;
  r = std::abs(r);
  const double s = boost::math::sinc_pi(kPi * r);
  if (e == RmtEnsemble::gue) return s * s;
  // GOE: s^2 + s'(r) * integral_r^inf s(t) dt
  double ds = 0.0;
  if (r < 1e-4) {
    ds = -kPi * kPi * r / 3.0;
  } else {
    const double pr = kPi * r;
    ds = (std::cos(pr) - s) / r;
  }
  const double tail = 0.5 - sine_integral(kPi * r) / kPi;
  return s * s + ds * tail;
}

double delta3_theory(double l, RmtEnsemble e) {
  if (!(l > 0.0)) throw DomainError("L must be positive");
  if (e == RmtEnsemble::poisson) return l / 15.0;
  auto f = [&](double x) {
    const double d = l - x;
    return d * d * d * (2.0 * l * l - 9.0 * x * l - 3.0 * x * x) * cluster_function(x, e);
  };
  double sum = 0.0;
  // unit pieces follow the oscillation of Y_2
  const auto pieces = static_cast<int>(std::ceil(l));
  for (int i = 0; i < pieces; ++i) {
    const double a = l * i / pieces, b = l * (i + 1) / pieces;
    sum += integrate(f, a, b, 1e-14, 8);
  }
  const double l2 = l * l;
  return l / 15.0 - sum / (15.0 * l2 * l2);
}

double delta3_missing(double l, double phi, RmtEnsemble e) {
  check_phi(phi);
  return (1.0 - phi) * l / 15.0 + phi * phi * delta3_theory(l / phi, e);
}

namespace {

// Least-squares deviation of the staircase of the levels in [a, a + l].
double window_delta3(std::span<const double> eps, double a, double l) {
  auto first = std::lower_bound(eps.begin(), eps.end(), a);
  auto last = std::upper_bound(first, eps.end(), a + l);
  double i0 = 0.0, i1 = 0.0, i2 = 0.0;
  double i = 1.0;
  for (auto it = first; it != last; ++it, i += 1.0) {
    const double x = *it - a;
    i0 += l - x;
    i1 += 0.5 * (l * l - x * x);
    i2 += (2.0 * i - 1.0) * (l - x);
  }
  const double m0 = l, m1 = 0.5 * l * l, m2 = l * l * l / 3.0;
  const double det = m2 * m0 - m1 * m1;
  const double slope = (i1 * m0 - i0 * m1) / det;
  const double shift = (m2 * i0 - m1 * i1) / det;
  return std::max(0.0, (i2 - slope * i1 - shift * i0) / l);
}

}  // namespace

Delta3Result delta3_empirical(std::span<const UnfoldedSpectrum> spectra, std::span<const double> l_values) {
  Delta3Result out;
  for (const double l : l_values) {
    if (!(l > 0.0)) throw DomainError("L must be positive");
    double sum = 0.0;
    std::size_t windows = 0;
    for (const auto& sp : spectra) {
      const auto& eps = sp.epsilons;
      if (!std::is_sorted(eps.begin(), eps.end())) throw ContractError("unfolded levels must be sorted");
      if (eps.size() < 2 || eps.back() - eps.front() < l) continue;
      const double stride = 0.25 * l;
      const double end = eps.back() - l;
      for (std::size_t w = 0;; ++w) {
        const double a = eps.front() + stride * static_cast<double>(w);
        if (a > end) break;
        sum += window_delta3(eps, a, l);
        ++windows;
      }
    }
    if (windows == 0) {
      std::ostringstream os;
      os << "L = " << l << " omitted: spectrum span is shorter than the window";
      out.diagnostics.push_back(os.str());
      continue;
    }
    out.points.push_back({l, sum / static_cast<double>(windows), windows});
  }
  return out;
}

Delta3Result delta3_empirical(const UnfoldedSpectrum& spectrum, std::span<const double> l_values) {
  return delta3_empirical(std::span<const UnfoldedSpectrum>(&spectrum, 1), l_values);
}

double observed_fraction(std::size_t observed, double weyl_expected) {
  if (!(weyl_expected > 0.0)) throw DomainError("expected level count must be positive");
  if (observed == 0) throw DomainError("no observed levels");
  return std::min(1.0, static_cast<double>(observed) / weyl_expected);
}

double l1_distance(const Histogram& h, const std::function<double(double)>& density) {
  double d = 0.0;
  for (std::size_t i = 0; i < h.density.size(); ++i) {
    const double mass = integrate(density, h.edges[i], h.edges[i + 1], 1e-12, 6);
    d += std::abs(h.density[i] * h.bin_width(i) - mass);
  }
  const double tail = integrate(density, h.edges.back(), std::numeric_limits<double>::infinity(), 1e-12, 8);
  return d + std::abs(tail);
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw ParameterError("KS distance needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

DoubletDistribution doublet_distribution(const DoubletSet& doublets, double bin_width, double s_max) {
  if (doublets.doublets.empty()) throw ParameterError("doublet distribution needs at least one doublet");
  if (!(doublets.mean_splitting_hz > 0.0)) throw DomainError("mean doublet splitting is zero");
  const auto x = doublets.normalized_splittings();
  DoubletDistribution out{density_histogram(x, bin_width, s_max),
                          ks_distance(x, [](double s) { return spacing_cdf(s, RmtEnsemble::poisson); }),
                          {}};
  if (x.size() < 100)
    out.diagnostics.push_back("fewer than 100 doublets; the KS distance is not meaningful");
  return out;
}

}  // namespace unigraph
