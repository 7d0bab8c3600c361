#include "unigraph/absorption_theory.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "unigraph/errors.hpp"

namespace unigraph {

namespace {

using boost::math::quadrature::gauss_kronrod;

void check_beta(int beta) {
  if (beta != 1 && beta != 2) throw DomainError("beta must be 1 or 2");
}

void check_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("absorption strength must be positive");
}

// (1 + a) e^{-a} - 1 without cancellation at small a.
double b_factor(double a) {
  if (a < 0.1) {
    double term = 1.0, sum = 0.0;
    for (int n = 1; n <= 14; ++n) {
      term *= -a / n;  // (-a)^n / n!
      sum += (1.0 - n) * term;
    }
    return sum;
  }
  return (1.0 + a) * std::exp(-a) - 1.0;
}

// P_0 written through t = alpha (x - 1) / 2 so that nothing overflows for large alpha.
double p0_of_t(double t, double alpha, int beta) {
  const double u = t + alpha;
  const double a_part = -std::expm1(-alpha) * (beta == 2 ? u : std::sqrt(u));
  return 0.5 * std::exp(-t) * (a_part + b_factor(alpha));
}

}  // namespace

double theory_p0(double x, double gamma, int beta) {
  check_beta(beta);
  check_gamma(gamma);
  if (!(x >= 1.0)) throw DomainError("P_0 is supported on x >= 1");
  if (std::isinf(x)) return 0.0;
  const double alpha = 0.5 * gamma * beta;
  return p0_of_t(0.5 * alpha * (x - 1.0), alpha, beta);
}

double theory_p_r(double r, double gamma, int beta) {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("reflection coefficient must lie in [0, 1]");
  if (r == 1.0) return 0.0;
  const double x = (1.0 + r) / (1.0 - r);
  return 2.0 / ((1.0 - r) * (1.0 - r)) * theory_p0(x, gamma, beta);
}

double mean_reflection(double gamma, int beta) {
  check_beta(beta);
  check_gamma(gamma);
  const double alpha = 0.5 * gamma * beta;
  // R = t / (t + alpha), dx = 2 dt / alpha
  auto f = [&](double t) { return t / (t + alpha) * p0_of_t(t, alpha, beta); };
  const double inf = std::numeric_limits<double>::infinity();
  double err = 0.0;
  const double near = gauss_kronrod<double, 61>::integrate(f, 0.0, alpha, 15, 1e-14, &err);
  const double far = gauss_kronrod<double, 61>::integrate(f, alpha, inf, 15, 1e-14, &err);
  return 2.0 / alpha * (near + far);
}

double theory_p_v(double v, double gamma) {
  if (!(v > 0.0)) throw DomainError("P(v) is defined for v > 0");
  check_gamma(gamma);
  if (std::isinf(v)) return 0.0;
  const double alpha = gamma;  // beta = 2
  const double c = 0.5 * (v + 1.0 / v);
  auto f = [&](double q) { return p0_of_t(0.5 * alpha * (q * q + c - 1.0), alpha, 2); };

  // truncate where the integrand has fallen below 1e-16 of its peak
  double q_max = std::sqrt(2.0 * 40.0 / alpha);
  double peak = 0.0;
  for (int i = 0; i <= 64; ++i) peak = std::max(peak, f(q_max * i / 64.0));
  if (!(peak > 0.0)) return 0.0;
  while (f(q_max) > 1e-16 * peak) q_max *= 1.25;

  double err = 0.0;
  const double inner = gauss_kronrod<double, 31>::integrate(f, 0.0, q_max, 20, 1e-13, &err);
  return std::numbers::sqrt2 / (std::numbers::pi * std::pow(v, 1.5)) * inner;
}

double fit_gamma(double mean_r, int beta) {
  check_beta(beta);
  constexpr double lo = 1e-3, hi = 1e3;
  const double r_lo = mean_reflection(lo, beta);  // weakest absorption, largest <R>
  const double r_hi = mean_reflection(hi, beta);
  if (!(mean_r < r_lo && mean_r > r_hi))
    throw DomainError("mean reflection " + std::to_string(mean_r) +
                      " is outside the range attainable for gamma in [1e-3, 1e3]");
  auto f = [&](double g) { return mean_reflection(g, beta) - mean_r; };
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, r_lo - mean_r, r_hi - mean_r,
                                                        boost::math::tools::eps_tolerance<double>(45), iters);
  return 0.5 * (a + b);
}

double wigner_v(double s_re, double s_im) {
  const double den = (1.0 + s_re) * (1.0 + s_re) + s_im * s_im;
  if (den == 0.0) throw DomainError("S = -1 is a pole of the K matrix");
  return (1.0 - (s_re * s_re + s_im * s_im)) / den;
}

EnhancementLimits enhancement_limits(int beta) {
  check_beta(beta);
  return {2.0 / beta, 2.0 / beta + 1.0};
}

}  // namespace unigraph
