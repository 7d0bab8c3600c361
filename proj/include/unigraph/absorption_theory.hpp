#pragma once

namespace unigraph {

/// P_0(x), x >= 1, for absorption strength gamma and symmetry index beta (alpha = gamma beta / 2).
double theory_p0(double x, double gamma, int beta = 2);

/// Reflection-coefficient density P(R) = 2/(1-R)^2 P_0((1+R)/(1-R)) on [0, 1); 0 at R = 1.
double theory_p_r(double r, double gamma, int beta = 2);

/// <R> = integral of R P(R) over [0, 1].
double mean_reflection(double gamma, int beta = 2);

/// Density of v = Im K_ii (local density of states), beta = 2, v > 0.
double theory_p_v(double v, double gamma);

/// Inverts mean_reflection over gamma in [1e-3, 1e3] (monotone decreasing).
double fit_gamma(double mean_r, int beta = 2);

/// Imaginary part of the K-matrix diagonal for a diagonal S element,
/// v = Im[i (1 - S)/(1 + S)] = (1 - |S|^2) / |1 + S|^2. Throws DomainError at S = -1.
double wigner_v(double s_re, double s_im);

struct EnhancementLimits {
  double strong_absorption;  // 2 / beta
  double weak_absorption;    // 2 / beta + 1
};

EnhancementLimits enhancement_limits(int beta);

}  // namespace unigraph
