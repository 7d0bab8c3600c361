#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "unigraph/doublets.hpp"

namespace unigraph {

enum class RmtEnsemble { poisson, goe, gue };

std::string_view to_string(RmtEnsemble e);
RmtEnsemble rmt_ensemble_from_string(std::string_view name);

struct UnfoldedSpectrum {
  std::vector<double> epsilons;
  std::string source;  // "singlets" or "full"
  int unfold_factor = 1;

  std::vector<double> spacings() const;
  double mean_spacing() const;
};

/// epsilon_i = factor * L_tot * nu_i / c. Throws ContractError for unsorted input.
UnfoldedSpectrum unfold(std::span<const double> frequencies_hz, double total_length_m, int factor,
                        std::string source = "full");

/// Density histogram on [0, edges.back()].
struct Histogram {
  std::vector<double> edges;
  std::vector<double> density;
  std::size_t samples = 0;

  double bin_width(std::size_t i) const { return edges[i + 1] - edges[i]; }
  double center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
  double area() const;
};

/// Density-normalized histogram with uniform bins over [0, s_max]; s_max grows in
/// whole bins until every sample is covered.
Histogram density_histogram(std::span<const double> samples, double bin_width, double s_max = 4.0);

Histogram nnsd(const UnfoldedSpectrum& spectrum, double bin_width = 0.2, double s_max = 4.0);
/// Pooled spacings of several unfolded spectra.
Histogram nnsd(std::span<const UnfoldedSpectrum> spectra, double bin_width = 0.2, double s_max = 4.0);

/// Wigner surmise: beta 2 (32/pi^2) s^2 exp(-4 s^2/pi), beta 1 (pi/2) s exp(-pi s^2/4).
double wigner_surmise(double s, int beta);
double poisson_spacing(double s);
double spacing_density(double s, RmtEnsemble e);
double spacing_cdf(double s, RmtEnsemble e);

struct NormConstants {
  double gamma;
  double kappa;
};

/// Constants of p(n, x) = gamma x^mu exp(-kappa x^2) with unit area and mean n + 1.
NormConstants norm_constants(int n, int mu);

/// p(n, x) for the missing-level series (n = 0: GUE surmise, mu = 2; n = 1: mu = 7; n = 2: mu = 14).
double missing_term(int n, double x);

/// P(s) = sum_{n=0}^{2} (1 - phi)^n p(n, s/phi).
double missing_nnsd(double s, double phi);

/// Two-point cluster function Y_2(r); zero for Poisson.
double cluster_function(double r, RmtEnsemble e);

double delta3_theory(double l, RmtEnsemble e);
/// (1 - phi) L/15 + phi^2 Delta_3(L/phi).
double delta3_missing(double l, double phi, RmtEnsemble e);

struct Delta3Point {
  double l;
  double value;
  std::size_t windows;
};

struct Delta3Result {
  std::vector<Delta3Point> points;
  std::vector<std::string> diagnostics;
};

/// Least-squares staircase deviation averaged over windows [a, a + L] whose start
/// advances by L/4 from the first level. L values wider than the spectrum are omitted.
Delta3Result delta3_empirical(const UnfoldedSpectrum& spectrum, std::span<const double> l_values);
/// Window averages pooled over several spectra.
Delta3Result delta3_empirical(std::span<const UnfoldedSpectrum> spectra, std::span<const double> l_values);

/// Fraction of observed levels: observed / Weyl count, capped at 1.
double observed_fraction(std::size_t observed, double weyl_expected);

/// L1 distance between a histogram and the bin averages of a reference density.
double l1_distance(const Histogram& h, const std::function<double(double)>& density);
/// Kolmogorov-Smirnov statistic of samples against a CDF.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

struct DoubletDistribution {
  Histogram histogram;
  double ks_exponential;
  std::vector<std::string> diagnostics;
};

/// Splittings normalized to mean 1, histogram and KS distance to exp(-Delta).
DoubletDistribution doublet_distribution(const DoubletSet& doublets, double bin_width = 0.2,
                                         double s_max = 4.0);

}  // namespace unigraph
