#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace unigraph {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Vacuum wavenumber (1/m) for a frequency in Hz; lengths are optical lengths.
inline constexpr double wavenumber(double nu_hz) { return kTwoPi * nu_hz / kSpeedOfLight; }
inline constexpr double frequency(double k) { return k * kSpeedOfLight / kTwoPi; }

/// Closed frequency interval [lo_hz, hi_hz].
struct Band {
  double lo_hz = 0.0;
  double hi_hz = 0.0;

  double width() const { return hi_hz - lo_hz; }
  bool contains(double nu) const { return nu >= lo_hz && nu <= hi_hz; }
};

}  // namespace unigraph
