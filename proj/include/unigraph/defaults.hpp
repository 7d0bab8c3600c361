#pragma once

#include <cstdint>

namespace unigraph::defaults {

inline constexpr double kBandLoHz = 2e9;
inline constexpr double kBandHiHz = 8e9;
inline constexpr std::uint64_t kSeed = 7;
inline constexpr int kSpectrumRealizations = 50;
inline constexpr int kScatterRealizations = 500;
inline constexpr int kEnhancementRealizations = 300;
inline constexpr double kEnhancementWindowHz = 1e9;
/// Largest length moved between the two phase-shifter edges (m).
inline constexpr double kDeltaMax = 0.1;
/// Uniform amplitude absorption (1/m); band-averaged gamma near 6.6 on the gamma network.
inline constexpr double kAbsorption = 0.1;
inline constexpr double kScatterGridStepHz = 2e6;

}  // namespace unigraph::defaults
