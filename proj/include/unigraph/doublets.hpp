#pragma once

#include <vector>

#include "unigraph/secular.hpp"

namespace unigraph {

struct Doublet {
  double nu_low_hz;
  double nu_high_hz;
  double splitting_hz;
};

struct DoubletSet {
  std::vector<Doublet> doublets;  // ordered by nu_low
  std::vector<double> unpaired;
  /// Resonances left over from a cluster of three or more within the threshold.
  std::vector<double> flagged;
  double mean_splitting_hz = 0.0;

  /// Splittings divided by their mean (mean exactly 1 up to rounding).
  std::vector<double> normalized_splittings() const;
};

/// Pairs consecutive resonances closer than config.pair_threshold_hz, smallest gap first.
DoubletSet pair_doublets(const SpectrumResult& spectrum, const SolverConfig& config);

/// Pools the doublets of several realizations (mean recomputed over the union).
DoubletSet pool_doublets(const std::vector<DoubletSet>& sets);

/// Replaces every cluster whose consecutive gaps are below `resolution_hz` by one
/// resonance at the cluster's mean frequency (mean width).
SpectrumResult merge_unresolved(const SpectrumResult& spectrum, double resolution_hz);

}  // namespace unigraph
