#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "unigraph/graph.hpp"

namespace unigraph {

/// Phase-shifter ensemble at fixed total length: realization r moves delta_r from
/// edge_b to edge_a (l_a + delta, l_b - delta) with delta ~ U[-delta_max, delta_max].
/// Deterministic in `seed` on every platform (mt19937_64 + 53-bit mantissa draw).
std::vector<GraphSpec> generate_ensemble(const GraphSpec& graph, std::size_t edge_a, std::size_t edge_b,
                                         std::size_t count, double delta_max_m, std::uint64_t seed);

/// The shift drawn for each realization, same stream as generate_ensemble.
std::vector<double> ensemble_shifts(std::size_t count, double delta_max_m, std::uint64_t seed);

}  // namespace unigraph
