#include "unigraph/ensemble.hpp"

#include <algorithm>
#include <random>

#include "unigraph/errors.hpp"

namespace unigraph {

std::vector<double> ensemble_shifts(std::size_t count, double delta_max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
    out.push_back(delta_max == 0.0 ? 0.0 : delta_max * (2.0 * u - 1.0));
  }
  return out;
}

std::vector<GraphSpec> generate_ensemble(const GraphSpec& graph, std::size_t edge_a, std::size_t edge_b,
                                         std::size_t count, double delta_max, std::uint64_t seed) {
  if (edge_a == edge_b) throw ParameterError("ensemble needs two distinct shifter edges");
  if (edge_a >= graph.edge_count() || edge_b >= graph.edge_count())
    throw ParameterError("shifter edge index out of range");
  const auto base = graph.edge_lengths();
  if (!(delta_max >= 0.0) || !(delta_max < std::min(base[edge_a], base[edge_b])))
    throw ParameterError("delta_max must lie in [0, min(l_a, l_b))");

  std::vector<GraphSpec> out;
  out.reserve(count);
  for (const double delta : ensemble_shifts(count, delta_max, seed)) {
    auto lengths = base;
    lengths[edge_a] += delta;
    lengths[edge_b] -= delta;
    out.push_back(graph.with_edge_lengths(lengths));
  }
  return out;
}

}  // namespace unigraph
