#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "unigraph/graph.hpp"
#include "unigraph/graph_io.hpp"

namespace fixtures {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(UNIGRAPH_TEST_DATA_DIR) / name;
}

inline const unigraph::GraphSpec& gamma() {
  static const unigraph::GraphSpec g = unigraph::load_graph(data_path("gamma.json"));
  return g;
}

inline const unigraph::GraphSpec& gamma_prime() {
  static const unigraph::GraphSpec g = unigraph::load_graph(data_path("gamma_prime.json"));
  return g;
}

/// One valency-2 Neumann vertex whose two ports are joined by a single edge.
inline unigraph::GraphSpec circle(double length) {
  unigraph::GraphParts p;
  p.name = "circle";
  p.vertices.push_back(unigraph::make_custom("A", unigraph::neumann_matrix(2)));
  p.edges.push_back({"e", {0, 0}, {0, 1}, length, ""});
  return unigraph::GraphSpec(std::move(p));
}

/// Lead into a valency-2 Neumann vertex, one edge of `length` ending in a Neumann dead end.
inline unigraph::GraphSpec stub(double length) {
  unigraph::GraphParts p;
  p.name = "stub";
  p.vertices.push_back(unigraph::make_custom("A", unigraph::neumann_matrix(2)));
  p.vertices.push_back(unigraph::make_custom("B", unigraph::neumann_matrix(1)));
  p.edges.push_back({"e", {0, 1}, {1, 0}, length, ""});
  p.leads.push_back({"L", {0, 0}});
  return unigraph::GraphSpec(std::move(p));
}

/// Haar-ish random unitary from the QR decomposition of a complex Gaussian matrix.
inline unigraph::CMatrix random_unitary(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  unigraph::CMatrix z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = {g(rng), g(rng)};
  Eigen::HouseholderQR<unigraph::CMatrix> qr(z);
  unigraph::CMatrix q = qr.householderQ();
  const unigraph::CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
  return q;
}

}  // namespace fixtures
