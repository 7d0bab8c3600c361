#pragma once

#include <cstddef>

#include "unigraph/graph.hpp"
#include "unigraph/types.hpp"

namespace unigraph {

/// Directed bond: edge traversed forward (from -> to) or reversed.
struct DirectedBond {
  std::size_t edge = 0;
  bool reversed = false;

  friend bool operator==(const DirectedBond&, const DirectedBond&) = default;
};

/// Bond b < N is edge b forward; bond N + b is edge b reversed.
class BondIndex {
 public:
  explicit BondIndex(std::size_t edge_count) : edges_(edge_count) {}

  std::size_t size() const { return 2 * edges_; }
  std::size_t edge_count() const { return edges_; }
  std::size_t index(DirectedBond b) const { return b.edge + (b.reversed ? edges_ : 0); }
  DirectedBond bond(std::size_t i) const { return {i % edges_, i >= edges_}; }

 private:
  std::size_t edges_;
};

/// S_G(out, in): amplitude leaving along `out` per unit amplitude arriving along `in`.
struct BondScatteringMatrix {
  CMatrix matrix;
  BondIndex bond_index{0};
};

/// Lead channels partitioned out of the full channel space at leaded vertices.
struct LeadCoupling {
  CMatrix lead_lead;      // leads x leads
  CMatrix lead_internal;  // leads x 2N, fed by bonds arriving at the vertex
  CMatrix internal_lead;  // 2N x leads, feeding bonds leaving the vertex
};

BondScatteringMatrix build_bond_scattering(const GraphSpec& graph);
LeadCoupling build_lead_coupling(const GraphSpec& graph);

/// Diagonal of L(k): exp(i k l_j) for forward bonds, then the same for reversed bonds.
struct PhaseMatrix {
  cplx k;
  CVector diagonal;
};

PhaseMatrix phase_matrix(cplx k, const GraphSpec& graph);

/// Lengths per directed bond in BondIndex order.
RVector bond_lengths(const GraphSpec& graph);

/// Smallest eigenvalue of I - S^dagger S (>= 0 for sub-unitary S).
double min_eigenvalue_of_loss(const CMatrix& s);

}  // namespace unigraph
