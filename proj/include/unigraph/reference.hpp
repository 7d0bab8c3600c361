#pragma once

#include <cstddef>
#include <vector>

#include "unigraph/types.hpp"

namespace unigraph {

/// One entry where the tabulated reference matrix disagrees with a unitary S_G.
struct ReferenceErratum {
  std::size_t row;  // zero-based
  std::size_t col;
  double tabulated;
  double corrected;
};

/// 24x24 bond-scattering matrix of the gamma network exactly as tabulated
/// (forward bonds 0..11, reversed bonds 12..23). Rows 4 and 11 are identical
/// in this table, so it is not unitary.
CMatrix gamma_reference_matrix_tabulated();

/// Sign corrections that restore unitarity; the reversed-bond block fixes each sign
/// because S_G restricted to reversed bonds is the transpose of the forward block.
std::vector<ReferenceErratum> gamma_reference_errata();

/// Tabulated matrix with the errata applied; this is what build_bond_scattering
/// must reproduce for data/gamma.json.
CMatrix gamma_reference_matrix();

}  // namespace unigraph
