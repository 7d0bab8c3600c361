#pragma once

#include "unigraph/graph.hpp"

namespace unigraph {

/// Moves a Neumann-type vertex matrix from its reference frequency nu0 to nu:
///   sigma(nu) = [(nu + nu0) sigma0 + (nu - nu0) I] [(nu + nu0) I + (nu - nu0) sigma0]^{-1}.
/// Hermitian unitary matrices (sigma0^2 = I) are fixed points. Throws NumericError
/// when the denominator is singular.
VertexSM transform_vertex_sm(const VertexSM& vertex, double nu_hz, double nu0_hz);

}  // namespace unigraph
