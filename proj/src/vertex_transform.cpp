#include "unigraph/vertex_transform.hpp"

#include <limits>
#include <sstream>

#include "unigraph/errors.hpp"

namespace unigraph {

VertexSM transform_vertex_sm(const VertexSM& vertex, double nu, double nu0) {
  const auto n = vertex.matrix.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix num = (nu + nu0) * vertex.matrix + (nu - nu0) * id;
  const CMatrix den = (nu + nu0) * id + (nu - nu0) * vertex.matrix;

  Eigen::JacobiSVD<CMatrix> svd(den);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(sv.size() - 1) <= 1e3 * std::numeric_limits<double>::epsilon() * sv(0)) {
    std::ostringstream os;
    os << "vertex " << vertex.id << ": singular frequency transform at nu = " << nu
       << " Hz, nu0 = " << nu0 << " Hz";
    throw NumericError(os.str());
  }
  VertexSM out = vertex;
  // num and den are polynomials in sigma0 and commute, so the side of the inverse is immaterial.
  out.matrix = den.partialPivLu().solve(num);
  out.reference_frequency_hz = nu;
  return out;
}

}  // namespace unigraph
