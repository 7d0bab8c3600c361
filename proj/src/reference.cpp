#include "unigraph/reference.hpp"

#include <array>
#include <cmath>
#include <utility>

namespace unigraph {

namespace {

// h = 1/sqrt(2), H = -1/sqrt(2), t = 2/3, m = -1/3
double decode(char c) {
  const double h = 1.0 / std::sqrt(2.0);
  switch (c) {
    case 'h':
      return h;
    case 'H':
      return -h;
    case 't':
      return 2.0 / 3.0;
    case 'm':
      return -1.0 / 3.0;
    default:
      return 0.0;
  }
}

using Row = std::vector<std::pair<int, char>>;

const std::array<Row, 24>& tabulated_rows() {
  static const std::array<Row, 24> rows{{
      {{10,'t'}, {12,'m'}},
      {{0,'h'}, {7,'h'}},
      {{1,'h'}, {8,'h'}},
      {{11,'t'}, {15,'m'}},
      {{6,'h'}, {9,'h'}},
      {{2,'H'}, {3,'h'}},
      {{0,'h'}, {7,'H'}},
      {{2,'h'}, {3,'h'}},
      {{4,'h'}, {5,'h'}},
      {{1,'H'}, {8,'h'}},
      {{4,'h'}, {5,'H'}},
      {{6,'h'}, {9,'h'}},
      {{13,'h'}, {18,'h'}},
      {{14,'h'}, {21,'H'}},
      {{17,'H'}, {19,'h'}},
      {{17,'h'}, {19,'h'}},
      {{20,'h'}, {22,'h'}},
      {{20,'h'}, {22,'H'}},
      {{16,'h'}, {23,'h'}},
      {{13,'h'}, {18,'H'}},
      {{14,'h'}, {21,'h'}},
      {{16,'H'}, {23,'h'}},
      {{10,'m'}, {12,'t'}},
      {{11,'m'}, {15,'t'}},  }};
  return rows;
}

}  // namespace

CMatrix gamma_reference_matrix_tabulated() {
  CMatrix m = CMatrix::Zero(24, 24);
  const auto& rows = tabulated_rows();
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto& [col, code] : rows[i]) m(static_cast<Eigen::Index>(i), col) = decode(code);
  return m;
}

std::vector<ReferenceErratum> gamma_reference_errata() {
  const double h = 1.0 / std::sqrt(2.0);
  return {{4, 9, h, -h}};
}

CMatrix gamma_reference_matrix() {
  CMatrix m = gamma_reference_matrix_tabulated();
  for (const auto& e : gamma_reference_errata())
    m(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) = e.corrected;
  return m;
}

}  // namespace unigraph
