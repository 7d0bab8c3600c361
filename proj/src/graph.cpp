#include "unigraph/graph.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "unigraph/errors.hpp"

namespace unigraph {

std::string_view to_string(VertexKind kind) {
  switch (kind) {
    case VertexKind::coupler:
      return "coupler";
    case VertexKind::tjunction:
      return "tjunction";
    case VertexKind::custom:
      return "custom";
  }
  return "custom";
}

VertexKind vertex_kind_from_string(std::string_view name) {
  if (name == "coupler") return VertexKind::coupler;
  if (name == "tjunction") return VertexKind::tjunction;
  if (name == "custom") return VertexKind::custom;
  throw ParseError("unknown vertex kind '" + std::string(name) + "'");
}

CMatrix coupler_matrix() {
  const double h = 1.0 / std::sqrt(2.0);
  CMatrix m(4, 4);
  m << 0, 0, h, h,
       0, 0, -h, h,
       h, -h, 0, 0,
       h, h, 0, 0;
  return m;
}

CMatrix tjunction_matrix() { return neumann_matrix(3); }

CMatrix neumann_matrix(std::size_t valency) {
  if (valency == 0) throw ParameterError("Neumann vertex needs at least one port");
  const auto n = static_cast<Eigen::Index>(valency);
  CMatrix m = CMatrix::Constant(n, n, cplx(2.0 / static_cast<double>(valency), 0.0));
  m.diagonal().array() -= 1.0;
  return m;
}

VertexSM make_coupler(std::string id, double reference_frequency_hz) {
  return {std::move(id), VertexKind::coupler, coupler_matrix(), reference_frequency_hz};
}

VertexSM make_tjunction(std::string id, double reference_frequency_hz) {
  return {std::move(id), VertexKind::tjunction, tjunction_matrix(), reference_frequency_hz};
}

VertexSM make_custom(std::string id, CMatrix matrix, double reference_frequency_hz) {
  return {std::move(id), VertexKind::custom, std::move(matrix), reference_frequency_hz};
}

double unitarity_defect(const CMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  const CMatrix d = m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols());
  return d.cwiseAbs().maxCoeff();
}

namespace {

// Equal to the reference coupler after some relabeling of rows and of columns.
bool matches_coupler_up_to_permutation(const CMatrix& m) {
  const CMatrix ref = coupler_matrix();
  std::array<int, 4> rows{0, 1, 2, 3};
  do {
    std::array<int, 4> cols{0, 1, 2, 3};
    do {
      bool same = true;
      for (int i = 0; i < 4 && same; ++i)
        for (int j = 0; j < 4 && same; ++j)
          same = std::abs(m(rows[i], cols[j]) - ref(i, j)) < kUnitarityTolerance;
      if (same) return true;
    } while (std::next_permutation(cols.begin(), cols.end()));
  } while (std::next_permutation(rows.begin(), rows.end()));
  return false;
}

std::string port_name(const GraphParts& parts, const PortRef& p) {
  std::ostringstream os;
  if (p.vertex < parts.vertices.size())
    os << parts.vertices[p.vertex].id;
  else
    os << "#" << p.vertex;
  os << ":" << (p.port + 1);
  return os.str();
}

}  // namespace

std::vector<Issue> check_vertex(const VertexSM& v) {
  std::vector<Issue> issues;
  auto fail = [&](IssueKind kind, const std::string& msg) {
    issues.push_back({kind, "vertex " + v.id + ": " + msg});
  };
  if (v.matrix.rows() == 0 || v.matrix.rows() != v.matrix.cols()) {
    fail(IssueKind::validation, "scattering matrix must be square and non-empty");
    return issues;
  }
  if (!v.matrix.allFinite()) {
    fail(IssueKind::validation, "scattering matrix has non-finite entries");
    return issues;
  }
  const double defect = unitarity_defect(v.matrix);
  if (!(defect < kUnitarityTolerance)) {
    std::ostringstream os;
    os << "scattering matrix is not unitary (max |s^dagger s - I| = " << defect << ")";
    fail(IssueKind::validation, os.str());
  }
  switch (v.kind) {
    case VertexKind::coupler: {
      if (v.valency() != 4) {
        fail(IssueKind::validation, "coupler must have valency 4");
        break;
      }
      const double block = std::max(v.matrix.topLeftCorner(2, 2).cwiseAbs().maxCoeff(),
                                    v.matrix.bottomRightCorner(2, 2).cwiseAbs().maxCoeff());
      if (block != 0.0) fail(IssueKind::validation, "coupler diagonal 2x2 blocks must be zero");
      if (!matches_coupler_up_to_permutation(v.matrix))
        fail(IssueKind::validation, "coupler matrix is not a port permutation of the hybrid coupler");
      break;
    }
    case VertexKind::tjunction: {
      if (v.valency() != 3) {
        fail(IssueKind::validation, "T-junction must have valency 3");
        break;
      }
      if ((v.matrix - tjunction_matrix()).cwiseAbs().maxCoeff() >= kUnitarityTolerance)
        fail(IssueKind::validation, "T-junction matrix must be the Neumann matrix (-1/3 diagonal, 2/3 off-diagonal)");
      break;
    }
    case VertexKind::custom:
      break;
  }
  if (!(v.reference_frequency_hz >= 0.0))
    fail(IssueKind::validation, "reference frequency must be non-negative");
  return issues;
}

std::vector<Issue> check_graph(const GraphParts& parts) {
  std::vector<Issue> issues;
  for (const auto& v : parts.vertices) {
    auto vi = check_vertex(v);
    issues.insert(issues.end(), vi.begin(), vi.end());
  }
  for (std::size_t i = 0; i < parts.vertices.size(); ++i)
    for (std::size_t j = i + 1; j < parts.vertices.size(); ++j)
      if (parts.vertices[i].id == parts.vertices[j].id)
        issues.push_back({IssueKind::structure, "duplicate vertex id " + parts.vertices[i].id});

  // usage count per (vertex, port)
  std::vector<std::vector<int>> used(parts.vertices.size());
  for (std::size_t i = 0; i < parts.vertices.size(); ++i) used[i].assign(parts.vertices[i].valency(), 0);

  auto claim = [&](const PortRef& p, const std::string& owner) {
    if (p.vertex >= parts.vertices.size()) {
      issues.push_back({IssueKind::structure, owner + " references an unknown vertex"});
      return;
    }
    if (p.port >= used[p.vertex].size()) {
      issues.push_back({IssueKind::structure, owner + " references port " + port_name(parts, p) +
                                                  " which does not exist"});
      return;
    }
    if (++used[p.vertex][p.port] == 2)
      issues.push_back({IssueKind::structure, "port " + port_name(parts, p) + " is used more than once"});
  };

  for (const auto& e : parts.edges) {
    claim(e.from, "edge " + e.id);
    claim(e.to, "edge " + e.id);
    if (!(e.optical_length_m > 0.0) || !std::isfinite(e.optical_length_m))
      issues.push_back({IssueKind::validation, "edge " + e.id + " must have a positive optical length"});
  }
  for (const auto& l : parts.leads) claim(l.at, "lead " + l.id);

  for (std::size_t v = 0; v < used.size(); ++v)
    for (std::size_t p = 0; p < used[v].size(); ++p)
      if (used[v][p] == 0)
        issues.push_back({IssueKind::structure, "port " + port_name(parts, {v, p}) + " is dangling"});

  if (!(parts.dielectric_constant >= 1.0))
    issues.push_back({IssueKind::validation, "dielectric constant must be >= 1"});
  return issues;
}

GraphSpec::GraphSpec(GraphParts parts) : parts_(std::move(parts)) {
  const auto issues = check_graph(parts_);
  if (issues.empty()) return;
  const auto& first = issues.front();
  if (first.kind == IssueKind::structure) throw StructureError(first.message);
  throw ValidationError(first.message);
}

double GraphSpec::total_optical_length() const {
  double sum = 0.0;
  for (const auto& e : parts_.edges) sum += e.optical_length_m;
  return sum;
}

std::vector<double> GraphSpec::edge_lengths() const {
  std::vector<double> out;
  out.reserve(parts_.edges.size());
  for (const auto& e : parts_.edges) out.push_back(e.optical_length_m);
  return out;
}

std::size_t GraphSpec::vertex_index(std::string_view id) const {
  for (std::size_t i = 0; i < parts_.vertices.size(); ++i)
    if (parts_.vertices[i].id == id) return i;
  throw StructureError("unknown vertex '" + std::string(id) + "'");
}

std::size_t GraphSpec::edge_index(std::string_view id) const {
  for (std::size_t i = 0; i < parts_.edges.size(); ++i)
    if (parts_.edges[i].id == id) return i;
  throw StructureError("unknown edge '" + std::string(id) + "'");
}

std::vector<std::size_t> GraphSpec::phase_shifter_edges() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < parts_.edges.size(); ++i)
    if (!parts_.edges[i].phase_shifter.empty()) out.push_back(i);
  return out;
}

GraphSpec GraphSpec::with_edge_lengths(std::span<const double> lengths) const {
  if (lengths.size() != parts_.edges.size())
    throw ParameterError("length vector does not match the edge count");
  GraphParts copy = parts_;
  for (std::size_t i = 0; i < lengths.size(); ++i) copy.edges[i].optical_length_m = lengths[i];
  return GraphSpec(std::move(copy));
}

double physical_length(double optical_length_m, double dielectric_constant) {
  return optical_length_m / std::sqrt(dielectric_constant);
}

}  // namespace unigraph
