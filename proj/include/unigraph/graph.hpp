#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "unigraph/types.hpp"

namespace unigraph {

enum class VertexKind { coupler, tjunction, custom };

std::string_view to_string(VertexKind kind);
VertexKind vertex_kind_from_string(std::string_view name);

/// Scattering matrix of a single vertex. Row = outgoing port, column = incoming port.
struct VertexSM {
  std::string id;
  VertexKind kind = VertexKind::custom;
  CMatrix matrix;
  double reference_frequency_hz = 0.0;

  std::size_t valency() const { return static_cast<std::size_t>(matrix.rows()); }
};

/// Hybrid coupler: ports (1,2) and (3,4) form the two sides, zero diagonal blocks.
CMatrix coupler_matrix();
/// Neumann T-junction: -1/3 on the diagonal, 2/3 elsewhere.
CMatrix tjunction_matrix();
/// Neumann vertex of arbitrary valency: 2/n - delta.
CMatrix neumann_matrix(std::size_t valency);

VertexSM make_coupler(std::string id, double reference_frequency_hz = 0.0);
VertexSM make_tjunction(std::string id, double reference_frequency_hz = 0.0);
VertexSM make_custom(std::string id, CMatrix matrix, double reference_frequency_hz = 0.0);

/// Largest entry of |M^dagger M - I|.
double unitarity_defect(const CMatrix& m);

/// Zero-based (vertex index, port index) pair.
struct PortRef {
  std::size_t vertex = 0;
  std::size_t port = 0;

  friend bool operator==(const PortRef&, const PortRef&) = default;
};

/// The forward orientation of an edge runs from `from` to `to`.
struct Edge {
  std::string id;
  PortRef from;
  PortRef to;
  double optical_length_m = 0.0;
  std::string phase_shifter;  // empty unless the edge carries a phase shifter
};

struct Lead {
  std::string id;
  PortRef at;
};

/// Raw graph description; may violate invariants (see check_graph).
struct GraphParts {
  std::string name;
  std::vector<VertexSM> vertices;
  std::vector<Edge> edges;
  std::vector<Lead> leads;
  double dielectric_constant = 2.06;
  std::vector<std::string> notes;
};

enum class IssueKind { structure, validation };

struct Issue {
  IssueKind kind;
  std::string message;
};

inline constexpr double kUnitarityTolerance = 1e-12;

/// Runs every graph invariant and returns all violations (empty = valid).
std::vector<Issue> check_graph(const GraphParts& parts);
std::vector<Issue> check_vertex(const VertexSM& vertex);

/// Validated, immutable quantum graph.
class GraphSpec {
 public:
  /// Throws StructureError or ValidationError for the first violated invariant.
  explicit GraphSpec(GraphParts parts);

  const std::string& name() const { return parts_.name; }
  const std::vector<VertexSM>& vertices() const { return parts_.vertices; }
  const std::vector<Edge>& edges() const { return parts_.edges; }
  const std::vector<Lead>& leads() const { return parts_.leads; }
  const std::vector<std::string>& notes() const { return parts_.notes; }
  double dielectric_constant() const { return parts_.dielectric_constant; }
  const GraphParts& parts() const { return parts_; }

  std::size_t edge_count() const { return parts_.edges.size(); }
  bool is_closed() const { return parts_.leads.empty(); }
  double total_optical_length() const;
  std::vector<double> edge_lengths() const;

  std::size_t vertex_index(std::string_view id) const;
  std::size_t edge_index(std::string_view id) const;
  /// Edges carrying a phase shifter, in edge order.
  std::vector<std::size_t> phase_shifter_edges() const;

  /// Same topology with new optical lengths (validated).
  GraphSpec with_edge_lengths(std::span<const double> lengths) const;

 private:
  GraphParts parts_;
};

/// Physical cable length for an optical length, l_ph = l_opt / sqrt(eps).
double physical_length(double optical_length_m, double dielectric_constant);

}  // namespace unigraph
