#include "unigraph/bond_scattering.hpp"

#include <optional>
#include <vector>

#include "unigraph/errors.hpp"

namespace unigraph {

namespace {

// What is attached to a vertex port: the bonds leaving and arriving through it, or a lead.
struct PortUse {
  std::optional<std::size_t> outgoing;
  std::optional<std::size_t> incoming;
  std::optional<std::size_t> lead;
};

std::vector<std::vector<PortUse>> port_table(const GraphSpec& g) {
  const BondIndex idx(g.edge_count());
  std::vector<std::vector<PortUse>> table(g.vertices().size());
  for (std::size_t v = 0; v < table.size(); ++v) table[v].resize(g.vertices()[v].valency());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& edge = g.edges()[e];
    auto& from = table[edge.from.vertex][edge.from.port];
    auto& to = table[edge.to.vertex][edge.to.port];
    from.outgoing = idx.index({e, false});
    from.incoming = idx.index({e, true});
    to.incoming = idx.index({e, false});
    to.outgoing = idx.index({e, true});
  }
  for (std::size_t l = 0; l < g.leads().size(); ++l) {
    const auto& at = g.leads()[l].at;
    table[at.vertex][at.port].lead = l;
  }
  for (std::size_t v = 0; v < table.size(); ++v)
    for (std::size_t p = 0; p < table[v].size(); ++p) {
      const auto& use = table[v][p];
      if (use.lead.has_value() == use.outgoing.has_value())
        throw StructureError("inconsistent wiring at vertex " + g.vertices()[v].id + " port " +
                             std::to_string(p + 1));
    }
  return table;
}

}  // namespace

BondScatteringMatrix build_bond_scattering(const GraphSpec& g) {
  const BondIndex idx(g.edge_count());
  const auto n = static_cast<Eigen::Index>(idx.size());
  BondScatteringMatrix out{CMatrix::Zero(n, n), idx};
  const auto table = port_table(g);
  for (std::size_t v = 0; v < table.size(); ++v) {
    const auto& sigma = g.vertices()[v].matrix;
    for (std::size_t po = 0; po < table[v].size(); ++po) {
      if (!table[v][po].outgoing) continue;
      for (std::size_t pi = 0; pi < table[v].size(); ++pi) {
        if (!table[v][pi].incoming) continue;
        out.matrix(static_cast<Eigen::Index>(*table[v][po].outgoing),
                   static_cast<Eigen::Index>(*table[v][pi].incoming)) +=
            sigma(static_cast<Eigen::Index>(po), static_cast<Eigen::Index>(pi));
      }
    }
  }
  return out;
}

LeadCoupling build_lead_coupling(const GraphSpec& g) {
  const BondIndex idx(g.edge_count());
  const auto n = static_cast<Eigen::Index>(idx.size());
  const auto m = static_cast<Eigen::Index>(g.leads().size());
  LeadCoupling c{CMatrix::Zero(m, m), CMatrix::Zero(m, n), CMatrix::Zero(n, m)};
  const auto table = port_table(g);
  for (std::size_t v = 0; v < table.size(); ++v) {
    const auto& sigma = g.vertices()[v].matrix;
    for (std::size_t po = 0; po < table[v].size(); ++po) {
      for (std::size_t pi = 0; pi < table[v].size(); ++pi) {
        const auto& o = table[v][po];
        const auto& i = table[v][pi];
        const cplx s = sigma(static_cast<Eigen::Index>(po), static_cast<Eigen::Index>(pi));
        if (o.lead && i.lead) {
          c.lead_lead(static_cast<Eigen::Index>(*o.lead), static_cast<Eigen::Index>(*i.lead)) += s;
        } else if (o.lead && i.incoming) {
          c.lead_internal(static_cast<Eigen::Index>(*o.lead), static_cast<Eigen::Index>(*i.incoming)) += s;
        } else if (o.outgoing && i.lead) {
          c.internal_lead(static_cast<Eigen::Index>(*o.outgoing), static_cast<Eigen::Index>(*i.lead)) += s;
        }
      }
    }
  }
  return c;
}

RVector bond_lengths(const GraphSpec& g) {
  const auto n = static_cast<Eigen::Index>(g.edge_count());
  RVector l(2 * n);
  for (Eigen::Index e = 0; e < n; ++e) {
    l(e) = g.edges()[static_cast<std::size_t>(e)].optical_length_m;
    l(e + n) = l(e);
  }
  return l;
}

PhaseMatrix phase_matrix(cplx k, const GraphSpec& g) {
  const RVector l = bond_lengths(g);
  const cplx ik = cplx(0.0, 1.0) * k;
  return {k, (ik * l.cast<cplx>().array()).exp().matrix()};
}

double min_eigenvalue_of_loss(const CMatrix& s) {
  const CMatrix loss = CMatrix::Identity(s.rows(), s.cols()) - s.adjoint() * s;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(loss, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace unigraph
