#include "unigraph/graph_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "unigraph/errors.hpp"

namespace unigraph {

namespace {

using nlohmann::json;

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

template <typename T>
T required(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    throw ParseError(where + ": missing key '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(where + ": bad value for '" + key + "': " + e.what());
  }
}

CMatrix parse_matrix(const json& rows, const std::string& where) {
  if (!rows.is_array() || rows.empty()) throw ParseError(where + ": matrix must be a non-empty array");
  const auto n = static_cast<Eigen::Index>(rows.size());
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      throw ParseError(where + ": matrix must be square");
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& z = row[static_cast<std::size_t>(j)];
      if (z.is_number()) {
        m(i, j) = cplx(z.get<double>(), 0.0);
      } else if (z.is_array() && z.size() == 2) {
        m(i, j) = cplx(z[0].get<double>(), z[1].get<double>());
      } else {
        throw ParseError(where + ": matrix entries must be [re, im] pairs");
      }
    }
  }
  return m;
}

PortRef parse_port(const json& obj, const std::vector<VertexSM>& vertices, const std::string& where) {
  const auto id = required<std::string>(obj, "vertex", where);
  const auto port = required<long long>(obj, "port", where);
  std::size_t v = vertices.size();
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i].id == id) v = i;
  if (v == vertices.size()) throw ParseError(where + ": unknown vertex '" + id + "'");
  if (port < 1) throw ParseError(where + ": ports are numbered from 1");
  return {v, static_cast<std::size_t>(port - 1)};
}

json port_json(const GraphParts& parts, const PortRef& p) {
  return {{"vertex", parts.vertices.at(p.vertex).id}, {"port", p.port + 1}};
}

}  // namespace

GraphParts parse_graph_parts(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("JSON parse error at " + line_col(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError("graph file must contain a JSON object");

  GraphParts parts;
  parts.name = doc.value("name", std::string{});
  parts.dielectric_constant = doc.value("dielectric_constant", 2.06);
  if (doc.contains("notes"))
    for (const auto& n : doc["notes"]) parts.notes.push_back(n.get<std::string>());

  if (!doc.contains("vertices") || !doc["vertices"].is_array())
    throw ParseError("missing 'vertices' array");
  for (std::size_t i = 0; i < doc["vertices"].size(); ++i) {
    const auto& v = doc["vertices"][i];
    const std::string where = "vertices[" + std::to_string(i) + "]";
    VertexSM vertex;
    vertex.id = required<std::string>(v, "id", where);
    vertex.kind = vertex_kind_from_string(required<std::string>(v, "kind", where));
    vertex.reference_frequency_hz = v.value("reference_frequency_hz", 0.0);
    if (v.contains("matrix")) {
      vertex.matrix = parse_matrix(v["matrix"], where);
    } else if (vertex.kind == VertexKind::coupler) {
      vertex.matrix = coupler_matrix();
    } else if (vertex.kind == VertexKind::tjunction) {
      vertex.matrix = tjunction_matrix();
    } else {
      throw ParseError(where + ": custom vertices need an explicit 'matrix'");
    }
    parts.vertices.push_back(std::move(vertex));
  }

  if (!doc.contains("edges") || !doc["edges"].is_array()) throw ParseError("missing 'edges' array");
  for (std::size_t i = 0; i < doc["edges"].size(); ++i) {
    const auto& e = doc["edges"][i];
    const std::string where = "edges[" + std::to_string(i) + "]";
    Edge edge;
    edge.id = e.value("id", "e" + std::to_string(i + 1));
    if (!e.contains("from") || !e.contains("to")) throw ParseError(where + ": needs 'from' and 'to'");
    edge.from = parse_port(e["from"], parts.vertices, where + ".from");
    edge.to = parse_port(e["to"], parts.vertices, where + ".to");
    edge.optical_length_m = required<double>(e, "optical_length_m", where);
    edge.phase_shifter = e.value("phase_shifter", std::string{});
    parts.edges.push_back(std::move(edge));
  }

  if (doc.contains("leads")) {
    for (std::size_t i = 0; i < doc["leads"].size(); ++i) {
      const auto& l = doc["leads"][i];
      const std::string where = "leads[" + std::to_string(i) + "]";
      Lead lead;
      lead.id = l.value("id", "L" + std::to_string(i + 1));
      lead.at = parse_port(l, parts.vertices, where);
      parts.leads.push_back(std::move(lead));
    }
  }
  return parts;
}

GraphParts read_graph_parts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open graph file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_graph_parts(ss.str());
}

GraphSpec load_graph(const std::filesystem::path& path) { return GraphSpec(read_graph_parts(path)); }

std::string graph_to_json(const GraphParts& parts, int indent) {
  json doc;
  doc["name"] = parts.name;
  if (!parts.notes.empty()) doc["notes"] = parts.notes;
  doc["dielectric_constant"] = parts.dielectric_constant;
  doc["vertices"] = json::array();
  for (const auto& v : parts.vertices) {
    json jv{{"id", v.id}, {"kind", std::string(to_string(v.kind))},
            {"reference_frequency_hz", v.reference_frequency_hz}};
    const bool standard = (v.kind == VertexKind::coupler && v.matrix.isApprox(coupler_matrix(), 0.0)) ||
                          (v.kind == VertexKind::tjunction && v.matrix == tjunction_matrix());
    if (!standard) {
      json rows = json::array();
      for (Eigen::Index i = 0; i < v.matrix.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < v.matrix.cols(); ++j)
          row.push_back({v.matrix(i, j).real(), v.matrix(i, j).imag()});
        rows.push_back(row);
      }
      jv["matrix"] = rows;
    }
    doc["vertices"].push_back(jv);
  }
  doc["edges"] = json::array();
  for (const auto& e : parts.edges) {
    json je{{"id", e.id}, {"from", port_json(parts, e.from)}, {"to", port_json(parts, e.to)},
            {"optical_length_m", e.optical_length_m}};
    if (!e.phase_shifter.empty()) je["phase_shifter"] = e.phase_shifter;
    doc["edges"].push_back(je);
  }
  doc["leads"] = json::array();
  for (const auto& l : parts.leads) {
    json jl = port_json(parts, l.at);
    jl["id"] = l.id;
    doc["leads"].push_back(jl);
  }
  return doc.dump(indent);
}

}  // namespace unigraph
