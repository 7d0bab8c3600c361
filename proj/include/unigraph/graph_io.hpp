#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "unigraph/graph.hpp"

namespace unigraph {

/// Parses the JSON graph format. Ports are 1-based in the file, 0-based in memory.
/// Throws ParseError with line/column on malformed JSON or missing keys; invariants
/// are NOT checked here (see check_graph / GraphSpec).
GraphParts parse_graph_parts(std::string_view json_text);
GraphParts read_graph_parts(const std::filesystem::path& path);

/// Parse and validate in one step.
GraphSpec load_graph(const std::filesystem::path& path);

std::string graph_to_json(const GraphParts& parts, int indent = 2);

}  // namespace unigraph
