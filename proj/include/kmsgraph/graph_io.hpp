#pragma once

#include <string>
#include <string_view>

#include "kmsgraph/kgraph.hpp"

namespace kms {

/// Parse a graph document:
///
///   { "rank": k, "vertices": [id...],
///     "edges":   [{"id", "color", "src", "dst"}...],
///     "squares": [{"f", "g", "g2", "f2"}...] }
///
/// Ids may be strings or integers. Syntax errors carry line/column; reference
/// errors carry the JSON pointer of the offending value in the message.
KGraphSpec parse_kgraph(std::string_view text);

KGraphSpec parse_kgraph_file(const std::string& path);

/// Re-emit a validated graph in the document format (pretty-printed JSON).
std::string export_kgraph(const KGraph& graph);

/// Graphviz rendering of the skeleton: one edge per graph edge, labelled by
/// edge id and carrying the colour index as attribute.
std::string export_dot(const KGraph& graph);

}  // namespace kms
