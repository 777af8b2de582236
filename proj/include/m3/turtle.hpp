#pragma once

#include <string>
#include <string_view>

#include "m3/graph.hpp"

namespace m3 {

enum class RdfFormat { Turtle, NTriples };

/// Parses the Turtle subset documented in docs/formats.md: @prefix
/// declarations, prefixed names, absolute IRIs, 'a', quoted literals with
/// datatype or language tag, blank node labels, ';' and ',' lists, and '#'
/// line comments. N-Triples documents parse with the same entry point.
/// Throws SyntaxError / UnknownPrefixError.
Graph parse_turtle(std::string_view text);

/// Serializes deterministically (prefixes, then subjects in term order).
/// Output reparses to a graph isomorphic to the input.
std::string serialize(const Graph& graph, RdfFormat format);

} // namespace m3
