#pragma once

#include <istream>
#include <optional>

#include "json.hpp"

#include "ghostwalk/spacetime.hpp"

namespace ghostwalk {

/// A graph file: either the explicit form
///   {"vertices":[{"id":"u","t":0}...], "edges":[{"from":"u","to":"v","w":"1/2"}...]}
/// or the lattice shorthand
///   {"lattice":{"min":-4,"max":8,"horizon":4,"step_w":"1/2"}}.
/// Both may carry "sources":[id...] and "targets":[id...]; target keys are the
/// listing order (0, 1, ...). Vertex "t" is optional.
struct GraphSpec {
  SpacetimeGraph graph;
  std::optional<Configuration> config;
};

GraphSpec graph_spec_from_json(const nlohmann::json& doc);
GraphSpec load_graph_spec(std::istream& in);

/// Explicit form, weights as "p/q", times included.
nlohmann::json graph_to_json(const SpacetimeGraph& graph);

}  // namespace ghostwalk
