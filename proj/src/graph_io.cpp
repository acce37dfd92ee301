#include "ghostwalk/graph_io.hpp"

#include <stdexcept>

namespace ghostwalk {

namespace {

using nlohmann::json;

Rational weight_from_json(const json& value) {
  if (value.is_string()) return Rational::parse(value.get<std::string>());
  if (value.is_number_integer()) return Rational(value.get<long>());
  throw std::invalid_argument("graph file: weights must be \"p/q\" strings");
}

SpacetimeGraph explicit_graph(const json& doc) {
  if (!doc.contains("vertices") || !doc.at("vertices").is_array()) {
    throw std::invalid_argument("graph file: missing \"vertices\" array");
  }
  std::vector<std::string> labels;
  std::vector<int> times;
  bool any_time = false;
  bool all_times = true;
  for (const auto& v : doc.at("vertices")) {
    labels.push_back(v.at("id").get<std::string>());
    if (v.contains("t")) {
      any_time = true;
      times.push_back(v.at("t").get<int>());
    } else {
      all_times = false;
      times.push_back(0);
    }
  }
  if (any_time && !all_times) throw std::invalid_argument("graph file: give \"t\" for every vertex or for none");

  std::unordered_map<std::string, VertexId> index;
  for (std::size_t i = 0; i < labels.size(); ++i) index.emplace(labels[i], VertexId{static_cast<std::int32_t>(i)});
  auto lookup = [&](const json& id) {
    auto it = index.find(id.get<std::string>());
    if (it == index.end()) throw std::invalid_argument("graph file: edge refers to unknown vertex " + id.dump());
    return it->second;
  };

  std::vector<Edge> edges;
  if (doc.contains("edges")) {
    for (const auto& e : doc.at("edges")) {
      edges.push_back({lookup(e.at("from")), lookup(e.at("to")), weight_from_json(e.at("w"))});
    }
  }
  if (any_time) return SpacetimeGraph(std::move(labels), std::move(edges), std::move(times));
  return SpacetimeGraph(std::move(labels), std::move(edges));
}

SpacetimeGraph lattice_graph(const json& spec) {
  Rational step = spec.contains("step_w") ? weight_from_json(spec.at("step_w")) : Rational(1, 2);
  return build_lattice_graph(spec.at("min").get<int>(), spec.at("max").get<int>(), spec.at("horizon").get<int>(),
                             step);
}

}  // namespace

GraphSpec graph_spec_from_json(const nlohmann::json& doc) {
  try {
    GraphSpec spec{doc.contains("lattice") ? lattice_graph(doc.at("lattice")) : explicit_graph(doc), std::nullopt};
    if (doc.contains("sources") || doc.contains("targets")) {
      Configuration config;
      for (const auto& id : doc.value("sources", json::array())) config.sources.push_back(spec.graph.at(id.get<std::string>()));
      std::vector<int> keys;
      std::vector<VertexId> vertices;
      for (const auto& id : doc.value("targets", json::array())) {
        keys.push_back(static_cast<int>(keys.size()));
        vertices.push_back(spec.graph.at(id.get<std::string>()));
      }
      config.targets = TargetSet(std::move(keys), std::move(vertices));
      validate_configuration(spec.graph, config);
      spec.config = std::move(config);
    }
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("graph file: ") + e.what());
  }
}

GraphSpec load_graph_spec(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("graph file: ") + e.what());
  }
  return graph_spec_from_json(doc);
}

nlohmann::json graph_to_json(const SpacetimeGraph& graph) {
  json vertices = json::array();
  for (std::size_t i = 0; i < graph.vertex_count(); ++i) {
    VertexId v{static_cast<std::int32_t>(i)};
    vertices.push_back({{"id", graph.label(v)}, {"t", graph.time(v)}});
  }
  json edges = json::array();
  for (const auto& e : graph.edges()) {
    edges.push_back({{"from", graph.label(e.from)}, {"to", graph.label(e.to)}, {"w", e.weight.str()}});
  }
  return {{"vertices", std::move(vertices)}, {"edges", std::move(edges)}};
}

}  // namespace ghostwalk
