#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ghostwalk/linalg.hpp"
#include "ghostwalk/rational.hpp"

namespace ghostwalk {

inline constexpr std::size_t kDefaultPathCap = 1'000'000;

struct VertexId {
  std::int32_t index = -1;

  std::size_t slot() const { return static_cast<std::size_t>(index); }
  friend auto operator<=>(const VertexId&, const VertexId&) = default;
};

/// Vertex sequence (v_0, ..., v_l); a single vertex is the empty path.
using Path = std::vector<VertexId>;

struct Edge {
  VertexId from;
  VertexId to;
  Rational weight;
};

struct LatticeShape {
  int min_position = 0;
  int max_position = 0;
  int horizon = 0;
};

/// Weighted DAG with a time ordering. Immutable after construction.
///
/// Every vertex carries an integer time that strictly increases along edges:
/// either supplied by the caller or the longest-path depth from the roots.
class SpacetimeGraph {
public:
  struct OutEdge {
    VertexId to;
    Rational weight;
  };

  SpacetimeGraph(std::vector<std::string> labels, std::vector<Edge> edges,
                 std::optional<std::vector<int>> times = std::nullopt);

  std::size_t vertex_count() const { return labels_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }

  const std::string& label(VertexId v) const;
  std::optional<VertexId> find(std::string_view label) const;
  VertexId at(std::string_view label) const;
  bool contains(VertexId v) const { return v.index >= 0 && v.slot() < labels_.size(); }

  int time(VertexId v) const { return times_[v.slot()]; }
  std::span<const VertexId> topological_order() const { return topo_; }
  std::span<const OutEdge> out_edges(VertexId v) const { return out_[v.slot()]; }

  std::optional<Rational> edge_weight(VertexId from, VertexId to) const;
  bool is_path(const Path& path) const;
  /// Product of edge weights; throws std::invalid_argument if `path` is not a path.
  Rational path_weight(const Path& path) const;

  const std::optional<LatticeShape>& lattice() const { return lattice_; }
  VertexId lattice_vertex(int position, int time) const;

private:
  friend SpacetimeGraph build_lattice_graph(int, int, int, const Rational&);

  std::vector<std::string> labels_;
  std::unordered_map<std::string, VertexId> by_label_;
  std::vector<Edge> edges_;
  std::vector<std::vector<OutEdge>> out_;
  std::vector<VertexId> topo_;
  std::vector<int> times_;
  std::optional<LatticeShape> lattice_;
};

/// Vertices (p, t) for p in [min_position, max_position], t in [0, horizon];
/// edges (p,t) -> (p +/- 1, t+1) clipped at the interval ends. Labels are "p@t".
SpacetimeGraph build_lattice_graph(int min_position, int max_position, int horizon,
                                   const Rational& step_weight);

std::string lattice_label(int position, int time);

/// W(x -> v) for every vertex v, by dynamic programming along the topological order.
std::vector<Rational> path_generating_row(const SpacetimeGraph& graph, VertexId x);

/// W(x -> y); W(x -> x) = 1.
Rational path_generating_function(const SpacetimeGraph& graph, VertexId x, VertexId y);

/// All directed paths x -> y. Throws ResourceLimitError once more than `cap` are found.
std::vector<Path> enumerate_paths(const SpacetimeGraph& graph, VertexId x, VertexId y,
                                  std::size_t cap = kDefaultPathCap);

/// Targets with caller-supplied integer keys; the linear order on targets is key order.
class TargetSet {
public:
  TargetSet() = default;
  TargetSet(std::vector<int> keys, std::vector<VertexId> vertices);

  std::size_t size() const { return keys_.size(); }
  const std::vector<int>& keys() const { return keys_; }
  const std::vector<VertexId>& vertices() const { return vertices_; }

  bool contains(int key) const;
  VertexId vertex(int key) const;
  std::optional<int> key_of(VertexId v) const;

private:
  std::vector<int> keys_;
  std::vector<VertexId> vertices_;
};

/// Sources x_1 < ... < x_n (list order) and the ordered target set.
struct Configuration {
  std::vector<VertexId> sources;
  TargetSet targets;
  std::optional<int> horizon;

  std::size_t size() const { return sources.size(); }
};

void validate_configuration(const SpacetimeGraph& graph, const Configuration& config);

struct LatticeInstance {
  SpacetimeGraph graph;
  Configuration config;
};

/// Lattice padded by `horizon` on both sides of the starts so clipping never
/// touches a reachable state. Targets are all time-`horizon` sites, keyed by position.
LatticeInstance make_lattice_instance(std::span<const int> starts, int horizon,
                                      const Rational& step_weight = Rational(1, 2));

void require_strictly_increasing(std::span<const int> starts);
void require_same_parity(std::span<const int> starts);

// --- planarity checkers -----------------------------------------------------

struct CrossingViolation {
  std::size_t left_source = 0;   // x (index into sources)
  std::size_t right_source = 0;  // x' with x < x'
  int left_target = 0;           // y' key, reached by x'
  int right_target = 0;          // y key, reached by x
  Path left_path;                // x -> y
  Path right_path;               // x' -> y'
};

struct ConsecutiveViolation {
  std::size_t left_source = 0;
  std::size_t middle_source = 0;
  std::size_t right_source = 0;
  VertexId meeting;
  Path left_path;    // x -> v
  Path right_path;   // x'' -> v
  Path middle_path;  // x' -> some target, avoiding v and both prefixes
};

template <typename Violation>
struct PlanarityReport {
  std::size_t checked = 0;
  std::size_t violation_count = 0;
  std::vector<Violation> violations;  // first few witnesses

  bool holds() const { return violation_count == 0; }
};

inline constexpr std::size_t kMaxReportedViolations = 16;

PlanarityReport<CrossingViolation> check_crossing_property(const SpacetimeGraph& graph,
                                                           const Configuration& config,
                                                           std::size_t cap = kDefaultPathCap);

PlanarityReport<ConsecutiveViolation> check_consecutive_collision_property(
    const SpacetimeGraph& graph, const Configuration& config, std::size_t cap = kDefaultPathCap);

}  // namespace ghostwalk
