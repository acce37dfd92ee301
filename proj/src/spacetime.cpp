#include "ghostwalk/spacetime.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace ghostwalk {

namespace {

void require_vertex(const SpacetimeGraph& graph, VertexId v, const char* what) {
  if (!graph.contains(v)) throw std::invalid_argument(std::string(what) + ": unknown vertex");
}

/// reach[v] = whether y is reachable from v.
std::vector<char> vertices_reaching(const SpacetimeGraph& graph, VertexId y) {
  std::vector<char> reach(graph.vertex_count(), 0);
  reach[y.slot()] = 1;
  auto topo = graph.topological_order();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    for (const auto& e : graph.out_edges(*it)) {
      if (reach[e.to.slot()]) {
        reach[it->slot()] = 1;
        break;
      }
    }
  }
  return reach;
}

class PathCollector {
public:
  PathCollector(const SpacetimeGraph& graph, VertexId y, std::size_t cap, std::vector<Path>& out)
      : graph_(graph), y_(y), cap_(cap), out_(out), reach_(vertices_reaching(graph, y)) {}

  void run(VertexId x) {
    if (!reach_[x.slot()]) return;
    current_.push_back(x);
    visit(x);
  }

private:
  void visit(VertexId v) {
    if (v == y_) {
      if (out_.size() >= cap_) throw ResourceLimitError("path enumeration exceeded its cap", cap_);
      out_.push_back(current_);
      return;
    }
    for (const auto& e : graph_.out_edges(v)) {
      if (!reach_[e.to.slot()]) continue;
      current_.push_back(e.to);
      visit(e.to);
      current_.pop_back();
    }
  }

  const SpacetimeGraph& graph_;
  VertexId y_;
  std::size_t cap_;
  std::vector<Path>& out_;
  std::vector<char> reach_;
  Path current_;
};

std::vector<char> vertex_marks(std::size_t count, const Path& path) {
  std::vector<char> marks(count, 0);
  for (auto v : path) marks[v.slot()] = 1;
  return marks;
}

bool touches(const std::vector<char>& marks, const Path& path) {
  return std::any_of(path.begin(), path.end(), [&](VertexId v) { return marks[v.slot()] != 0; });
}

}  // namespace

SpacetimeGraph::SpacetimeGraph(std::vector<std::string> labels, std::vector<Edge> edges,
                               std::optional<std::vector<int>> times)
    : labels_(std::move(labels)), edges_(std::move(edges)) {
  const auto n = labels_.size();
  by_label_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = by_label_.emplace(labels_[i], VertexId{static_cast<std::int32_t>(i)});
    if (!inserted) throw std::invalid_argument("SpacetimeGraph: duplicate vertex label '" + labels_[i] + "'");
  }

  out_.resize(n);
  std::vector<int> indegree(n, 0);
  for (const auto& e : edges_) {
    if (!contains(e.from) || !contains(e.to)) throw std::invalid_argument("SpacetimeGraph: edge endpoint out of range");
    if (e.from == e.to) throw std::invalid_argument("SpacetimeGraph: self-loop at '" + labels_[e.from.slot()] + "'");
    for (const auto& existing : out_[e.from.slot()]) {
      if (existing.to == e.to) {
        throw std::invalid_argument("SpacetimeGraph: parallel edge " + labels_[e.from.slot()] + " -> " +
                                    labels_[e.to.slot()]);
      }
    }
    out_[e.from.slot()].push_back({e.to, e.weight});
    ++indegree[e.to.slot()];
  }

  // Kahn's algorithm; smallest index first keeps the order deterministic.
  std::priority_queue<std::int32_t, std::vector<std::int32_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push(static_cast<std::int32_t>(i));
  }
  topo_.reserve(n);
  while (!ready.empty()) {
    VertexId v{ready.top()};
    ready.pop();
    topo_.push_back(v);
    for (const auto& e : out_[v.slot()]) {
      if (--indegree[e.to.slot()] == 0) ready.push(e.to.index);
    }
  }
  if (topo_.size() != n) throw std::invalid_argument("SpacetimeGraph: edge relation has a cycle");

  if (times) {
    if (times->size() != n) throw std::invalid_argument("SpacetimeGraph: one time per vertex required");
    times_ = std::move(*times);
    for (const auto& e : edges_) {
      if (times_[e.from.slot()] >= times_[e.to.slot()]) {
        throw std::invalid_argument("SpacetimeGraph: times must increase along edge " + labels_[e.from.slot()] +
                                    " -> " + labels_[e.to.slot()]);
      }
    }
  } else {
    times_.assign(n, 0);
    for (auto v : topo_) {
      for (const auto& e : out_[v.slot()]) {
        times_[e.to.slot()] = std::max(times_[e.to.slot()], times_[v.slot()] + 1);
      }
    }
  }
}

const std::string& SpacetimeGraph::label(VertexId v) const {
  require_vertex(*this, v, "label");
  return labels_[v.slot()];
}

std::optional<VertexId> SpacetimeGraph::find(std::string_view label) const {
  auto it = by_label_.find(std::string(label));
  if (it == by_label_.end()) return std::nullopt;
  return it->second;
}

VertexId SpacetimeGraph::at(std::string_view label) const {
  if (auto v = find(label)) return *v;
  throw std::invalid_argument("unknown vertex '" + std::string(label) + "'");
}

std::optional<Rational> SpacetimeGraph::edge_weight(VertexId from, VertexId to) const {
  if (!contains(from) || !contains(to)) return std::nullopt;
  for (const auto& e : out_[from.slot()]) {
    if (e.to == to) return e.weight;
  }
  return std::nullopt;
}

bool SpacetimeGraph::is_path(const Path& path) const {
  if (path.empty() || !contains(path.front())) return false;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (!edge_weight(path[i], path[i + 1])) return false;
  }
  return true;
}

Rational SpacetimeGraph::path_weight(const Path& path) const {
  if (path.empty() || !contains(path.front())) throw std::invalid_argument("path_weight: empty or invalid path");
  Rational w(1);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    auto e = edge_weight(path[i], path[i + 1]);
    if (!e) throw std::invalid_argument("path_weight: consecutive vertices are not joined by an edge");
    w *= *e;
  }
  return w;
}

VertexId SpacetimeGraph::lattice_vertex(int position, int time) const {
  if (!lattice_) throw std::invalid_argument("lattice_vertex: graph is not a lattice");
  if (position < lattice_->min_position || position > lattice_->max_position || time < 0 || time > lattice_->horizon) {
    throw std::invalid_argument("lattice_vertex: (" + std::to_string(position) + "," + std::to_string(time) +
                                ") outside the lattice");
  }
  const int width = lattice_->max_position - lattice_->min_position + 1;
  return VertexId{time * width + (position - lattice_->min_position)};
}

std::string lattice_label(int position, int time) { return std::to_string(position) + "@" + std::to_string(time); }

SpacetimeGraph build_lattice_graph(int min_position, int max_position, int horizon, const Rational& step_weight) {
  if (min_position > max_position) throw std::invalid_argument("build_lattice_graph: empty position interval");
  if (horizon < 0) throw std::invalid_argument("build_lattice_graph: negative horizon");
  const int width = max_position - min_position + 1;
  std::vector<std::string> labels;
  std::vector<int> times;
  labels.reserve(static_cast<std::size_t>(width * (horizon + 1)));
  for (int t = 0; t <= horizon; ++t) {
    for (int p = min_position; p <= max_position; ++p) {
      labels.push_back(lattice_label(p, t));
      times.push_back(t);
    }
  }
  auto index = [&](int p, int t) { return VertexId{t * width + (p - min_position)}; };
  std::vector<Edge> edges;
  for (int t = 0; t < horizon; ++t) {
    for (int p = min_position; p <= max_position; ++p) {
      if (p - 1 >= min_position) edges.push_back({index(p, t), index(p - 1, t + 1), step_weight});
      if (p + 1 <= max_position) edges.push_back({index(p, t), index(p + 1, t + 1), step_weight});
    }
  }
  SpacetimeGraph graph(std::move(labels), std::move(edges), std::move(times));
  graph.lattice_ = LatticeShape{min_position, max_position, horizon};
  return graph;
}

std::vector<Rational> path_generating_row(const SpacetimeGraph& graph, VertexId x) {
  require_vertex(graph, x, "path_generating_row");
  std::vector<Rational> w(graph.vertex_count(), Rational(0));
  w[x.slot()] = Rational(1);
  for (auto v : graph.topological_order()) {
    if (w[v.slot()].is_zero()) continue;
    for (const auto& e : graph.out_edges(v)) w[e.to.slot()] += w[v.slot()] * e.weight;
  }
  return w;
}

Rational path_generating_function(const SpacetimeGraph& graph, VertexId x, VertexId y) {
  require_vertex(graph, x, "path_generating_function");
  require_vertex(graph, y, "path_generating_function");
  return path_generating_row(graph, x)[y.slot()];
}

std::vector<Path> enumerate_paths(const SpacetimeGraph& graph, VertexId x, VertexId y, std::size_t cap) {
  require_vertex(graph, x, "enumerate_paths");
  require_vertex(graph, y, "enumerate_paths");
  std::vector<Path> paths;
  PathCollector(graph, y, cap, paths).run(x);
  return paths;
}

TargetSet::TargetSet(std::vector<int> keys, std::vector<VertexId> vertices)
    : keys_(std::move(keys)), vertices_(std::move(vertices)) {
  if (keys_.size() != vertices_.size()) throw std::invalid_argument("TargetSet: keys and vertices differ in length");
  for (std::size_t i = 1; i < keys_.size(); ++i) {
    if (keys_[i - 1] >= keys_[i]) throw std::invalid_argument("TargetSet: keys must be strictly increasing");
  }
}

bool TargetSet::contains(int key) const { return std::binary_search(keys_.begin(), keys_.end(), key); }

VertexId TargetSet::vertex(int key) const {
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) throw std::invalid_argument("no target with key " + std::to_string(key));
  return vertices_[static_cast<std::size_t>(it - keys_.begin())];
}

std::optional<int> TargetSet::key_of(VertexId v) const {
  auto it = std::find(vertices_.begin(), vertices_.end(), v);
  if (it == vertices_.end()) return std::nullopt;
  return keys_[static_cast<std::size_t>(it - vertices_.begin())];
}

void validate_configuration(const SpacetimeGraph& graph, const Configuration& config) {
  for (std::size_t i = 0; i < config.sources.size(); ++i) {
    require_vertex(graph, config.sources[i], "configuration source");
    for (std::size_t j = 0; j < i; ++j) {
      if (config.sources[i] == config.sources[j]) throw std::invalid_argument("configuration: repeated source");
    }
  }
  for (auto v : config.targets.vertices()) require_vertex(graph, v, "configuration target");
}

void require_strictly_increasing(std::span<const int> starts) {
  for (std::size_t i = 1; i < starts.size(); ++i) {
    if (starts[i - 1] >= starts[i]) throw std::invalid_argument("starts must be strictly increasing");
  }
}

void require_same_parity(std::span<const int> starts) {
  for (std::size_t i = 1; i < starts.size(); ++i) {
    if ((starts[i] - starts[0]) % 2 != 0) throw std::invalid_argument("starts must all have the same parity");
  }
}

LatticeInstance make_lattice_instance(std::span<const int> starts, int horizon, const Rational& step_weight) {
  if (starts.empty()) throw std::invalid_argument("make_lattice_instance: no starts");
  if (horizon < 0) throw std::invalid_argument("make_lattice_instance: negative horizon");
  require_strictly_increasing(starts);
  const int lo = starts.front() - horizon;
  const int hi = starts.back() + horizon;
  auto graph = build_lattice_graph(lo, hi, horizon, step_weight);
  Configuration config;
  for (int p : starts) config.sources.push_back(graph.lattice_vertex(p, 0));
  std::vector<int> keys;
  std::vector<VertexId> vertices;
  for (int p = lo; p <= hi; ++p) {
    keys.push_back(p);
    vertices.push_back(graph.lattice_vertex(p, horizon));
  }
  config.targets = TargetSet(std::move(keys), std::move(vertices));
  config.horizon = horizon;
  return {std::move(graph), std::move(config)};
}

PlanarityReport<CrossingViolation> check_crossing_property(const SpacetimeGraph& graph, const Configuration& config,
                                                           std::size_t cap) {
  validate_configuration(graph, config);
  PlanarityReport<CrossingViolation> report;
  const auto& keys = config.targets.keys();
  const auto n = config.sources.size();
  const auto m = keys.size();

  // paths[i][r]: all paths from source i to the target of rank r.
  std::vector<std::vector<std::vector<Path>>> paths(n, std::vector<std::vector<Path>>(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < m; ++r) {
      paths[i][r] = enumerate_paths(graph, config.sources[i], config.targets.vertices()[r], cap);
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t ip = i + 1; ip < n; ++ip) {
      for (std::size_t rlo = 0; rlo < m; ++rlo) {
        for (std::size_t rhi = rlo + 1; rhi < m; ++rhi) {
          for (const auto& left : paths[i][rhi]) {
            auto marks = vertex_marks(graph.vertex_count(), left);
            for (const auto& right : paths[ip][rlo]) {
              ++report.checked;
              if (touches(marks, right)) continue;
              ++report.violation_count;
              if (report.violations.size() < kMaxReportedViolations) {
                report.violations.push_back({i, ip, keys[rlo], keys[rhi], left, right});
              }
            }
          }
        }
      }
    }
  }
  return report;
}

PlanarityReport<ConsecutiveViolation> check_consecutive_collision_property(const SpacetimeGraph& graph,
                                                                           const Configuration& config,
                                                                           std::size_t cap) {
  validate_configuration(graph, config);
  PlanarityReport<ConsecutiveViolation> report;
  const auto n = config.sources.size();
  if (n < 3) return report;

  std::vector<std::vector<Path>> full_paths(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto y : config.targets.vertices()) {
      auto found = enumerate_paths(graph, config.sources[i], y, cap);
      full_paths[i].insert(full_paths[i].end(), found.begin(), found.end());
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 2; k < n; ++k) {
      for (auto v : graph.topological_order()) {
        auto left_paths = enumerate_paths(graph, config.sources[i], v, cap);
        if (left_paths.empty()) continue;
        auto right_paths = enumerate_paths(graph, config.sources[k], v, cap);
        if (right_paths.empty()) continue;
        for (const auto& left : left_paths) {
          for (const auto& right : right_paths) {
            auto marks = vertex_marks(graph.vertex_count(), left);
            for (auto u : right) marks[u.slot()] = 1;
            marks[v.slot()] = 0;
            for (std::size_t j = i + 1; j < k; ++j) {
              for (const auto& middle : full_paths[j]) {
                ++report.checked;
                bool through_v = std::find(middle.begin(), middle.end(), v) != middle.end();
                if (through_v || touches(marks, middle)) continue;
                ++report.violation_count;
                if (report.violations.size() < kMaxReportedViolations) {
                  report.violations.push_back({i, j, k, v, left, right, middle});
                }
              }
            }
          }
        }
      }
    }
  }
  return report;
}

}  // namespace ghostwalk
