#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "ghostwalk/ghostdet.hpp"
#include "ghostwalk/spacetime.hpp"

namespace ghostwalk {

/// Graph, sources and target state shared by every casting of one instance.
/// Holds references; the graph and configuration must outlive the context.
class CastingContext {
public:
  CastingContext(const SpacetimeGraph& graph, const Configuration& config, FinalState state);

  const SpacetimeGraph& graph() const { return *graph_; }
  const Configuration& config() const { return *config_; }
  const FinalState& state() const { return state_; }
  int actors() const { return static_cast<int>(config_->sources.size()); }

  /// Target vertex of a matrix column.
  VertexId column_vertex(int column) const { return columns_[static_cast<std::size_t>(column)]; }
  /// Ghost pair j whose two slots are exactly {c1, c2}, if any.
  std::optional<std::size_t> shared_pair(int c1, int c2) const;

private:
  const SpacetimeGraph* graph_;
  const Configuration* config_;
  FinalState state_;
  std::vector<VertexId> columns_;
};

/// Actor-based record: pi[I] is the column of actor I, paths[I] runs x_I -> column vertex.
struct Casting {
  Bijection pi;
  std::vector<Path> paths;

  friend bool operator==(const Casting&, const Casting&) = default;
};

Rational casting_path_product(const CastingContext& ctx, const Casting& casting);
/// formal sign * sgn(pi).
int casting_sign(const CastingContext& ctx, const Casting& casting);
/// Throws std::invalid_argument unless pi is a candidate and every path fits.
void validate_casting(const CastingContext& ctx, const Casting& casting);
std::string to_string(const CastingContext& ctx, const Casting& casting);

std::vector<Casting> enumerate_candidate_castings(const CastingContext& ctx, std::size_t cap = kDefaultPathCap);

struct Crossing {
  int lower_actor = 0;
  int upper_actor = 0;
  VertexId vertex;

  friend bool operator==(const Crossing&, const Crossing&) = default;
};

/// Earliest shared vertex among the active paths; ties go to the
/// lexicographically smallest actor pair.
std::optional<Crossing> first_crossing(const SpacetimeGraph& graph, const std::vector<Path>& paths,
                                       const std::vector<bool>& active);

struct CollisionRecord {
  VertexId vertex;
  int lower_actor = 0;
  int upper_actor = 0;
  std::size_t pair = 0;
  Path lower_incoming;  // x_I -> vertex
  Path upper_incoming;  // x_J -> vertex

  friend bool operator==(const CollisionRecord&, const CollisionRecord&) = default;
};

struct SurvivorRecord {
  int actor = 0;
  int slot = 0;
  Path path;

  friend bool operator==(const SurvivorRecord&, const SurvivorRecord&) = default;
};

/// Both ghost paths leave the collision vertex.
struct GhostPaths {
  Path toward_a;
  Path toward_b;

  friend bool operator==(const GhostPaths&, const GhostPaths&) = default;
};

/// Role-based record: collisions in processing order, survivors by actor,
/// ghost paths by pair index.
struct Performance {
  std::vector<CollisionRecord> collisions;
  std::vector<SurvivorRecord> survivors;
  std::vector<GhostPaths> ghosts;

  friend bool operator==(const Performance&, const Performance&) = default;
};

struct RehearsalFailure {
  enum class Kind {
    spurious,  // first crossing joins actors not destined for one ghost pair
    stalled    // no crossing left but an active actor still holds a ghost slot
  };
  Kind kind = Kind::spurious;
  Crossing crossing;  // meaningful for spurious failures
};

struct RehearsalResult {
  std::variant<Performance, RehearsalFailure> outcome;

  bool succeeded() const { return std::holds_alternative<Performance>(outcome); }
  const Performance& performance() const { return std::get<Performance>(outcome); }
  const RehearsalFailure& failure() const { return std::get<RehearsalFailure>(outcome); }
};

RehearsalResult rehearse(const CastingContext& ctx, const Casting& casting);

/// Swap principle at every collision: with a <= b the lower actor takes b,
/// otherwise it takes a.
Casting attribute(const CastingContext& ctx, const Performance& performance);

/// Exchanges the suffixes of paths I and J after the shared vertex v; pi' = (I J) o pi.
Casting segment_swap(const Casting& casting, int lower_actor, int upper_actor, VertexId v);

/// Identity on successful castings, segment swap at the first spurious crossing otherwise.
Casting global_involution(const CastingContext& ctx, const Casting& casting);

struct AuditViolation {
  std::string check;
  std::string detail;
};

struct AuditReport {
  std::size_t checked = 0;
  std::size_t fixed_points = 0;
  std::size_t paired = 0;
  std::vector<AuditViolation> violations;

  bool passed() const { return violations.empty(); }
  void merge(const AuditReport& other);
};

/// Exhaustive check of every candidate casting of one final state.
AuditReport audit_involution(const CastingContext& ctx, std::size_t cap = kDefaultPathCap);

nlohmann::json audit_report_to_json(const AuditReport& report);

}  // namespace ghostwalk
