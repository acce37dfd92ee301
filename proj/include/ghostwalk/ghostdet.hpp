#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ghostwalk/linalg.hpp"
#include "ghostwalk/spacetime.hpp"

namespace ghostwalk {

/// k collisions, s = n - 2k survivors (increasing target keys), and k ordered
/// ghost pairs (a_j, b_j). Positions are target keys; order is key order.
struct FinalState {
  std::vector<int> survivors;
  std::vector<std::pair<int, int>> ghost_pairs;

  std::size_t collisions() const { return ghost_pairs.size(); }
  std::size_t particles() const { return survivors.size() + 2 * ghost_pairs.size(); }

  friend bool operator==(const FinalState&, const FinalState&) = default;
  /// Canonical order: k, then survivors, then ghost pairs (lexicographic).
  friend std::strong_ordering operator<=>(const FinalState& lhs, const FinalState& rhs);
};

/// Throws std::invalid_argument unless survivors are strictly increasing.
void validate_final_state(const FinalState& state);

std::string to_string(const FinalState& state);

/// epsilon_j = +1 if a_j <= b_j, else -1.
std::vector<int> ghost_signs(const FinalState& state);
int state_sign(const FinalState& state);

// Column layout of the ghost matrix: survivor slots 0..s-1, then ghost slots
// (j,1), (j,2) at s + 2j and s + 2j + 1.
inline int ghost_column(const FinalState& state, std::size_t pair, int slot) {
  return static_cast<int>(state.survivors.size() + 2 * pair) + (slot - 1);
}

/// Target key sitting at `column`.
int column_key(const FinalState& state, int column);

/// pi[actor] = column.
using Bijection = std::vector<int>;

bool is_candidate(const FinalState& state, std::span<const int> pi);

/// Product over pairs of -1 whenever the higher actor holds slot (j,1).
int formal_sign(const FinalState& state, std::span<const int> pi);

/// All candidate bijections, lexicographic in one-line notation.
std::vector<Bijection> candidate_bijections(const FinalState& state, int n);

struct ColumnTag {
  enum class Kind { survivor, ghost };
  Kind kind = Kind::survivor;
  int index = 0;  // survivor slot or ghost pair (0-based)
  int slot = 0;   // 1 or 2 for ghosts

  friend bool operator==(const ColumnTag&, const ColumnTag&) = default;
};

/// Plain weights W(x_I -> column position) plus the per-column role tag that
/// stands in for the formal variables.
struct GhostMatrix {
  RationalMatrix base;
  std::vector<ColumnTag> tags;

  const ColumnTag& tag(Eigen::Index /*row*/, Eigen::Index col) const { return tags[static_cast<std::size_t>(col)]; }
};

GhostMatrix build_matrix(const SpacetimeGraph& graph, const Configuration& config, const FinalState& state);

struct SignedWeight {
  int sign = 1;
  Rational magnitude;

  Rational value() const { return sign < 0 ? -magnitude : magnitude; }
};

struct CandidateTerm {
  Bijection pi;
  int formal = 1;
  int permutation = 1;
  SignedWeight weight;  // formal * sgn(pi) * prod base(I, pi(I))
};

inline constexpr int kMaxLeibnizSize = 8;

std::vector<CandidateTerm> candidate_terms(const GhostMatrix& matrix, const FinalState& state);

/// Z = (1/k!) * sum over candidates of formal sign * sgn(pi) * prod base(I, pi(I)).
Rational annihilation_weight(const GhostMatrix& matrix, const FinalState& state);

/// Convenience: build the matrix and evaluate it.
Rational annihilation_weight(const SpacetimeGraph& graph, const Configuration& config, const FinalState& state);

/// Single-pair expansion along the two ghost columns; requires k = 1.
Rational annihilation_weight_laplace(const SpacetimeGraph& graph, const Configuration& config,
                                     const FinalState& state);

/// Target keys reachable from at least one source.
std::vector<int> reachable_keys(const SpacetimeGraph& graph, const Configuration& config);

/// Every final state with n particles over the given keys (all k, all ordered
/// ghost pairs, diagonal included). Throws ResourceLimitError above `cap`.
std::vector<FinalState> all_final_states(int n, std::span<const int> keys, std::size_t cap = kDefaultPathCap);

nlohmann::json final_state_to_json(const FinalState& state, const SpacetimeGraph& graph, const TargetSet& targets);
FinalState final_state_from_json(const nlohmann::json& doc, const SpacetimeGraph& graph, const TargetSet& targets);

}  // namespace ghostwalk
