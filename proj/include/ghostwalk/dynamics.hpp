#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ghostwalk/ghostdet.hpp"
#include "ghostwalk/rational.hpp"

namespace ghostwalk {

// Brute-force oracles for +/-1 walks on Z with step weight 1/2. Every oracle
// enumerates all 2^{n t} elementary evolutions exactly.

/// steps[i][s] in {-1, +1}: the step of walker i at time s -> s+1.
struct Evolution {
  std::vector<std::vector<int>> steps;

  int walkers() const { return static_cast<int>(steps.size()); }
  int horizon() const { return steps.empty() ? 0 : static_cast<int>(steps.front().size()); }

  /// Bit (i * t + s) of `index` set means walker i steps +1 at time s.
  static Evolution from_index(std::uint64_t index, int walkers, int horizon);
};

struct Collision {
  int time = 0;
  int position = 0;
  int lower_actor = 0;
  int upper_actor = 0;

  friend bool operator==(const Collision&, const Collision&) = default;
};

struct AnnihilationOutcome {
  std::vector<Collision> collisions;                // non-decreasing time
  std::vector<std::pair<int, int>> survivors;       // (actor, final position), increasing actor
  std::vector<std::pair<int, int>> ghost_pairs;     // unordered, stored (min, max); one per collision
};

/// Consecutive-pair rule at one site: actors sorted ascending are paired
/// (I1,I2), (I3,I4), ...; an odd one out (the largest) stays active.
struct SitePairing {
  std::vector<std::pair<int, int>> pairs;
  std::optional<int> unpaired;
};
SitePairing pair_colocated(std::span<const int> actors);

AnnihilationOutcome run_annihilation(std::span<const int> starts, const Evolution& evolution);

struct OracleOptions {
  int max_walk_steps = 24;  // n * t cap
  unsigned partitions = 1;  // evolution index range split; partitions run concurrently
};

/// FinalState -> probability, canonical key order.
class DistributionTable {
public:
  void add(const FinalState& state, const Rational& probability);
  void merge(const DistributionTable& other);

  Rational probability(const FinalState& state) const;
  Rational total() const;
  std::size_t size() const { return entries_.size(); }

  const std::map<FinalState, Rational>& entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  friend bool operator==(const DistributionTable&, const DistributionTable&) = default;

private:
  std::map<FinalState, Rational> entries_;
};

/// Unlabeled physical result of one evolution: survivor positions and the
/// multiset of unordered ghost pairs (each (min, max), sorted).
struct PhysicalOutcome {
  std::vector<int> survivors;
  std::vector<std::pair<int, int>> ghost_pairs;

  friend auto operator<=>(const PhysicalOutcome&, const PhysicalOutcome&) = default;
};

using OutcomeCounts = std::map<PhysicalOutcome, std::uint64_t>;

/// Counts physical outcomes over evolution indices [first, last).
OutcomeCounts annihilation_outcome_counts(std::span<const int> starts, int horizon, std::uint64_t first,
                                          std::uint64_t last);

/// Spreads `weight` over labeled final states: every numbering of the k pairs
/// gets 1/k!, and an off-diagonal pair {p,q} splits evenly between (p,q) and (q,p).
void add_labeled_states(const PhysicalOutcome& outcome, const Rational& weight, DistributionTable& table);

DistributionTable annihilation_distribution(std::span<const int> starts, int horizon,
                                            const OracleOptions& options = {});

/// Canonical JSON export: [{"state": {...}, "p": "p/q"}, ...] with lattice vertex ids.
nlohmann::json distribution_to_json(const DistributionTable& table, int horizon);

// --- coalescence ------------------------------------------------------------

enum class HeirStream { lowest_actor, highest_actor };

struct CoalescenceEntity {
  int position = 0;
  int multiplicity = 0;
  int lowest_actor = 0;
  int highest_actor = 0;
};

struct MergeEvent {
  int time = 0;
  int position = 0;
  int left_multiplicity = 0;   // entity with the lower leading actor
  int right_multiplicity = 0;
};

struct CoalescenceTrace {
  std::vector<MergeEvent> merges;
  std::vector<CoalescenceEntity> heirs;  // final visible entities, by lowest actor
};

CoalescenceTrace run_coalescence(std::span<const int> starts, const Evolution& evolution,
                                 HeirStream stream = HeirStream::lowest_actor);

bool every_heir_even(const CoalescenceTrace& trace);

/// Probability that every final heir has even multiplicity.
Rational pairwise_coalescence_probability(std::span<const int> starts, int horizon, const OracleOptions& options = {},
                                          HeirStream stream = HeirStream::lowest_actor);

enum class MergeClass { annihilation, non_event };

struct ReclassifiedTrace {
  std::vector<MergeClass> classes;  // one per merge
  int annihilations = 0;
  bool complete_annihilation = false;  // no odd-multiplicity entity left
  bool every_heir_even = false;

  bool sound() const { return complete_annihilation == every_heir_even; }
};

/// Even multiplicity -> ghost, odd -> particle; odd+odd merges are annihilations.
ReclassifiedTrace parity_reclassify(const CoalescenceTrace& trace);

// --- prescribed annihilation ------------------------------------------------

/// Weight of evolutions where walkers `pair` and `pair + 1` annihilate with each
/// other, nobody else collides, the ghosts end at {a, b} and the others end at
/// `survivors`. Requires a < survivors[0] < b and increasing survivors.
Rational prescribed_annihilation_weight(std::span<const int> starts, int pair, int a, std::span<const int> survivors,
                                        int b, int horizon, const OracleOptions& options = {});

/// Every (a, y_1, ..., y_{n-2}, b) with a < y_1 < b reached with positive weight,
/// mapped to its prescribed annihilation weight.
std::map<std::vector<int>, Rational> prescribed_tuple_weights(std::span<const int> starts, int pair, int horizon,
                                                              const OracleOptions& options = {});

}  // namespace ghostwalk
