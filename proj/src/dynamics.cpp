#include "ghostwalk/dynamics.hpp"

#include <algorithm>
#include <future>
#include <numeric>
#include <stdexcept>

#include "ghostwalk/spacetime.hpp"

namespace ghostwalk {

namespace {

void require_lattice_starts(std::span<const int> starts) {
  if (starts.empty()) throw std::invalid_argument("at least one walker is required");
  require_strictly_increasing(starts);
  require_same_parity(starts);
}

std::uint64_t evolution_count(std::span<const int> starts, int horizon, const OracleOptions& options) {
  if (horizon < 0) throw std::invalid_argument("horizon must be non-negative");
  const auto steps = static_cast<long>(starts.size()) * horizon;
  if (steps > options.max_walk_steps || steps > 62) {
    throw ResourceLimitError("exhaustive enumeration of 2^(n*t) evolutions with n*t = " + std::to_string(steps),
                             static_cast<std::size_t>(options.max_walk_steps));
  }
  return std::uint64_t{1} << steps;
}

/// Runs fn(first, last) over `partitions` contiguous slices of [0, total).
template <typename Fn>
auto run_partitioned(std::uint64_t total, unsigned partitions, Fn fn) {
  using Partial = decltype(fn(std::uint64_t{}, std::uint64_t{}));
  partitions = std::max(1u, partitions);
  if (partitions == 1 || total < partitions) return std::vector<Partial>{fn(0, total)};
  std::vector<std::future<Partial>> pending;
  const std::uint64_t chunk = (total + partitions - 1) / partitions;
  for (std::uint64_t first = 0; first < total; first += chunk) {
    pending.push_back(std::async(std::launch::async, fn, first, std::min(total, first + chunk)));
  }
  std::vector<Partial> parts;
  for (auto& f : pending) parts.push_back(f.get());
  return parts;
}

class IndexSteps {
public:
  IndexSteps(std::uint64_t index, int horizon) : index_(index), horizon_(horizon) {}
  int operator()(int walker, int time) const {
    return (index_ >> (walker * horizon_ + time)) & 1U ? 1 : -1;
  }

private:
  std::uint64_t index_;
  int horizon_;
};

class EvolutionSteps {
public:
  explicit EvolutionSteps(const Evolution& e) : e_(e) {}
  int operator()(int walker, int time) const {
    return e_.steps[static_cast<std::size_t>(walker)][static_cast<std::size_t>(time)];
  }

private:
  const Evolution& e_;
};

void validate_evolution(std::span<const int> starts, const Evolution& evolution) {
  if (evolution.walkers() != static_cast<int>(starts.size())) {
    throw std::invalid_argument("evolution has " + std::to_string(evolution.walkers()) + " step streams for " +
                                std::to_string(starts.size()) + " walkers");
  }
  for (const auto& stream : evolution.steps) {
    if (static_cast<int>(stream.size()) != evolution.horizon()) throw std::invalid_argument("step streams differ in length");
    for (int step : stream) {
      if (step != 1 && step != -1) throw std::invalid_argument("steps must be +1 or -1");
    }
  }
}

/// Annihilation dynamics with reusable buffers.
class AnnihilationSimulator {
public:
  AnnihilationSimulator(std::span<const int> starts, int horizon)
      : starts_(starts.begin(), starts.end()), horizon_(horizon) {}

  template <typename Steps>
  const AnnihilationOutcome& run(const Steps& step) {
    const int n = static_cast<int>(starts_.size());
    position_ = starts_;
    active_.assign(starts_.size(), 1);
    out_.collisions.clear();
    out_.survivors.clear();
    out_.ghost_pairs.clear();

    for (int s = 0; s < horizon_; ++s) {
      for (int i = 0; i < n; ++i) position_[static_cast<std::size_t>(i)] += step(i, s);
      order_.clear();
      for (int i = 0; i < n; ++i) {
        if (active_[static_cast<std::size_t>(i)]) order_.push_back(i);
      }
      std::stable_sort(order_.begin(), order_.end(), [&](int lhs, int rhs) {
        return position_[static_cast<std::size_t>(lhs)] < position_[static_cast<std::size_t>(rhs)];
      });
      for (std::size_t g = 0; g < order_.size();) {
        std::size_t h = g + 1;
        const int site = position_[static_cast<std::size_t>(order_[g])];
        while (h < order_.size() && position_[static_cast<std::size_t>(order_[h])] == site) ++h;
        if (h - g >= 2) {
          auto pairing = pair_colocated(std::span<const int>(order_).subspan(g, h - g));
          for (auto [lo, hi] : pairing.pairs) {
            active_[static_cast<std::size_t>(lo)] = 0;
            active_[static_cast<std::size_t>(hi)] = 0;
            out_.collisions.push_back({s + 1, site, lo, hi});
          }
        }
        g = h;
      }
    }

    for (int i = 0; i < n; ++i) {
      if (active_[static_cast<std::size_t>(i)]) out_.survivors.emplace_back(i, position_[static_cast<std::size_t>(i)]);
    }
    for (const auto& c : out_.collisions) {
      const int p = position_[static_cast<std::size_t>(c.lower_actor)];
      const int q = position_[static_cast<std::size_t>(c.upper_actor)];
      out_.ghost_pairs.emplace_back(std::min(p, q), std::max(p, q));
    }
    return out_;
  }

private:
  std::vector<int> starts_;
  int horizon_;
  std::vector<int> position_;
  std::vector<char> active_;
  std::vector<int> order_;
  AnnihilationOutcome out_;
};

PhysicalOutcome physical(const AnnihilationOutcome& outcome) {
  PhysicalOutcome p;
  for (auto [actor, position] : outcome.survivors) p.survivors.push_back(position);
  std::sort(p.survivors.begin(), p.survivors.end());
  p.ghost_pairs = outcome.ghost_pairs;
  std::sort(p.ghost_pairs.begin(), p.ghost_pairs.end());
  return p;
}

class CoalescenceSimulator {
public:
  CoalescenceSimulator(std::span<const int> starts, int horizon, HeirStream stream)
      : starts_(starts.begin(), starts.end()), horizon_(horizon), stream_(stream) {}

  template <typename Steps>
  const CoalescenceTrace& run(const Steps& step) {
    const int n = static_cast<int>(starts_.size());
    entities_.clear();
    for (int i = 0; i < n; ++i) entities_.push_back({starts_[static_cast<std::size_t>(i)], 1, i, i});
    trace_.merges.clear();

    for (int s = 0; s < horizon_; ++s) {
      for (auto& e : entities_) {
        const int actor = stream_ == HeirStream::lowest_actor ? e.lowest_actor : e.highest_actor;
        e.position += step(actor, s);
      }
      std::stable_sort(entities_.begin(), entities_.end(), [](const auto& lhs, const auto& rhs) {
        return lhs.position != rhs.position ? lhs.position < rhs.position : lhs.lowest_actor < rhs.lowest_actor;
      });
      next_.clear();
      for (std::size_t g = 0; g < entities_.size();) {
        std::size_t h = g + 1;
        while (h < entities_.size() && entities_[h].position == entities_[g].position) ++h;
        site_.assign(entities_.begin() + static_cast<long>(g), entities_.begin() + static_cast<long>(h));
        merge_site(s + 1);
        next_.insert(next_.end(), site_.begin(), site_.end());
        g = h;
      }
      entities_.swap(next_);
    }

    trace_.heirs = entities_;
    std::sort(trace_.heirs.begin(), trace_.heirs.end(),
              [](const auto& lhs, const auto& rhs) { return lhs.lowest_actor < rhs.lowest_actor; });
    return trace_;
  }

private:
  // Consecutive pairs merge, repeatedly, until the site holds one entity.
  void merge_site(int time) {
    while (site_.size() > 1) {
      std::vector<CoalescenceEntity> merged;
      for (std::size_t i = 0; i + 1 < site_.size(); i += 2) {
        const auto& left = site_[i];
        const auto& right = site_[i + 1];
        trace_.merges.push_back({time, left.position, left.multiplicity, right.multiplicity});
        merged.push_back({left.position, left.multiplicity + right.multiplicity,
                          std::min(left.lowest_actor, right.lowest_actor),
                          std::max(left.highest_actor, right.highest_actor)});
      }
      if (site_.size() % 2 == 1) merged.push_back(site_.back());
      std::sort(merged.begin(), merged.end(),
                [](const auto& lhs, const auto& rhs) { return lhs.lowest_actor < rhs.lowest_actor; });
      site_.swap(merged);
    }
  }

  std::vector<int> starts_;
  int horizon_;
  HeirStream stream_;
  std::vector<CoalescenceEntity> entities_;
  std::vector<CoalescenceEntity> next_;
  std::vector<CoalescenceEntity> site_;
  CoalescenceTrace trace_;
};

}  // namespace

Evolution Evolution::from_index(std::uint64_t index, int walkers, int horizon) {
  Evolution e;
  IndexSteps step(index, horizon);
  e.steps.assign(static_cast<std::size_t>(walkers), std::vector<int>(static_cast<std::size_t>(horizon)));
  for (int i = 0; i < walkers; ++i) {
    for (int s = 0; s < horizon; ++s) e.steps[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)] = step(i, s);
  }
  return e;
}

SitePairing pair_colocated(std::span<const int> actors) {
  std::vector<int> sorted(actors.begin(), actors.end());
  std::sort(sorted.begin(), sorted.end());
  SitePairing result;
  std::size_t i = 0;
  for (; i + 1 < sorted.size(); i += 2) result.pairs.emplace_back(sorted[i], sorted[i + 1]);
  if (i < sorted.size()) result.unpaired = sorted[i];
  return result;
}

AnnihilationOutcome run_annihilation(std::span<const int> starts, const Evolution& evolution) {
  require_lattice_starts(starts);
  validate_evolution(starts, evolution);
  AnnihilationSimulator sim(starts, evolution.horizon());
  return sim.run(EvolutionSteps(evolution));
}

void DistributionTable::add(const FinalState& state, const Rational& probability) {
  auto [it, inserted] = entries_.try_emplace(state, probability);
  if (!inserted) it->second += probability;
}

void DistributionTable::merge(const DistributionTable& other) {
  for (const auto& [state, p] : other.entries_) add(state, p);
}

Rational DistributionTable::probability(const FinalState& state) const {
  auto it = entries_.find(state);
  return it == entries_.end() ? Rational(0) : it->second;
}

Rational DistributionTable::total() const {
  Rational sum(0);
  for (const auto& [state, p] : entries_) sum += p;
  return sum;
}

OutcomeCounts annihilation_outcome_counts(std::span<const int> starts, int horizon, std::uint64_t first,
                                          std::uint64_t last) {
  require_lattice_starts(starts);
  AnnihilationSimulator sim(starts, horizon);
  OutcomeCounts counts;
  for (std::uint64_t index = first; index < last; ++index) {
    ++counts[physical(sim.run(IndexSteps(index, horizon)))];
  }
  return counts;
}

void add_labeled_states(const PhysicalOutcome& outcome, const Rational& weight, DistributionTable& table) {
  const int k = static_cast<int>(outcome.ghost_pairs.size());
  Rational numberings(1);
  for (int i = 2; i <= k; ++i) numberings *= Rational(i);
  const Rational per_numbering = weight / numberings;

  for_each_permutation(k, [&](std::span<const int> numbering) {
    for (unsigned mask = 0; mask < (1U << k); ++mask) {
      FinalState state{outcome.survivors, {}};
      Rational w = per_numbering;
      bool skip = false;
      for (int j = 0; j < k; ++j) {
        auto [p, q] = outcome.ghost_pairs[static_cast<std::size_t>(numbering[static_cast<std::size_t>(j)])];
        const bool flipped = (mask >> j) & 1U;
        if (p == q) {
          if (flipped) skip = true;
          state.ghost_pairs.emplace_back(p, q);
        } else {
          w *= Rational(1, 2);
          state.ghost_pairs.push_back(flipped ? std::pair{q, p} : std::pair{p, q});
        }
      }
      if (!skip) table.add(state, w);
    }
  });
}

DistributionTable annihilation_distribution(std::span<const int> starts, int horizon, const OracleOptions& options) {
  require_lattice_starts(starts);
  const auto total = evolution_count(starts, horizon, options);
  const std::vector<int> walkers(starts.begin(), starts.end());
  auto parts = run_partitioned(total, options.partitions, [&walkers, horizon](std::uint64_t first, std::uint64_t last) {
    return annihilation_outcome_counts(walkers, horizon, first, last);
  });
  OutcomeCounts counts;
  for (const auto& part : parts) {
    for (const auto& [outcome, count] : part) counts[outcome] += count;
  }
  const auto unit = Rational::inverse_power_of_two(static_cast<unsigned>(starts.size()) * static_cast<unsigned>(horizon));
  DistributionTable table;
  for (const auto& [outcome, count] : counts) {
    add_labeled_states(outcome, Rational(mpq_class(mpz_class(std::to_string(count)))) * unit, table);
  }
  return table;
}

nlohmann::json distribution_to_json(const DistributionTable& table, int horizon) {
  auto id = [horizon](int p) { return lattice_label(p, horizon); };
  nlohmann::json records = nlohmann::json::array();
  for (const auto& [state, p] : table) {
    nlohmann::json survivors = nlohmann::json::array();
    for (int y : state.survivors) survivors.push_back(id(y));
    nlohmann::json pairs = nlohmann::json::array();
    for (auto [a, b] : state.ghost_pairs) pairs.push_back({id(a), id(b)});
    records.push_back({{"state", {{"k", state.collisions()}, {"survivors", survivors}, {"ghost_pairs", pairs}}},
                       {"p", p.str()}});
  }
  return records;
}

CoalescenceTrace run_coalescence(std::span<const int> starts, const Evolution& evolution, HeirStream stream) {
  require_lattice_starts(starts);
  validate_evolution(starts, evolution);
  CoalescenceSimulator sim(starts, evolution.horizon(), stream);
  return sim.run(EvolutionSteps(evolution));
}

bool every_heir_even(const CoalescenceTrace& trace) {
  return std::all_of(trace.heirs.begin(), trace.heirs.end(), [](const auto& e) { return e.multiplicity % 2 == 0; });
}

Rational pairwise_coalescence_probability(std::span<const int> starts, int horizon, const OracleOptions& options,
                                          HeirStream stream) {
  require_lattice_starts(starts);
  if (starts.size() % 2 != 0) throw std::invalid_argument("pairwise coalescence needs an even number of walkers");
  const auto total = evolution_count(starts, horizon, options);
  const std::vector<int> walkers(starts.begin(), starts.end());
  auto parts = run_partitioned(total, options.partitions, [&](std::uint64_t first, std::uint64_t last) {
    CoalescenceSimulator sim(walkers, horizon, stream);
    std::uint64_t hits = 0;
    for (auto index = first; index < last; ++index) {
      if (every_heir_even(sim.run(IndexSteps(index, horizon)))) ++hits;
    }
    return hits;
  });
  const auto hits = std::accumulate(parts.begin(), parts.end(), std::uint64_t{0});
  return Rational(mpq_class(mpz_class(std::to_string(hits)))) *
         Rational::inverse_power_of_two(static_cast<unsigned>(starts.size()) * static_cast<unsigned>(horizon));
}

ReclassifiedTrace parity_reclassify(const CoalescenceTrace& trace) {
  ReclassifiedTrace out;
  int walkers = 0;
  for (const auto& heir : trace.heirs) walkers += heir.multiplicity;
  for (const auto& m : trace.merges) {
    const bool annihilation = m.left_multiplicity % 2 == 1 && m.right_multiplicity % 2 == 1;
    out.classes.push_back(annihilation ? MergeClass::annihilation : MergeClass::non_event);
    if (annihilation) ++out.annihilations;
  }
  // Each annihilation turns two odd entities into one even heir and a ghost.
  out.complete_annihilation = walkers - 2 * out.annihilations == 0;
  out.every_heir_even = every_heir_even(trace);
  return out;
}

namespace {

/// The (a, y..., b) tuple of an evolution matching the prescribed event, if any.
std::optional<std::vector<int>> prescribed_tuple(const AnnihilationOutcome& outcome, int pair) {
  if (outcome.collisions.size() != 1) return std::nullopt;
  const auto& c = outcome.collisions.front();
  if (c.lower_actor != pair || c.upper_actor != pair + 1) return std::nullopt;
  auto [a, b] = outcome.ghost_pairs.front();
  if (a == b) return std::nullopt;
  std::vector<int> tuple{a};
  for (auto [actor, position] : outcome.survivors) tuple.push_back(position);
  tuple.push_back(b);
  if (tuple.size() > 2 && !(a < tuple[1] && tuple[1] < b)) return std::nullopt;
  return tuple;
}

void require_pair(std::span<const int> starts, int pair) {
  if (pair < 0 || pair + 1 >= static_cast<int>(starts.size())) {
    throw std::invalid_argument("prescribed pair index out of range");
  }
}

}  // namespace

std::map<std::vector<int>, Rational> prescribed_tuple_weights(std::span<const int> starts, int pair, int horizon,
                                                              const OracleOptions& options) {
  require_lattice_starts(starts);
  require_pair(starts, pair);
  const auto total = evolution_count(starts, horizon, options);
  const std::vector<int> walkers(starts.begin(), starts.end());
  auto parts = run_partitioned(total, options.partitions, [&](std::uint64_t first, std::uint64_t last) {
    AnnihilationSimulator sim(walkers, horizon);
    std::map<std::vector<int>, std::uint64_t> counts;
    for (auto index = first; index < last; ++index) {
      if (auto tuple = prescribed_tuple(sim.run(IndexSteps(index, horizon)), pair)) ++counts[*tuple];
    }
    return counts;
  });
  std::map<std::vector<int>, std::uint64_t> counts;
  for (const auto& part : parts) {
    for (const auto& [tuple, count] : part) counts[tuple] += count;
  }
  const auto unit = Rational::inverse_power_of_two(static_cast<unsigned>(starts.size()) * static_cast<unsigned>(horizon));
  std::map<std::vector<int>, Rational> weights;
  for (const auto& [tuple, count] : counts) weights.emplace(tuple, Rational(mpq_class(mpz_class(std::to_string(count)))) * unit);
  return weights;
}

Rational prescribed_annihilation_weight(std::span<const int> starts, int pair, int a, std::span<const int> survivors,
                                        int b, int horizon, const OracleOptions& options) {
  require_lattice_starts(starts);
  require_pair(starts, pair);
  if (survivors.size() + 2 != starts.size()) throw std::invalid_argument("prescribed: need n - 2 survivor targets");
  if (!(a < b)) throw std::invalid_argument("prescribed: ghost positions must satisfy a < b");
  for (std::size_t i = 1; i < survivors.size(); ++i) {
    if (survivors[i - 1] >= survivors[i]) throw std::invalid_argument("prescribed: survivor targets must increase");
  }
  if (!survivors.empty() && !(a < survivors.front() && survivors.front() < b)) {
    throw std::invalid_argument("prescribed: targets must satisfy a < y_1 < b");
  }
  std::vector<int> key{a};
  key.insert(key.end(), survivors.begin(), survivors.end());
  key.push_back(b);
  auto weights = prescribed_tuple_weights(starts, pair, horizon, options);
  auto it = weights.find(key);
  return it == weights.end() ? Rational(0) : it->second;
}

}  // namespace ghostwalk
