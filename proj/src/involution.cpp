#include "ghostwalk/involution.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ghostwalk {

namespace {

Rational factorial(std::size_t k) {
  Rational f(1);
  for (std::size_t i = 2; i <= k; ++i) f *= Rational(static_cast<long>(i));
  return f;
}

std::ptrdiff_t position_in(const Path& path, VertexId v) {
  auto it = std::find(path.begin(), path.end(), v);
  return it == path.end() ? -1 : it - path.begin();
}

Path prefix_through(const Path& path, std::ptrdiff_t at) { return Path(path.begin(), path.begin() + at + 1); }
Path suffix_from(const Path& path, std::ptrdiff_t at) { return Path(path.begin() + at, path.end()); }

/// incoming ends at v, outgoing starts at v.
Path glue(const Path& incoming, const Path& outgoing) {
  if (incoming.empty() || outgoing.empty() || incoming.back() != outgoing.front()) {
    throw std::invalid_argument("attribute: incoming and ghost paths do not meet");
  }
  Path out = incoming;
  out.insert(out.end(), outgoing.begin() + 1, outgoing.end());
  return out;
}

std::string path_string(const SpacetimeGraph& graph, const Path& path) {
  std::string s;
  for (std::size_t i = 0; i < path.size(); ++i) s += (i ? ">" : "") + graph.label(path[i]);
  return s;
}

}  // namespace

CastingContext::CastingContext(const SpacetimeGraph& graph, const Configuration& config, FinalState state)
    : graph_(&graph), config_(&config), state_(std::move(state)) {
  validate_configuration(graph, config);
  validate_final_state(state_);
  if (state_.particles() != config.sources.size()) {
    throw std::invalid_argument("final state describes " + std::to_string(state_.particles()) +
                                " particles but there are " + std::to_string(config.sources.size()) + " sources");
  }
  for (int c = 0; c < static_cast<int>(state_.particles()); ++c) {
    const int key = column_key(state_, c);
    if (!config.targets.contains(key)) throw std::invalid_argument("final state position " + std::to_string(key) + " is not a target");
    columns_.push_back(config.targets.vertex(key));
  }
}

std::optional<std::size_t> CastingContext::shared_pair(int c1, int c2) const {
  const int s = static_cast<int>(state_.survivors.size());
  if (c1 < s || c2 < s || c1 == c2) return std::nullopt;
  if ((c1 - s) / 2 != (c2 - s) / 2) return std::nullopt;
  return static_cast<std::size_t>((c1 - s) / 2);
}

Rational casting_path_product(const CastingContext& ctx, const Casting& casting) {
  Rational w(1);
  for (const auto& p : casting.paths) w *= ctx.graph().path_weight(p);
  return w;
}

int casting_sign(const CastingContext& ctx, const Casting& casting) {
  return formal_sign(ctx.state(), casting.pi) * permutation_sign(casting.pi);
}

void validate_casting(const CastingContext& ctx, const Casting& casting) {
  if (!is_candidate(ctx.state(), casting.pi)) throw std::invalid_argument("casting bijection is not a candidate");
  if (casting.paths.size() != casting.pi.size()) throw std::invalid_argument("casting needs one path per actor");
  for (std::size_t actor = 0; actor < casting.paths.size(); ++actor) {
    const auto& p = casting.paths[actor];
    if (!ctx.graph().is_path(p) || p.front() != ctx.config().sources[actor] ||
        p.back() != ctx.column_vertex(casting.pi[actor])) {
      throw std::invalid_argument("casting path of actor " + std::to_string(actor) + " does not fit its role");
    }
  }
}

std::string to_string(const CastingContext& ctx, const Casting& casting) {
  std::ostringstream os;
  os << "pi=[";
  for (std::size_t i = 0; i < casting.pi.size(); ++i) os << (i ? "," : "") << casting.pi[i];
  os << "] paths=[";
  for (std::size_t i = 0; i < casting.paths.size(); ++i) os << (i ? " | " : "") << path_string(ctx.graph(), casting.paths[i]);
  os << "]";
  return os.str();
}

std::vector<Casting> enumerate_candidate_castings(const CastingContext& ctx, std::size_t cap) {
  const int n = ctx.actors();
  // Paths from each source to each column vertex, computed once.
  std::vector<std::vector<std::vector<Path>>> paths(static_cast<std::size_t>(n));
  for (int actor = 0; actor < n; ++actor) {
    for (int col = 0; col < n; ++col) {
      paths[static_cast<std::size_t>(actor)].push_back(
          enumerate_paths(ctx.graph(), ctx.config().sources[static_cast<std::size_t>(actor)], ctx.column_vertex(col), cap));
    }
  }

  std::vector<Casting> out;
  for (const auto& pi : candidate_bijections(ctx.state(), n)) {
    std::vector<const std::vector<Path>*> choices;
    bool empty = false;
    for (int actor = 0; actor < n; ++actor) {
      choices.push_back(&paths[static_cast<std::size_t>(actor)][static_cast<std::size_t>(pi[static_cast<std::size_t>(actor)])]);
      empty = empty || choices.back()->empty();
    }
    if (empty) continue;
    std::vector<std::size_t> digit(static_cast<std::size_t>(n), 0);
    while (true) {
      if (out.size() >= cap) throw ResourceLimitError("candidate casting enumeration exceeded its cap", cap);
      Casting c{pi, {}};
      for (int actor = 0; actor < n; ++actor) {
        c.paths.push_back((*choices[static_cast<std::size_t>(actor)])[digit[static_cast<std::size_t>(actor)]]);
      }
      out.push_back(std::move(c));
      std::size_t pos = 0;
      while (pos < digit.size() && ++digit[pos] == choices[pos]->size()) digit[pos++] = 0;
      if (pos == digit.size()) break;
    }
  }
  return out;
}

std::optional<Crossing> first_crossing(const SpacetimeGraph& graph, const std::vector<Path>& paths,
                                       const std::vector<bool>& active) {
  std::optional<Crossing> best;
  std::optional<int> best_time;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (!active[i]) continue;
    for (std::size_t j = i + 1; j < paths.size(); ++j) {
      if (!active[j]) continue;
      // Paths advance in time, so the first shared vertex along P_I is the earliest.
      for (auto v : paths[i]) {
        if (position_in(paths[j], v) < 0) continue;
        const int t = graph.time(v);
        if (!best_time || t < *best_time) {
          best = Crossing{static_cast<int>(i), static_cast<int>(j), v};
          best_time = t;
        }
        break;
      }
    }
  }
  return best;
}

RehearsalResult rehearse(const CastingContext& ctx, const Casting& casting) {
  validate_casting(ctx, casting);
  const auto n = casting.paths.size();
  const int s = static_cast<int>(ctx.state().survivors.size());
  std::vector<bool> active(n, true);
  Performance perf;
  perf.ghosts.resize(ctx.state().collisions());

  while (auto crossing = first_crossing(ctx.graph(), casting.paths, active)) {
    const auto i = static_cast<std::size_t>(crossing->lower_actor);
    const auto j = static_cast<std::size_t>(crossing->upper_actor);
    auto pair = ctx.shared_pair(casting.pi[i], casting.pi[j]);
    if (!pair) return {RehearsalFailure{RehearsalFailure::Kind::spurious, *crossing}};

    const auto at_i = position_in(casting.paths[i], crossing->vertex);
    const auto at_j = position_in(casting.paths[j], crossing->vertex);
    perf.collisions.push_back({crossing->vertex, crossing->lower_actor, crossing->upper_actor, *pair,
                               prefix_through(casting.paths[i], at_i), prefix_through(casting.paths[j], at_j)});
    const bool i_holds_a = casting.pi[i] == ghost_column(ctx.state(), *pair, 1);
    auto& ghost = perf.ghosts[*pair];
    ghost.toward_a = suffix_from(i_holds_a ? casting.paths[i] : casting.paths[j], i_holds_a ? at_i : at_j);
    ghost.toward_b = suffix_from(i_holds_a ? casting.paths[j] : casting.paths[i], i_holds_a ? at_j : at_i);
    active[i] = false;
    active[j] = false;
  }

  for (std::size_t actor = 0; actor < n; ++actor) {
    if (!active[actor]) continue;
    if (casting.pi[actor] >= s) return {RehearsalFailure{RehearsalFailure::Kind::stalled, {}}};
    perf.survivors.push_back({static_cast<int>(actor), casting.pi[actor], casting.paths[actor]});
  }
  return {std::move(perf)};
}

Casting attribute(const CastingContext& ctx, const Performance& performance) {
  const auto n = static_cast<std::size_t>(ctx.actors());
  const auto& state = ctx.state();
  if (performance.ghosts.size() != state.collisions() || performance.collisions.size() != state.collisions()) {
    throw std::invalid_argument("attribute: performance does not match the final state");
  }
  Casting c{Bijection(n, -1), std::vector<Path>(n)};
  for (const auto& col : performance.collisions) {
    const auto& ghost = performance.ghosts.at(col.pair);
    const auto [a, b] = state.ghost_pairs[col.pair];
    const auto lower = static_cast<std::size_t>(col.lower_actor);
    const auto upper = static_cast<std::size_t>(col.upper_actor);
    // The actor starting further left continues along the ghost ending further right.
    const bool lower_takes_b = a <= b;
    c.pi[lower] = ghost_column(state, col.pair, lower_takes_b ? 2 : 1);
    c.pi[upper] = ghost_column(state, col.pair, lower_takes_b ? 1 : 2);
    c.paths[lower] = glue(col.lower_incoming, lower_takes_b ? ghost.toward_b : ghost.toward_a);
    c.paths[upper] = glue(col.upper_incoming, lower_takes_b ? ghost.toward_a : ghost.toward_b);
  }
  for (const auto& survivor : performance.survivors) {
    c.pi.at(static_cast<std::size_t>(survivor.actor)) = survivor.slot;
    c.paths.at(static_cast<std::size_t>(survivor.actor)) = survivor.path;
  }
  validate_casting(ctx, c);
  return c;
}

Casting segment_swap(const Casting& casting, int lower_actor, int upper_actor, VertexId v) {
  const auto i = static_cast<std::size_t>(lower_actor);
  const auto j = static_cast<std::size_t>(upper_actor);
  if (lower_actor == upper_actor || i >= casting.paths.size() || j >= casting.paths.size()) {
    throw std::invalid_argument("segment_swap: bad actor pair");
  }
  const auto at_i = position_in(casting.paths[i], v);
  const auto at_j = position_in(casting.paths[j], v);
  if (at_i < 0 || at_j < 0) throw std::invalid_argument("segment_swap: vertex is not shared by both paths");
  Casting out = casting;
  out.paths[i] = prefix_through(casting.paths[i], at_i);
  out.paths[i].insert(out.paths[i].end(), casting.paths[j].begin() + at_j + 1, casting.paths[j].end());
  out.paths[j] = prefix_through(casting.paths[j], at_j);
  out.paths[j].insert(out.paths[j].end(), casting.paths[i].begin() + at_i + 1, casting.paths[i].end());
  std::swap(out.pi[i], out.pi[j]);
  return out;
}

Casting global_involution(const CastingContext& ctx, const Casting& casting) {
  auto result = rehearse(ctx, casting);
  if (result.succeeded() || result.failure().kind == RehearsalFailure::Kind::stalled) return casting;
  const auto& crossing = result.failure().crossing;
  return segment_swap(casting, crossing.lower_actor, crossing.upper_actor, crossing.vertex);
}

void AuditReport::merge(const AuditReport& other) {
  checked += other.checked;
  fixed_points += other.fixed_points;
  paired += other.paired;
  violations.insert(violations.end(), other.violations.begin(), other.violations.end());
}

AuditReport audit_involution(const CastingContext& ctx, std::size_t cap) {
  AuditReport report;
  const auto& state = ctx.state();
  auto flag = [&](std::string check, const Casting& c, std::string note = {}) {
    report.violations.push_back(
        {std::move(check), to_string(state) + " " + to_string(ctx, c) + (note.empty() ? "" : ": " + note)});
  };

  int plus_pairs = 0;
  for (int e : ghost_signs(state)) plus_pairs += e > 0 ? 1 : 0;
  const int expected_sign = plus_pairs % 2 == 0 ? 1 : -1;

  Rational signed_sum(0);
  Rational fixed_sum(0);
  for (const auto& c : enumerate_candidate_castings(ctx, cap)) {
    ++report.checked;
    const Rational weight = casting_path_product(ctx, c);
    const int sign = casting_sign(ctx, c);
    signed_sum += sign > 0 ? weight : -weight;

    const auto image = global_involution(ctx, c);
    const auto rehearsal = rehearse(ctx, c);
    if (!rehearsal.succeeded() && rehearsal.failure().kind == RehearsalFailure::Kind::stalled) {
      flag("crossings-exist", c, "an active actor holds a ghost slot but no active paths cross");
    }

    if (global_involution(ctx, image) != c) flag("involution", c);
    const bool fixed = image == c;
    if (fixed != rehearsal.succeeded()) flag("fixed-points", c);

    if (fixed) {
      ++report.fixed_points;
      fixed_sum += sign > 0 ? weight : -weight;
      if (permutation_sign(c.pi) != expected_sign) flag("sign-identity", c);
      if (rehearsal.succeeded()) {
        const auto& perf = rehearsal.performance();
        const auto back = attribute(ctx, perf);
        if (back != c) flag("bijection", c, "attribution does not invert rehearsal");
        const auto again = rehearse(ctx, back);
        if (!again.succeeded() || again.performance() != perf) flag("bijection", c, "rehearsal does not invert attribution");
      }
    } else {
      ++report.paired;
      if (!is_candidate(state, image.pi)) flag("pairing", c, "partner is not a candidate");
      if (casting_path_product(ctx, image) != weight) flag("pairing", c, "partner weight differs");
      if (permutation_sign(image.pi) != -permutation_sign(c.pi)) flag("pairing", c, "partner sign not reversed");
      if (casting_sign(ctx, image) != -sign) flag("pairing", c, "partner contribution does not cancel");
    }
  }

  const Rational k_factorial = factorial(state.collisions());
  const Rational z = annihilation_weight(ctx.graph(), ctx.config(), state);
  if (signed_sum / k_factorial != z) {
    report.violations.push_back({"cancellation", to_string(state) + ": casting sum " + (signed_sum / k_factorial).str() +
                                                     " differs from determinant value " + z.str()});
  }
  if (fixed_sum / k_factorial != z) {
    report.violations.push_back({"cancellation", to_string(state) + ": fixed-point sum " + (fixed_sum / k_factorial).str() +
                                                     " differs from determinant value " + z.str()});
  }
  return report;
}

nlohmann::json audit_report_to_json(const AuditReport& report) {
  nlohmann::json violations = nlohmann::json::array();
  for (const auto& v : report.violations) violations.push_back({{"check", v.check}, {"detail", v.detail}});
  return {{"checked", report.checked},
          {"fixed_points", report.fixed_points},
          {"paired", report.paired},
          {"violations", violations}};
}

}  // namespace ghostwalk
