#include "ghostwalk/ghostdet.hpp"

#include <sstream>
#include <stdexcept>

namespace ghostwalk {

namespace {

Rational factorial(std::size_t k) {
  Rational f(1);
  for (std::size_t i = 2; i <= k; ++i) f *= Rational(static_cast<long>(i));
  return f;
}

std::vector<std::vector<Rational>> source_rows(const SpacetimeGraph& graph, const Configuration& config) {
  std::vector<std::vector<Rational>> rows;
  rows.reserve(config.sources.size());
  for (auto x : config.sources) rows.push_back(path_generating_row(graph, x));
  return rows;
}

void require_fits(const Configuration& config, const FinalState& state) {
  validate_final_state(state);
  if (state.particles() != config.sources.size()) {
    throw std::invalid_argument("final state describes " + std::to_string(state.particles()) + " particles but " +
                                std::to_string(config.sources.size()) + " sources were given");
  }
  auto check = [&](int key) {
    if (!config.targets.contains(key)) throw std::invalid_argument("final state position " + std::to_string(key) + " is not a target");
  };
  for (int y : state.survivors) check(y);
  for (auto [a, b] : state.ghost_pairs) {
    check(a);
    check(b);
  }
}

void combinations(std::span<const int> keys, std::size_t size, std::size_t from, std::vector<int>& current,
                  std::vector<std::vector<int>>& out) {
  if (current.size() == size) {
    out.push_back(current);
    return;
  }
  for (std::size_t i = from; i + (size - current.size()) <= keys.size(); ++i) {
    current.push_back(keys[i]);
    combinations(keys, size, i + 1, current, out);
    current.pop_back();
  }
}

}  // namespace

std::strong_ordering operator<=>(const FinalState& lhs, const FinalState& rhs) {
  if (auto c = lhs.collisions() <=> rhs.collisions(); c != 0) return c;
  if (auto c = lhs.survivors <=> rhs.survivors; c != 0) return c;
  return lhs.ghost_pairs <=> rhs.ghost_pairs;
}

void validate_final_state(const FinalState& state) {
  for (std::size_t i = 1; i < state.survivors.size(); ++i) {
    if (state.survivors[i - 1] >= state.survivors[i]) {
      throw std::invalid_argument("final state survivors must be strictly increasing");
    }
  }
}

std::string to_string(const FinalState& state) {
  std::ostringstream os;
  os << "k=" << state.collisions() << " survivors=[";
  for (std::size_t i = 0; i < state.survivors.size(); ++i) os << (i ? "," : "") << state.survivors[i];
  os << "] ghosts=[";
  for (std::size_t j = 0; j < state.ghost_pairs.size(); ++j) {
    os << (j ? ";" : "") << "(" << state.ghost_pairs[j].first << "," << state.ghost_pairs[j].second << ")";
  }
  os << "]";
  return os.str();
}

std::vector<int> ghost_signs(const FinalState& state) {
  std::vector<int> signs;
  signs.reserve(state.ghost_pairs.size());
  for (auto [a, b] : state.ghost_pairs) signs.push_back(a <= b ? 1 : -1);
  return signs;
}

int state_sign(const FinalState& state) {
  int sign = 1;
  for (int e : ghost_signs(state)) sign *= e;
  return sign;
}

int column_key(const FinalState& state, int column) {
  const auto s = static_cast<int>(state.survivors.size());
  if (column < 0 || column >= static_cast<int>(state.particles())) throw std::out_of_range("column_key: bad column");
  if (column < s) return state.survivors[static_cast<std::size_t>(column)];
  const auto& pair = state.ghost_pairs[static_cast<std::size_t>((column - s) / 2)];
  return (column - s) % 2 == 0 ? pair.first : pair.second;
}

bool is_candidate(const FinalState& state, std::span<const int> pi) {
  if (pi.size() != state.particles()) return false;
  std::vector<int> inv(pi.size(), -1);
  for (std::size_t actor = 0; actor < pi.size(); ++actor) {
    auto col = pi[actor];
    if (col < 0 || static_cast<std::size_t>(col) >= pi.size() || inv[static_cast<std::size_t>(col)] != -1) return false;
    inv[static_cast<std::size_t>(col)] = static_cast<int>(actor);
  }
  auto signs = ghost_signs(state);
  for (std::size_t j = 0; j < signs.size(); ++j) {
    const int first = inv[static_cast<std::size_t>(ghost_column(state, j, 1))];
    const int second = inv[static_cast<std::size_t>(ghost_column(state, j, 2))];
    if (signs[j] > 0 ? first < second : first > second) return false;
  }
  return true;
}

int formal_sign(const FinalState& state, std::span<const int> pi) {
  auto inv = inverse_permutation(pi);
  int sign = 1;
  for (std::size_t j = 0; j < state.ghost_pairs.size(); ++j) {
    if (inv[static_cast<std::size_t>(ghost_column(state, j, 1))] > inv[static_cast<std::size_t>(ghost_column(state, j, 2))]) {
      sign = -sign;
    }
  }
  return sign;
}

std::vector<Bijection> candidate_bijections(const FinalState& state, int n) {
  if (n < 0 || state.particles() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("candidate_bijections: s + 2k must equal n");
  }
  if (n > kMaxLeibnizSize) throw ResourceLimitError("candidate bijection enumeration", kMaxLeibnizSize);
  std::vector<Bijection> out;
  for_each_permutation(n, [&](std::span<const int> perm) {
    if (is_candidate(state, perm)) out.emplace_back(perm.begin(), perm.end());
  });
  return out;
}

GhostMatrix build_matrix(const SpacetimeGraph& graph, const Configuration& config, const FinalState& state) {
  require_fits(config, state);
  const auto n = static_cast<Eigen::Index>(config.sources.size());
  auto rows = source_rows(graph, config);
  GhostMatrix m;
  m.base = RationalMatrix::Zero(n, n);
  m.tags.resize(static_cast<std::size_t>(n));
  for (Eigen::Index col = 0; col < n; ++col) {
    const int c = static_cast<int>(col);
    const int s = static_cast<int>(state.survivors.size());
    if (c < s) {
      m.tags[static_cast<std::size_t>(col)] = {ColumnTag::Kind::survivor, c, 0};
    } else {
      m.tags[static_cast<std::size_t>(col)] = {ColumnTag::Kind::ghost, (c - s) / 2, (c - s) % 2 + 1};
    }
    const auto target = config.targets.vertex(column_key(state, c)).slot();
    for (Eigen::Index row = 0; row < n; ++row) m.base(row, col) = rows[static_cast<std::size_t>(row)][target];
  }
  return m;
}

std::vector<CandidateTerm> candidate_terms(const GhostMatrix& matrix, const FinalState& state) {
  const auto n = static_cast<int>(matrix.base.rows());
  std::vector<CandidateTerm> terms;
  for (auto& pi : candidate_bijections(state, n)) {
    CandidateTerm term;
    term.formal = formal_sign(state, pi);
    term.permutation = permutation_sign(pi);
    term.weight.sign = term.formal * term.permutation;
    term.weight.magnitude = Rational(1);
    for (int actor = 0; actor < n; ++actor) term.weight.magnitude *= matrix.base(actor, pi[static_cast<std::size_t>(actor)]);
    term.pi = std::move(pi);
    terms.push_back(std::move(term));
  }
  return terms;
}

Rational annihilation_weight(const GhostMatrix& matrix, const FinalState& state) {
  if (matrix.base.rows() != matrix.base.cols() || static_cast<std::size_t>(matrix.base.rows()) != state.particles()) {
    throw std::invalid_argument("annihilation_weight: matrix does not match the final state");
  }
  Rational total(0);
  for (const auto& term : candidate_terms(matrix, state)) total += term.weight.value();
  return total / factorial(state.collisions());
}

Rational annihilation_weight(const SpacetimeGraph& graph, const Configuration& config, const FinalState& state) {
  return annihilation_weight(build_matrix(graph, config, state), state);
}

Rational annihilation_weight_laplace(const SpacetimeGraph& graph, const Configuration& config,
                                     const FinalState& state) {
  if (state.collisions() != 1) throw std::invalid_argument("annihilation_weight_laplace: requires exactly one ghost pair");
  require_fits(config, state);
  const auto n = config.sources.size();
  const auto s = state.survivors.size();
  auto rows = source_rows(graph, config);
  auto weight = [&](std::size_t actor, int key) { return rows[actor][config.targets.vertex(key).slot()]; };

  const auto [a, b] = state.ghost_pairs.front();
  const int right = std::max(a, b);
  const int left = std::min(a, b);

  Rational total(0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      RationalMatrix minor(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s));
      Eigen::Index r = 0;
      for (std::size_t actor = 0; actor < n; ++actor) {
        if (actor == i || actor == j) continue;
        for (std::size_t l = 0; l < s; ++l) minor(r, static_cast<Eigen::Index>(l)) = weight(actor, state.survivors[l]);
        ++r;
      }
      // (-1)^{I+J+1} with 1-based I, J has the parity of i + j + 1.
      Rational term = weight(i, right) * weight(j, left) * determinant(minor);
      total += (i + j + 1) % 2 == 0 ? term : -term;
    }
  }
  return total;
}

std::vector<int> reachable_keys(const SpacetimeGraph& graph, const Configuration& config) {
  std::vector<char> reached(graph.vertex_count(), 0);
  for (auto x : config.sources) {
    // Weighted reachability can cancel; walk the edges instead.
    std::vector<char> seen(graph.vertex_count(), 0);
    seen[x.slot()] = 1;
    for (auto v : graph.topological_order()) {
      if (!seen[v.slot()]) continue;
      reached[v.slot()] = 1;
      for (const auto& e : graph.out_edges(v)) seen[e.to.slot()] = 1;
    }
  }
  std::vector<int> keys;
  for (std::size_t r = 0; r < config.targets.size(); ++r) {
    if (reached[config.targets.vertices()[r].slot()]) keys.push_back(config.targets.keys()[r]);
  }
  return keys;
}

std::vector<FinalState> all_final_states(int n, std::span<const int> keys, std::size_t cap) {
  if (n < 0) throw std::invalid_argument("all_final_states: negative particle count");
  std::vector<FinalState> out;
  std::vector<std::pair<int, int>> ordered_pairs;
  for (int a : keys) {
    for (int b : keys) ordered_pairs.emplace_back(a, b);
  }
  for (int k = 0; 2 * k <= n; ++k) {
    std::vector<std::vector<int>> survivor_sets;
    std::vector<int> current;
    combinations(keys, static_cast<std::size_t>(n - 2 * k), 0, current, survivor_sets);
    for (const auto& survivors : survivor_sets) {
      std::vector<std::size_t> digits(static_cast<std::size_t>(k), 0);
      while (true) {
        if (out.size() >= cap) throw ResourceLimitError("final state enumeration exceeded its cap", cap);
        FinalState state{survivors, {}};
        for (auto d : digits) state.ghost_pairs.push_back(ordered_pairs[d]);
        out.push_back(std::move(state));
        std::size_t pos = 0;
        while (pos < digits.size() && ++digits[pos] == ordered_pairs.size()) digits[pos++] = 0;
        if (pos == digits.size()) break;
      }
    }
  }
  return out;
}

nlohmann::json final_state_to_json(const FinalState& state, const SpacetimeGraph& graph, const TargetSet& targets) {
  auto id = [&](int key) { return graph.label(targets.vertex(key)); };
  nlohmann::json survivors = nlohmann::json::array();
  for (int y : state.survivors) survivors.push_back(id(y));
  nlohmann::json pairs = nlohmann::json::array();
  for (auto [a, b] : state.ghost_pairs) pairs.push_back({id(a), id(b)});
  return {{"k", state.collisions()}, {"survivors", std::move(survivors)}, {"ghost_pairs", std::move(pairs)}};
}

FinalState final_state_from_json(const nlohmann::json& doc, const SpacetimeGraph& graph, const TargetSet& targets) {
  auto key = [&](const nlohmann::json& id) {
    auto k = targets.key_of(graph.at(id.get<std::string>()));
    if (!k) throw std::invalid_argument("final state: " + id.dump() + " is not a target");
    return *k;
  };
  try {
    FinalState state;
    for (const auto& id : doc.at("survivors")) state.survivors.push_back(key(id));
    for (const auto& pair : doc.at("ghost_pairs")) {
      if (!pair.is_array() || pair.size() != 2) throw std::invalid_argument("final state: ghost pairs need two entries");
      state.ghost_pairs.emplace_back(key(pair[0]), key(pair[1]));
    }
    if (doc.contains("k") && doc.at("k").get<std::size_t>() != state.collisions()) {
      throw std::invalid_argument("final state: k disagrees with the number of ghost pairs");
    }
    validate_final_state(state);
    return state;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("final state: ") + e.what());
  }
}

}  // namespace ghostwalk
