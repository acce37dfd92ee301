#include "ghostwalk/prescribed.hpp"

#include <stdexcept>

#include "ghostwalk/dynamics.hpp"
#include "ghostwalk/spacetime.hpp"

namespace ghostwalk {

namespace {

void require_canonical(const std::vector<int>& tuple, std::size_t n) {
  if (tuple.size() != n) {
    throw std::invalid_argument("tuple has " + std::to_string(tuple.size()) + " positions, expected " + std::to_string(n));
  }
  if (n < 2) throw std::invalid_argument("prescribed systems need at least two walkers");
  const int a = tuple.front();
  const int b = tuple.back();
  if (!(a < b)) throw std::invalid_argument("tuple must satisfy a < b");
  for (std::size_t i = 2; i + 1 < n; ++i) {
    if (tuple[i - 1] >= tuple[i]) throw std::invalid_argument("tuple survivor positions must increase");
  }
  if (n > 2 && !(a < tuple[1] && tuple[1] < b)) throw std::invalid_argument("tuple must satisfy a < y_1 < b");
}

nlohmann::json rationals(const RationalVector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i).str());
  return out;
}

nlohmann::json result_json(const SolveResult<Rational>& result) {
  if (const auto* ok = std::get_if<Consistent<Rational>>(&result)) {
    return {{"result", "consistent"},
            {"solution", rationals(ok->solution)},
            {"nullspace_dimension", ok->nullspace_dimension}};
  }
  return {{"result", "inconsistent"}, {"certificate", rationals(std::get<Inconsistent<Rational>>(result).certificate)}};
}

}  // namespace

LinearSystem build_system(std::span<const int> starts, int pair, int horizon,
                          const std::vector<std::vector<int>>& tuples) {
  const auto n = starts.size();
  for (const auto& tuple : tuples) require_canonical(tuple, n);

  const auto instance = make_lattice_instance(starts, horizon);
  const auto& graph = instance.graph;
  auto weight = [&](int from, int to) {
    auto target = graph.find(lattice_label(to, horizon));
    if (!target) return Rational(0);
    return path_generating_function(graph, graph.lattice_vertex(from, 0), *target);
  };

  LinearSystem system;
  for_each_permutation(static_cast<int>(n), [&](std::span<const int> perm) {
    system.permutations.emplace_back(perm.begin(), perm.end());
  });
  system.tuples = tuples;
  const auto rows = static_cast<Eigen::Index>(tuples.size());
  const auto cols = static_cast<Eigen::Index>(system.permutations.size());
  system.matrix = RationalMatrix::Zero(rows, cols);
  system.rhs = RationalVector::Zero(rows);
  if (tuples.empty()) return system;

  const auto oracle = prescribed_tuple_weights(starts, pair, horizon);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& z = tuples[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& perm = system.permutations[static_cast<std::size_t>(c)];
      Rational entry(1);
      for (std::size_t i = 0; i < n; ++i) entry *= weight(starts[i], z[static_cast<std::size_t>(perm[i])]);
      system.matrix(r, c) = entry;
    }
    auto it = oracle.find(z);
    system.rhs(r) = it == oracle.end() ? Rational(0) : it->second;
  }
  return system;
}

std::vector<std::vector<int>> prescribed_tuples(std::span<const int> starts, int pair, int horizon) {
  std::vector<std::vector<int>> out;
  for (const auto& [tuple, weight] : prescribed_tuple_weights(starts, pair, horizon)) {
    if (!weight.is_zero()) out.push_back(tuple);
  }
  return out;
}

SystemAnalysis analyze_system(const LinearSystem& system) {
  SystemAnalysis out;
  const auto rows = system.matrix.rows();
  const auto full = solve_exact(system.matrix, system.rhs);
  out.inconsistent = !is_consistent(full);

  nlohmann::json subsets = nlohmann::json::array();
  bool every_subset_consistent = rows > 0;
  for (Eigen::Index drop = 0; drop < rows && rows > 1; ++drop) {
    RationalMatrix sub(rows - 1, system.matrix.cols());
    RationalVector sub_rhs(rows - 1);
    nlohmann::json kept = nlohmann::json::array();
    for (Eigen::Index r = 0, o = 0; r < rows; ++r) {
      if (r == drop) continue;
      sub.row(o) = system.matrix.row(r);
      sub_rhs(o) = system.rhs(r);
      kept.push_back(system.tuples[static_cast<std::size_t>(r)]);
      ++o;
    }
    auto result = solve_exact(sub, sub_rhs);
    every_subset_consistent = every_subset_consistent && is_consistent(result);
    auto entry = result_json(result);
    entry["tuples"] = kept;
    subsets.push_back(entry);
  }
  out.minimal = out.inconsistent && every_subset_consistent;

  nlohmann::json matrix = nlohmann::json::array();
  for (Eigen::Index r = 0; r < rows; ++r) matrix.push_back(rationals(system.matrix.row(r).transpose()));
  out.report = result_json(full);
  out.report["system"] = {{"rows", rows}, {"cols", system.matrix.cols()}};
  out.report["tuples"] = system.tuples;
  out.report["permutations"] = system.permutations;
  out.report["matrix"] = matrix;
  out.report["rhs"] = rationals(system.rhs);
  out.report["subset_results"] = subsets;
  out.report["minimal"] = out.minimal;
  return out;
}

nlohmann::json PrescribedReport::to_json() const {
  auto doc = analysis.report;
  doc["tuple_count_matches"] = tuple_count_matches;
  doc["passed"] = passed();
  return doc;
}

PrescribedReport reproduce_prescribed_example() {
  const std::vector<int> starts{0, 2, 4};
  constexpr int pair = 0;
  constexpr int horizon = 4;
  const std::vector<std::vector<int>> tuples{{-2, 0, 2}, {-2, 0, 4}, {-2, 2, 4}, {0, 2, 4}};

  PrescribedReport report;
  report.tuple_count_matches = prescribed_tuples(starts, pair, horizon) == tuples;
  report.analysis = analyze_system(build_system(starts, pair, horizon, tuples));
  return report;
}

}  // namespace ghostwalk
