#include "ghostwalk/pfaffian.hpp"

namespace ghostwalk {

namespace {

Rational pairwise_from_rows(const std::vector<Rational>& left, const std::vector<Rational>& right,
                            const TargetSet& targets) {
  const auto& vertices = targets.vertices();
  Rational crossing(0);
  Rational diagonal(0);
  // Running sum of W(x_J -> a) over targets a strictly before the current b.
  Rational right_before(0);
  for (auto b : vertices) {
    crossing += left[b.slot()] * right_before;
    diagonal += left[b.slot()] * right[b.slot()];
    right_before += right[b.slot()];
  }
  return Rational(2) * crossing + diagonal;
}

}  // namespace

Rational pairwise_weight(const SpacetimeGraph& graph, VertexId left_source, VertexId right_source,
                         const TargetSet& targets) {
  return pairwise_from_rows(path_generating_row(graph, left_source), path_generating_row(graph, right_source),
                            targets);
}

AntisymmetricMatrix build_antisymmetric(const SpacetimeGraph& graph, const Configuration& config) {
  validate_configuration(graph, config);
  std::vector<std::vector<Rational>> rows;
  for (auto x : config.sources) rows.push_back(path_generating_row(graph, x));
  return AntisymmetricMatrix::from_upper(static_cast<Eigen::Index>(rows.size()), [&](Eigen::Index i, Eigen::Index j) {
    return pairwise_from_rows(rows[static_cast<std::size_t>(i)], rows[static_cast<std::size_t>(j)], config.targets);
  });
}

Rational pairwise_coalescence_weight(const SpacetimeGraph& graph, const Configuration& config) {
  if (config.sources.size() % 2 != 0) throw std::invalid_argument("pairwise_coalescence_weight: odd number of sources");
  return pfaffian(build_antisymmetric(graph, config));
}

}  // namespace ghostwalk
