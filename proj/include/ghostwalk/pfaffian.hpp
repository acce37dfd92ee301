#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "ghostwalk/linalg.hpp"
#include "ghostwalk/spacetime.hpp"

namespace ghostwalk {

namespace detail {

template <typename Derived>
typename Derived::Scalar pfaffian_expand(const Eigen::MatrixBase<Derived>& a, std::vector<Eigen::Index>& rest) {
  using Scalar = typename Derived::Scalar;
  if (rest.empty()) return Scalar(1);
  const Eigen::Index first = rest.front();
  Scalar total(0);
  for (std::size_t t = 1; t < rest.size(); ++t) {
    const Eigen::Index partner = rest[t];
    if (a(first, partner) == Scalar(0)) continue;
    std::vector<Eigen::Index> minor;
    minor.reserve(rest.size() - 2);
    for (std::size_t u = 1; u < rest.size(); ++u) {
      if (u != t) minor.push_back(rest[u]);
    }
    Scalar term = a(first, partner) * pfaffian_expand(a, minor);
    total = t % 2 == 1 ? total + term : total - term;
  }
  return total;
}

}  // namespace detail

/// Throws std::invalid_argument unless `a` is square with a(i,j) = -a(j,i) and zero diagonal.
template <typename Derived>
void require_antisymmetric(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() != a.cols()) throw std::invalid_argument("matrix is not square");
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    if (!(a(i, i) == Scalar(0))) throw std::invalid_argument("antisymmetric matrix needs a zero diagonal");
    for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
      if (!(a(i, j) == -a(j, i))) throw std::invalid_argument("matrix is not antisymmetric");
    }
  }
}

/// Pf(A) = sum over perfect matchings of sgn * prod A[p][q], by expansion along
/// the first row. Needs only ring operations, so it also runs over symbolic scalars.
template <typename Derived>
typename Derived::Scalar pfaffian(const Eigen::MatrixBase<Derived>& a) {
  require_antisymmetric(a);
  if (a.rows() % 2 != 0) throw std::invalid_argument("pfaffian: odd dimension");
  std::vector<Eigen::Index> rest(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) rest[static_cast<std::size_t>(i)] = i;
  return detail::pfaffian_expand(a, rest);
}

/// Rational n x n matrix with A[i][j] = -A[j][i] and A[i][i] = 0.
class AntisymmetricMatrix {
public:
  explicit AntisymmetricMatrix(RationalMatrix values) : values_(std::move(values)) { require_antisymmetric(values_); }

  /// Fills the strict upper triangle from `upper(i, j)` and mirrors it.
  template <typename Fn>
  static AntisymmetricMatrix from_upper(Eigen::Index n, Fn&& upper) {
    RationalMatrix m = RationalMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        m(i, j) = upper(i, j);
        m(j, i) = -m(i, j);
      }
    }
    return AntisymmetricMatrix(std::move(m));
  }

  Eigen::Index size() const { return values_.rows(); }
  const Rational& operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }
  const RationalMatrix& values() const { return values_; }

private:
  RationalMatrix values_;
};

inline Rational pfaffian(const AntisymmetricMatrix& a) { return pfaffian(a.values()); }

/// A_IJ = 2 sum_{a<b} W(x_I -> b) W(x_J -> a) + sum_c W(x_I -> c) W(x_J -> c), over `targets`.
Rational pairwise_weight(const SpacetimeGraph& graph, VertexId left_source, VertexId right_source,
                         const TargetSet& targets);

AntisymmetricMatrix build_antisymmetric(const SpacetimeGraph& graph, const Configuration& config);

/// Pf of the pairwise matrix; the weight that every consecutive pair has coalesced.
Rational pairwise_coalescence_weight(const SpacetimeGraph& graph, const Configuration& config);

}  // namespace ghostwalk
