#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ghostwalk/linalg.hpp"
#include "ghostwalk/spacetime.hpp"

namespace testing_support {

// Integer polynomial in commuting variables; a monomial is its sorted variable list.
class Poly {
public:
  Poly(long c = 0) {  // NOLINT(google-explicit-constructor)
    if (c != 0) terms_[{}] = c;
  }
  static Poly var(int id) {
    Poly p;
    p.terms_[{id}] = 1;
    return p;
  }

  Poly operator-() const {
    Poly out = *this;
    for (auto& [m, c] : out.terms_) c = -c;
    return out;
  }
  friend Poly operator+(const Poly& a, const Poly& b) {
    Poly out = a;
    for (const auto& [m, c] : b.terms_) out.add(m, c);
    return out;
  }
  friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }
  friend Poly operator*(const Poly& a, const Poly& b) {
    Poly out;
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) {
        std::vector<int> m = ma;
        m.insert(m.end(), mb.begin(), mb.end());
        std::sort(m.begin(), m.end());
        out.add(m, ca * cb);
      }
    }
    return out;
  }
  Poly& operator+=(const Poly& b) { return *this = *this + b; }
  Poly& operator-=(const Poly& b) { return *this = *this - b; }
  Poly& operator*=(const Poly& b) { return *this = *this * b; }
  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }

private:
  void add(const std::vector<int>& m, long c) {
    auto& slot = terms_[m];
    slot += c;
    if (slot == 0) terms_.erase(m);
  }
  std::map<std::vector<int>, long> terms_;
};

}  // namespace testing_support

namespace Eigen {
template <>
struct NumTraits<testing_support::Poly> : GenericNumTraits<testing_support::Poly> {
  using Poly = testing_support::Poly;
  using Real = Poly;
  using NonInteger = Poly;
  using Literal = Poly;
  using Nested = Poly;
  enum { IsComplex = 0, IsInteger = 1, IsSigned = 1, RequireInitialization = 1, ReadCost = 1, AddCost = 4, MulCost = 8 };
  static Poly epsilon() { return Poly(0); }
  static Poly dummy_precision() { return Poly(0); }
  static int digits10() { return 0; }
};
}  // namespace Eigen

namespace testing_support {

// Entry (i, j), i < j, is the variable 10 * (i + 1) + (j + 1).
inline ghostwalk::Matrix<Poly> labeled_antisymmetric(int n) {
  ghostwalk::Matrix<Poly> m(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = Poly(0);
    for (int j = i + 1; j < n; ++j) {
      m(i, j) = Poly::var(10 * (i + 1) + (j + 1));
      m(j, i) = -m(i, j);
    }
  }
  return m;
}

// x0 and x2 meet at v while every path of the middle source x1 stays on its
// own branch: a tunnel the lattice never has.
inline ghostwalk::LatticeInstance tunnel_instance() {
  using ghostwalk::VertexId;
  std::vector<std::string> labels{"x0", "x1", "x2", "v", "u", "y0", "y1", "y2"};
  auto id = [](int i) { return VertexId{i}; };
  const ghostwalk::Rational one(1);
  std::vector<ghostwalk::Edge> edges{{id(0), id(3), one}, {id(2), id(3), one}, {id(1), id(4), one},
                                     {id(3), id(5), one}, {id(3), id(7), one}, {id(4), id(6), one}};
  ghostwalk::SpacetimeGraph graph(labels, edges, std::vector<int>{0, 0, 0, 1, 1, 2, 2, 2});
  ghostwalk::Configuration config{{id(0), id(1), id(2)}, ghostwalk::TargetSet({0, 1, 2}, {id(5), id(6), id(7)}), 2};
  return {std::move(graph), std::move(config)};
}

}  // namespace testing_support
