#pragma once

#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "json.hpp"

#include "ghostwalk/linalg.hpp"
#include "ghostwalk/rational.hpp"

namespace ghostwalk {

/// Rows: final-position tuples z = (a, y_1, ..., y_{n-2}, b). Columns: every
/// pi in S_n in lexicographic order, entry prod_i W(x_i -> z_{pi(i)}).
/// rhs: prescribed annihilation weight of the tuple.
struct LinearSystem {
  RationalMatrix matrix;
  RationalVector rhs;
  std::vector<std::vector<int>> tuples;
  std::vector<std::vector<int>> permutations;
};

/// `pair` is the 0-based index of the lower walker of the annihilating pair.
LinearSystem build_system(std::span<const int> starts, int pair, int horizon,
                          const std::vector<std::vector<int>>& tuples);

/// Tuples with a < y_1 < b reached by the prescribed event, in increasing order.
std::vector<std::vector<int>> prescribed_tuples(std::span<const int> starts, int pair, int horizon);

template <typename Scalar>
struct Consistent {
  Vector<Scalar> solution;  // free variables set to zero
  Eigen::Index nullspace_dimension = 0;
};

/// lambda^T * matrix = 0 while lambda^T * rhs != 0.
template <typename Scalar>
struct Inconsistent {
  Vector<Scalar> certificate;
};

template <typename Scalar>
using SolveResult = std::variant<Consistent<Scalar>, Inconsistent<Scalar>>;

/// Gauss-Jordan elimination on [A | b | I]; the identity block records which
/// row combination produced each reduced row. Results are verified by substitution.
template <typename DerivedA, typename DerivedB>
SolveResult<typename DerivedA::Scalar> solve_exact(const Eigen::MatrixBase<DerivedA>& a,
                                                   const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  if (b.rows() != rows || b.cols() != 1) throw std::invalid_argument("solve_exact: rhs size does not match");

  Matrix<Scalar> work(rows, cols + 1 + rows);
  work.leftCols(cols) = a;
  work.col(cols) = b;
  work.rightCols(rows) = Matrix<Scalar>::Identity(rows, rows);

  std::vector<Eigen::Index> pivot_cols;
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
    Eigen::Index p = r;
    while (p < rows && work(p, c) == Scalar(0)) ++p;
    if (p == rows) continue;
    if (p != r) work.row(p).swap(work.row(r));
    const Scalar inv = Scalar(1) / work(r, c);
    work.row(r) *= inv;
    for (Eigen::Index o = 0; o < rows; ++o) {
      if (o == r || work(o, c) == Scalar(0)) continue;
      const Scalar factor = work(o, c);
      work.row(o) -= factor * work.row(r);
    }
    pivot_cols.push_back(c);
    ++r;
  }

  for (Eigen::Index z = r; z < rows; ++z) {
    if (work(z, cols) == Scalar(0)) continue;
    Vector<Scalar> lambda = work.row(z).rightCols(rows).transpose();
    const Vector<Scalar> residual = a.transpose() * lambda;
    const Scalar rhs = (b.transpose() * lambda)(0, 0);
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!(residual(c) == Scalar(0))) throw std::logic_error("solve_exact: certificate failed verification");
    }
    if (rhs == Scalar(0)) throw std::logic_error("solve_exact: certificate failed verification");
    return Inconsistent<Scalar>{std::move(lambda)};
  }

  Vector<Scalar> x = Vector<Scalar>::Zero(cols);
  for (std::size_t i = 0; i < pivot_cols.size(); ++i) x(pivot_cols[i]) = work(static_cast<Eigen::Index>(i), cols);
  const Vector<Scalar> check = a * x;
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!(check(i) == b(i))) throw std::logic_error("solve_exact: solution failed verification");
  }
  return Consistent<Scalar>{std::move(x), cols - static_cast<Eigen::Index>(pivot_cols.size())};
}

template <typename Scalar>
bool is_consistent(const SolveResult<Scalar>& result) {
  return std::holds_alternative<Consistent<Scalar>>(result);
}

/// Solves one system and every subsystem with a single row dropped.
struct SystemAnalysis {
  bool inconsistent = false;
  bool minimal = false;  // inconsistent, and dropping any one row restores consistency
  nlohmann::json report;
};

SystemAnalysis analyze_system(const LinearSystem& system);

struct PrescribedReport {
  bool tuple_count_matches = false;  // exhaustive generation finds exactly the four tuples
  SystemAnalysis analysis;

  bool passed() const { return tuple_count_matches && analysis.inconsistent && analysis.minimal; }
  nlohmann::json to_json() const;
};

/// n = 3, starts (0, 2, 4), walkers 0 and 1 annihilate, t = 4.
PrescribedReport reproduce_prescribed_example();

}  // namespace ghostwalk
