#include "ghostwalk/linalg.hpp"

#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ghostwalk/rational.hpp"

namespace gw = ghostwalk;
using gw::Rational;
using gw::RationalMatrix;

namespace {

RationalMatrix random_matrix(int n, std::mt19937& rng) {
  std::uniform_int_distribution<long> num(-9, 9);
  std::uniform_int_distribution<long> den(1, 5);
  RationalMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = Rational(num(rng), den(rng));
  }
  return m;
}

}  // namespace

TEST(PermutationSign, Examples) {
  EXPECT_EQ(gw::permutation_sign(std::vector<int>{0, 1, 2}), 1);
  EXPECT_EQ(gw::permutation_sign(std::vector<int>{1, 0, 2}), -1);
  EXPECT_EQ(gw::permutation_sign(std::vector<int>{1, 2, 0}), 1);
  EXPECT_EQ(gw::permutation_sign(std::vector<int>{3, 2, 1, 0}), 1);
  EXPECT_EQ(gw::permutation_sign(std::vector<int>{}), 1);
}

TEST(PermutationSign, MatchesInversionCount) {
  gw::for_each_permutation(5, [](std::span<const int> p) {
    int inversions = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      for (std::size_t j = i + 1; j < p.size(); ++j) inversions += p[i] > p[j] ? 1 : 0;
    }
    EXPECT_EQ(gw::permutation_sign(p), inversions % 2 == 0 ? 1 : -1);
  });
}

TEST(Permutations, LexicographicAndComplete) {
  std::vector<std::vector<int>> seen;
  gw::for_each_permutation(3, [&](std::span<const int> p) { seen.emplace_back(p.begin(), p.end()); });
  const std::vector<std::vector<int>> expected{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  EXPECT_EQ(seen, expected);

  int empty_calls = 0;
  gw::for_each_permutation(0, [&](std::span<const int>) { ++empty_calls; });
  EXPECT_EQ(empty_calls, 1);
}

TEST(Permutations, Inverse) {
  const std::vector<int> p{2, 0, 3, 1};
  const auto inv = gw::inverse_permutation(p);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(inv[static_cast<std::size_t>(p[static_cast<std::size_t>(i)])], i);
}

TEST(Determinant, EliminationMatchesLeibniz) {
  std::mt19937 rng(7);
  for (int n = 0; n <= 6; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto m = random_matrix(n, rng);
      EXPECT_EQ(gw::determinant(m), gw::leibniz_determinant(m)) << "n=" << n;
    }
  }
}

TEST(Determinant, SingularAndPivoting) {
  RationalMatrix m(3, 3);
  m << 0, 1, 2, 1, 0, 3, 2, 1, 8;
  EXPECT_EQ(gw::determinant(m), Rational(0));  // 0 - 2 + 2
  m(2, 2) = 9;
  EXPECT_EQ(gw::determinant(m), gw::leibniz_determinant(m));
  EXPECT_NE(gw::determinant(m), Rational(0));

  RationalMatrix dependent(2, 2);
  dependent << Rational(1, 2), Rational(1, 3), Rational(3, 2), 1;
  EXPECT_EQ(gw::determinant(dependent), Rational(0));
}

TEST(Determinant, RejectsNonSquare) {
  RationalMatrix m(2, 3);
  m.setZero();
  EXPECT_THROW(gw::determinant(m), std::invalid_argument);
  EXPECT_THROW(gw::leibniz_determinant(m), std::invalid_argument);
}

TEST(Determinant, MultiplicativeOnRandomPairs) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_matrix(4, rng);
    const auto b = random_matrix(4, rng);
    const RationalMatrix ab = a * b;
    EXPECT_EQ(gw::determinant(ab), gw::determinant(a) * gw::determinant(b));
  }
}
