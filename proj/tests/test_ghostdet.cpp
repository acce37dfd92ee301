#include "ghostwalk/ghostdet.hpp"

#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

namespace gw = ghostwalk;
using gw::FinalState;
using gw::Rational;

namespace {

gw::LatticeInstance lattice(std::vector<int> starts, int t) { return gw::make_lattice_instance(starts, t); }

Rational z(const gw::LatticeInstance& inst, const FinalState& state) {
  return gw::annihilation_weight(inst.graph, inst.config, state);
}

}  // namespace

TEST(FinalState, SignsAndOrdering) {
  const FinalState s{{0}, {{2, 4}, {6, 2}, {3, 3}}};
  EXPECT_EQ(gw::ghost_signs(s), (std::vector<int>{1, -1, 1}));
  EXPECT_EQ(gw::state_sign(s), -1);
  EXPECT_EQ(s.particles(), 7U);
  EXPECT_LT((FinalState{{0, 2}, {}}), (FinalState{{}, {{0, 0}}}));
  EXPECT_THROW(gw::validate_final_state(FinalState{{2, 0}, {}}), std::invalid_argument);
  EXPECT_EQ(gw::to_string(FinalState{{1}, {{2, 0}}}), "k=1 survivors=[1] ghosts=[(2,0)]");
}

TEST(FinalState, ColumnLayout) {
  const FinalState s{{5}, {{1, 9}, {3, 7}}};
  EXPECT_EQ(gw::ghost_column(s, 0, 1), 1);
  EXPECT_EQ(gw::ghost_column(s, 1, 2), 4);
  EXPECT_EQ(gw::column_key(s, 0), 5);
  EXPECT_EQ(gw::column_key(s, 2), 9);
  EXPECT_EQ(gw::column_key(s, 3), 3);
  EXPECT_THROW(gw::column_key(s, 5), std::out_of_range);
}

TEST(Candidates, WithinPairOrderFollowsSign) {
  // a <= b: the higher actor holds (j,1).
  const FinalState plus{{}, {{0, 2}}};
  EXPECT_TRUE(gw::is_candidate(plus, std::vector<int>{1, 0}));
  EXPECT_FALSE(gw::is_candidate(plus, std::vector<int>{0, 1}));
  EXPECT_EQ(gw::formal_sign(plus, std::vector<int>{1, 0}), -1);

  const FinalState minus{{}, {{2, 0}}};
  EXPECT_TRUE(gw::is_candidate(minus, std::vector<int>{0, 1}));
  EXPECT_EQ(gw::formal_sign(minus, std::vector<int>{0, 1}), 1);

  EXPECT_FALSE(gw::is_candidate(plus, std::vector<int>{0, 0}));
  EXPECT_EQ(gw::candidate_bijections(FinalState{{0, 1}, {}}, 2).size(), 2U);
  // One survivor and one pair: 3! / 2.
  EXPECT_EQ(gw::candidate_bijections(FinalState{{0}, {{1, 1}}}, 3).size(), 3U);
  EXPECT_THROW(gw::candidate_bijections(FinalState{{0}, {}}, 2), std::invalid_argument);
}

TEST(AnnihilationWeight, FrozenTwoWalkerValues) {
  const auto inst = lattice({0, 2}, 2);
  EXPECT_EQ(z(inst, FinalState{{0, 2}, {}}), Rational(3, 16));

  const auto one = lattice({0, 2}, 1);
  EXPECT_EQ(z(one, FinalState{{}, {{1, 1}}}), Rational(1, 4));
  EXPECT_EQ(z(one, FinalState{{-1, 1}, {}}), Rational(1, 4));
  EXPECT_EQ(z(one, FinalState{{-1, 3}, {}}), Rational(1, 4));
  EXPECT_EQ(z(one, FinalState{{1, 3}, {}}), Rational(1, 4));
}

TEST(AnnihilationWeight, SingleWalkerIsTransitionProbability) {
  const auto inst = lattice({0}, 2);
  EXPECT_EQ(z(inst, FinalState{{0}, {}}), Rational(1, 2));
  EXPECT_EQ(z(inst, FinalState{{2}, {}}), Rational(1, 4));
}

TEST(AnnihilationWeight, KZeroIsPlainDeterminant) {
  const auto inst = lattice({0, 2, 4}, 3);
  const auto keys = gw::reachable_keys(inst.graph, inst.config);
  for (const auto& state : gw::all_final_states(3, keys)) {
    if (state.collisions() != 0) continue;
    const auto m = gw::build_matrix(inst.graph, inst.config, state);
    EXPECT_EQ(gw::annihilation_weight(m, state), gw::determinant(m.base)) << gw::to_string(state);
  }
}

TEST(AnnihilationWeight, LaplaceExpansionAgrees) {
  for (const auto& starts : std::vector<std::vector<int>>{{0, 2}, {0, 2, 4}, {0, 2, 4, 6}}) {
    const auto inst = lattice(starts, 2);
    for (const auto& state : gw::all_final_states(static_cast<int>(starts.size()), gw::reachable_keys(inst.graph, inst.config))) {
      if (state.collisions() != 1) continue;
      EXPECT_EQ(z(inst, state), gw::annihilation_weight_laplace(inst.graph, inst.config, state)) << gw::to_string(state);
    }
  }
  const auto one = lattice({0, 2}, 1);
  EXPECT_THROW(gw::annihilation_weight_laplace(one.graph, one.config, FinalState{{-1, 1}, {}}), std::invalid_argument);
}

TEST(AnnihilationWeight, UnreachableTargetGivesZero) {
  const auto inst = lattice({0, 2}, 1);
  // Site 0 is a target at t=1 but has the wrong parity for both walkers.
  EXPECT_EQ(z(inst, FinalState{{-1, 0}, {}}), Rational(0));
}

TEST(AnnihilationWeight, RejectsMismatchedStates) {
  const auto inst = lattice({0, 2}, 1);
  EXPECT_THROW(z(inst, FinalState{{1}, {}}), std::invalid_argument);
  EXPECT_THROW(z(inst, FinalState{{1, 99}, {}}), std::invalid_argument);
}

TEST(AnnihilationWeight, SumsToOneOverAllStates) {
  for (int t = 1; t <= 3; ++t) {
    const auto inst = lattice({0, 2, 4}, t);
    Rational total(0);
    for (const auto& state : gw::all_final_states(3, gw::reachable_keys(inst.graph, inst.config))) total += z(inst, state);
    EXPECT_EQ(total, Rational(1)) << "t=" << t;
  }
}

TEST(AllFinalStates, CountsAndCap) {
  const std::vector<int> keys{0, 1, 2};
  // k=0: C(3,2); k=1: 3^2 ordered pairs.
  EXPECT_EQ(gw::all_final_states(2, keys).size(), 3U + 9U);
  // k=1: C(3,2) * 9; k=2: 9 * 9.
  EXPECT_EQ(gw::all_final_states(4, keys).size(), 27U + 81U);
  EXPECT_THROW(gw::all_final_states(4, keys, 10), gw::ResourceLimitError);
}

TEST(FinalStateJson, RoundTrip) {
  const auto inst = lattice({0, 2}, 2);
  const FinalState s{{}, {{4, -2}}};
  const auto doc = gw::final_state_to_json(s, inst.graph, inst.config.targets);
  EXPECT_EQ(doc.dump(), R"({"ghost_pairs":[["4@2","-2@2"]],"k":1,"survivors":[]})");
  EXPECT_EQ(gw::final_state_from_json(doc, inst.graph, inst.config.targets), s);

  auto bad = doc;
  bad["k"] = 2;
  EXPECT_THROW(gw::final_state_from_json(bad, inst.graph, inst.config.targets), std::invalid_argument);
  bad = doc;
  bad["survivors"] = {"0@0"};
  EXPECT_THROW(gw::final_state_from_json(bad, inst.graph, inst.config.targets), std::invalid_argument);
}
