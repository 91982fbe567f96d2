#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "dre/sarsa.hpp"

namespace dre::sarsa {
namespace {

std::vector<std::size_t> range(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

TEST(LearnerParams, RejectsOutOfRange) {
  EXPECT_THROW(LearnerParams(0.0, 0.5, 0.5, 0.1), std::invalid_argument);
  EXPECT_THROW(LearnerParams(1.1, 0.5, 0.5, 0.1), std::invalid_argument);
  EXPECT_THROW(LearnerParams(0.2, -0.1, 0.5, 0.1), std::invalid_argument);
  EXPECT_THROW(LearnerParams(0.2, 0.5, 1.5, 0.1), std::invalid_argument);
  EXPECT_THROW(LearnerParams(0.2, 0.5, 0.5, NAN), std::invalid_argument);
  EXPECT_NO_THROW(LearnerParams(1.0, 1.0, 1.0, 1.0));
  EXPECT_NO_THROW(LearnerParams(0.2, 0.0, 0.0, 0.0));
}

TEST(SelectAction, PicksUniqueArgmax) {
  SarsaLearner l(LearnerParams(0.2, 0.9, 0.0, 0.0), 1, 3);
  l.mutable_q().at(0, 1) = 5.0;
  l.mutable_q().at(0, 2) = 3.0;
  Rng rng(1);
  EXPECT_EQ(l.select_action(0, range(3), rng), 1u);
}

TEST(SelectAction, TiesGoToLowestLegalIndex) {
  SarsaLearner l(LearnerParams(0.2, 0.9, 0.0, 0.0), 1, 3);
  Rng rng(1);
  const std::vector<std::size_t> legal = {1, 2};
  EXPECT_EQ(l.select_action(0, legal, rng), 1u);
}

TEST(SelectAction, FullExplorationIsRoughlyUniform) {
  SarsaLearner l(LearnerParams(0.2, 0.9, 0.0, 1.0), 1, 8);
  l.mutable_q().at(0, 3) = 10.0;
  Rng rng(2024);
  std::array<int, 8> counts{};
  const auto legal = range(8);
  for (int i = 0; i < 10000; ++i) ++counts[l.select_action(0, legal, rng)];
  for (int c : counts) {
    EXPECT_GE(c / 10000.0, 0.10);
    EXPECT_LE(c / 10000.0, 0.15);
  }
}

TEST(SelectAction, Errors) {
  SarsaLearner l(LearnerParams(0.2, 0.9, 0.0, 0.2), 2, 3);
  Rng rng(1);
  try {
    l.select_action(0, {}, rng);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "no legal action");
  }
  try {
    l.select_action(2, range(3), rng);
    FAIL();
  } catch (const std::out_of_range& e) {
    EXPECT_STREQ(e.what(), "bad state index");
  }
}

TEST(Update, OneStepDegenerateCase) {
  SarsaLearner l(LearnerParams(0.2, 0.0, 0.0, 0.1), 3, 2);
  l.update({0, 0, 1.0, 1, 1});
  EXPECT_DOUBLE_EQ(l.q().at(0, 0), 0.2);
  EXPECT_EQ(l.traces().sum(), 0.0);
}

TEST(Update, TwoStepTraceAlgebra) {
  SarsaLearner l(LearnerParams(0.2, 0.9, 0.5, 0.1), 3, 2);
  l.update({0, 0, 0.0, 1, 1});
  EXPECT_DOUBLE_EQ(l.traces().at(0, 0), 0.45);
  l.update({1, 1, 1.0, 2, 0});
  EXPECT_NEAR(l.q().at(0, 0), 0.09, 1e-15);
  EXPECT_DOUBLE_EQ(l.q().at(1, 1), 0.2);
}

TEST(Update, ReplacingTracesStayBounded) {
  SarsaLearner l(LearnerParams(0.5, 1.0, 1.0, 0.1), 3, 2);
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    l.update({rng.uniform_index(3), rng.uniform_index(2), rng.uniform01() - 0.5,
              rng.uniform_index(3), rng.uniform_index(2)});
    for (double e : l.traces().values()) ASSERT_LE(e, 1.0);
  }
}

TEST(Update, CellsWithoutTraceAreUntouched) {
  SarsaLearner l(LearnerParams(0.3, 0.9, 0.0, 0.1), 4, 2);
  l.mutable_q().at(3, 1) = 7.25;
  l.update({0, 0, 1.0, 1, 0});
  l.update({1, 0, -2.0, 2, 1});
  EXPECT_EQ(l.q().at(3, 1), 7.25);
  EXPECT_EQ(l.q().at(2, 0), 0.0);
}

TEST(Update, RejectsNonFiniteReward) {
  SarsaLearner l(LearnerParams(0.3, 0.9, 0.0, 0.1), 2, 2);
  try {
    l.update({0, 0, INFINITY, 1, 0});
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "bad reward");
  }
}

TEST(Update, ValuesStayFiniteUnderExtremeRewards) {
  SarsaLearner l(LearnerParams(0.2, 0.9, 0.9, 0.2), 4, 3);
  Rng rng(77);
  for (int i = 0; i < 1'000'000; ++i) {
    const double r = -1.6 + rng.uniform01() * (1.4001 + 1.6);
    l.update({rng.uniform_index(4), rng.uniform_index(3), r, rng.uniform_index(4),
              rng.uniform_index(3)});
  }
  for (double q : l.q().values()) ASSERT_TRUE(std::isfinite(q));
}

TEST(Update, SameSeedSameTable) {
  auto run = [] {
    SarsaLearner l(LearnerParams(0.2, 0.6, 0.3, 0.2), 5, 4);
    Rng rng(9);
    for (int i = 0; i < 5000; ++i) {
      const std::size_t s = rng.uniform_index(5);
      const std::size_t a = l.select_action(s, range(4), rng);
      l.advance(rng.uniform01() - 0.4, s, a);
    }
    return l.q();
  };
  EXPECT_EQ(run(), run());
}

TEST(FinalizeEpisode, TerminalTargetIsReward) {
  SarsaLearner l(LearnerParams(0.2, 0.9, 0.5, 0.1), 2, 2);
  l.advance(0.0, 1, 0);
  l.finalize_episode(-1.0);
  EXPECT_DOUBLE_EQ(l.q().at(1, 0), -0.2);
  EXPECT_FALSE(l.pending().has_value());
  EXPECT_EQ(l.traces().sum(), 0.0);
  const auto before = l.q();
  l.finalize_episode(-1.0);
  EXPECT_EQ(l.q(), before);
}

TEST(FinalizeEpisode, NoPendingIsNoOp) {
  SarsaLearner l(LearnerParams(0.2, 0.9, 0.5, 0.1), 2, 2);
  l.finalize_episode(5.0);
  EXPECT_EQ(l.q().sum(), 0.0);
}

TEST(Advance, FirstCallOnlyRecordsPending) {
  SarsaLearner l(LearnerParams(0.2, 0.9, 0.5, 0.1), 2, 2);
  l.advance(3.0, 0, 1);
  EXPECT_EQ(l.q().sum(), 0.0);
  ASSERT_TRUE(l.pending().has_value());
  EXPECT_EQ(l.pending()->s, 0u);
  EXPECT_EQ(l.pending()->a, 1u);
  l.advance(1.0, 1, 0);
  EXPECT_DOUBLE_EQ(l.q().at(0, 1), 0.2);
}

TEST(GreedyPolicy, ZeroTableMapsToFirstAction) {
  SarsaLearner l(LearnerParams(0.2, 0.9, 0.5, 0.1), 6, 4);
  for (auto a : l.greedy_policy()) EXPECT_EQ(a, 0u);
}

TEST(GreedyPolicy, SingleState) {
  SarsaLearner l(LearnerParams(0.2, 0.9, 0.5, 0.1), 1, 2);
  l.mutable_q().at(0, 0) = 2.0;
  l.mutable_q().at(0, 1) = -1.0;
  EXPECT_EQ(l.greedy_policy(), std::vector<std::size_t>{0});
}

TEST(QCsv, RoundTripsExactly) {
  QTable q(3, 2);
  q.at(0, 1) = 0.1 + 0.2;
  q.at(2, 0) = -1e-300;
  q.at(1, 1) = 12345.678901234567;
  std::stringstream ss;
  write_q_csv(ss, q);
  EXPECT_EQ(read_q_csv(ss), q);
}

}  // namespace
}  // namespace dre::sarsa
