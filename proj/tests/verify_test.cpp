#include <gtest/gtest.h>

#include "dre/verify.hpp"

namespace dre::verify {
namespace {

TEST(ValueIteration, CentreGoalDistances) {
  GridWorld w;
  const auto vi = value_iteration(w, 0.9);
  // One step from the goal is worth the goal reward; each extra step costs a factor of gamma.
  EXPECT_NEAR(vi.v[w.goal() - 1], 1.0, 1e-12);
  EXPECT_NEAR(vi.v[0], 0.9 * 0.9 * 0.9, 1e-12);
  EXPECT_EQ(vi.optimal[0], (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(vi.optimal[w.goal() + 1], (std::vector<std::size_t>{3}));
  EXPECT_TRUE(vi.optimal[w.goal()].empty());
}

TEST(Gridworld, SarsaMatchesOracle) {
  const auto r = train_gridworld(50000, 7);
  EXPECT_EQ(r.steps, 50000u);
  EXPECT_EQ(r.non_goal, 24u);
  EXPECT_EQ(r.matched, r.non_goal);
}

TEST(Gridworld, ConvergesAcrossSeeds) {
  int failures = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto r = train_gridworld(50000, seed);
    if (r.matched != r.non_goal) ++failures;
  }
  EXPECT_EQ(failures, 0);
}

TEST(OneStepSarsa, Update) {
  OneStepSarsa ref(2, 2, 0.5, 0.9);
  ref.update(0, 1, 1.0, 1, 0);
  EXPECT_DOUBLE_EQ(ref.values()[1], 0.5);
}

TEST(RewardOracle, ParsesConstants) {
  std::array<bool, modes::kRewardCheckCount> flags{};
  flags[static_cast<std::size_t>(modes::RewardCheck::GainedAdrenaline)] = true;
  flags[static_cast<std::size_t>(modes::RewardCheck::IsNotColliding)] = true;
  EXPECT_EQ(reward_oracle(flags), 20001);
  for (std::size_t i = 0; i < flags.size(); ++i) {
    std::array<bool, modes::kRewardCheckCount> one{};
    one[i] = true;
    EXPECT_EQ(reward_oracle(one), modes::kRewardScaled[i]) << i;
  }
}

TEST(Selftest, PristineBuildPasses) {
  for (const auto& c : run_selftest()) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}

TEST(Selftest, PerturbedRewardIsCaught) {
  const RewardFn perturbed = [](const modes::RewardInputs& in) {
    auto r = modes::compute_reward(in);
    if (r.has(modes::RewardCheck::PickedUpItem)) r.total_scaled += 1;
    return r;
  };
  EXPECT_FALSE(check_reward_exactness(perturbed).passed);
  EXPECT_TRUE(check_reward_exactness(modes::compute_reward).passed);
}

TEST(Selftest, IndividualChecks) {
  EXPECT_TRUE(check_encoder_bijections().passed);
  EXPECT_TRUE(check_action_counts().passed);
  EXPECT_TRUE(check_lambda_zero_equivalence(10000, 3).passed);
  EXPECT_TRUE(check_trace_decay(100).passed);
}

}  // namespace
}  // namespace dre::verify
