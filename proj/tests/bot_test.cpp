#include <gtest/gtest.h>

#include <algorithm>

#include "dre/bot.hpp"

namespace dre::modes {
namespace {

const sarsa::LearnerParams kParams(0.2, 0.9, 0.6, 0.2);

Perception random_perception(Rng& rng) {
  Perception p;
  p.being_hit = rng.bernoulli(0.3);
  p.bumping = rng.bernoulli(0.2);
  p.hearing_noise = rng.bernoulli(0.2);
  p.see_enemy = rng.bernoulli(0.4);
  if (p.see_enemy) {
    p.opponent_distance = static_cast<OpponentDistance>(rng.uniform_index(3));
    p.visible_opponent = 1;
    p.opponent_cell = Cell{rng.uniform_int(1, 18), rng.uniform_int(1, 18)};
  }
  p.see_pickup = rng.bernoulli(0.3);
  if (p.see_pickup) {
    p.visible_pickup = 0;
    p.pickup_cell = Cell{rng.uniform_int(1, 18), rng.uniform_int(1, 18)};
  }
  p.hear_pickup = rng.bernoulli(0.1);
  p.health_pct = rng.uniform_int(1, 100);
  p.ammo_rounds = rng.uniform_int(0, 100);
  p.ammo_pct = p.ammo_rounds;
  p.movement = static_cast<Movement>(rng.uniform_index(3));
  p.crouched = rng.bernoulli(0.3);
  return p;
}

TEST(DreBot, TableShapes) {
  DreBot bot(kParams);
  EXPECT_EQ(bot.learner(Mode::Danger).n_states(), 32u);
  EXPECT_EQ(bot.learner(Mode::Danger).n_actions(), 8u);
  EXPECT_EQ(bot.learner(Mode::Replenish).n_states(), 64u);
  EXPECT_EQ(bot.learner(Mode::Replenish).n_actions(), 7u);
  EXPECT_EQ(bot.learner(Mode::Explore).n_states(), 6u);
  EXPECT_EQ(bot.learner(Mode::Explore).n_actions(), 6u);
}

TEST(DreBot, CalmPerceptionExplores) {
  DreBot bot(kParams);
  Rng rng(3);
  const auto a = bot.arbiter_step(Perception{}, rng);
  EXPECT_EQ(a.mode, Mode::Explore);
  EXPECT_LT(a.index, 6u);
  EXPECT_EQ(bot.active_mode(), Mode::Explore);
}

TEST(DreBot, LeavingDangerClosesItsEpisode) {
  DreBot bot(kParams);
  Rng rng(4);
  Perception hit;
  hit.being_hit = true;
  bot.arbiter_step(hit, rng);
  bot.record_reward(-0.1);
  bot.arbiter_step(hit, rng);
  bot.record_reward(-0.1);
  EXPECT_GT(bot.learner(Mode::Danger).traces().sum(), 0.0);
  bot.arbiter_step(Perception{}, rng);
  EXPECT_EQ(bot.learner(Mode::Danger).traces().sum(), 0.0);
  EXPECT_FALSE(bot.learner(Mode::Danger).pending().has_value());
  EXPECT_LT(bot.learner(Mode::Danger).q().sum(), 0.0);
}

TEST(DreBot, ReturnedActionsAreLegal) {
  DreBot bot(kParams);
  Rng rng(11);
  Rng world(12);
  for (int t = 0; t < 10000; ++t) {
    const auto p = random_perception(world);
    const BotMemory before = bot.memory();
    auto memory_for_check = before;
    if (p.opponent_cell) memory_for_check.last_seen_opponent = p.opponent_cell;
    const auto a = bot.arbiter_step(p, rng);
    ASSERT_EQ(a.mode, select_mode(p));
    const auto legal = legal_actions(a.mode, p, memory_for_check);
    ASSERT_TRUE(std::find(legal.begin(), legal.end(), a.index) != legal.end()) << "tick " << t;
    bot.record_reward(world.uniform01() - 0.5);
    if (world.bernoulli(0.01)) bot.on_death();
  }
}

TEST(DreBot, RandomPolicyNeverLearns) {
  DreBot bot(kParams, Policy::Random);
  Rng rng(21);
  Rng world(22);
  for (int t = 0; t < 5000; ++t) {
    bot.arbiter_step(random_perception(world), rng);
    bot.record_reward(1.0);
    if (t % 97 == 0) bot.on_death();
  }
  for (auto mode : kAllModes) {
    EXPECT_EQ(bot.learner(mode).q().sum(), 0.0);
    for (double v : bot.learner(mode).q().values()) ASSERT_EQ(v, 0.0);
  }
}

TEST(DreBot, DeathClosesActiveEpisode) {
  DreBot bot(kParams);
  Rng rng(5);
  bot.arbiter_step(Perception{}, rng);
  bot.record_reward(-1.0);
  bot.on_death();
  EXPECT_FALSE(bot.learner(Mode::Explore).pending().has_value());
  EXPECT_FALSE(bot.active_mode().has_value());
  EXPECT_LT(bot.learner(Mode::Explore).q().sum(), 0.0);
}

TEST(DreBot, RecordItemStoresPickup) {
  DreBot bot(sarsa::LearnerParams(0.2, 0.9, 0.0, 0.0));
  // Make RecordItem the greedy choice in the state we will visit.
  Perception p;
  p.health_pct = 30;
  p.see_pickup = true;
  p.visible_pickup = 2;
  p.pickup_cell = Cell{7, 4};
  const auto s = encode_state(Mode::Replenish, p);
  bot.learner(Mode::Replenish).mutable_q().at(s, static_cast<std::size_t>(ReplenishAction::RecordItem)) = 1.0;
  Rng rng(1);
  const auto a = bot.arbiter_step(p, rng);
  EXPECT_TRUE(a.is(ReplenishAction::RecordItem));
  ASSERT_EQ(bot.memory().known_items.size(), 1u);
  EXPECT_EQ(bot.memory().known_items[0], (Cell{7, 4}));
}

}  // namespace
}  // namespace dre::modes
