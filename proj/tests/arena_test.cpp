#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "dre/arena.hpp"
#include "dre/bot.hpp"

namespace dre::arena {
namespace {

using modes::ActionId;
using modes::DangerAction;
using modes::Mode;
using modes::ReplenishAction;

// 12x7 room with border walls and two spawns.
constexpr std::string_view kRoom =
    "############\n"
    "#S.........#\n"
    "#..........#\n"
    "#..........#\n"
    "#..........#\n"
    "#.........S#\n"
    "############\n";

ArenaConfig room(std::string_view layout = kRoom) {
  ArenaConfig cfg = default_config();
  load_map(cfg, layout);
  cfg.patrol_route = {cfg.spawn_points.front()};
  return cfg;
}

void place(Arena& a, int id, Cell c, Direction facing) {
  auto& e = a.mutable_entity(id);
  e.position = c;
  e.facing = facing;
}

TEST(Arena, IdleTickChangesNothing) {
  Arena a(room(), {Controller::Learner, Controller::Patroller}, 1);
  const auto p0 = a.entity(0).position;
  const auto p1 = a.entity(1).position;
  const auto ev = a.step({});
  EXPECT_EQ(a.entity(0).position, p0);
  EXPECT_EQ(a.entity(1).position, p1);
  for (const auto& e : ev.entities) EXPECT_FALSE(e.moved);
  EXPECT_EQ(a.tick(), 1);
}

TEST(Arena, ForcedHitKills) {
  auto cfg = room();
  cfg.weapons[0].primary.hit = {1.0, 1.0, 1.0};
  Arena a(cfg, {Controller::Learner, Controller::Patroller}, 7);
  place(a, 0, {2, 2}, Direction::E);
  place(a, 1, {4, 2}, Direction::E);
  a.mutable_entity(1).health = 10;
  const auto p = a.perceive(0);
  ASSERT_TRUE(p.see_enemy);
  modes::BotMemory mem;
  Rng rng(1);
  const auto intent =
      a.apply_action(0, {Mode::Danger, static_cast<std::size_t>(DangerAction::ShootPrimary)}, p,
                     mem, rng);
  const auto ev = a.step({{0, intent}});
  EXPECT_TRUE(ev.entities[0].dealt_damage);
  EXPECT_TRUE(ev.entities[0].killed);
  EXPECT_TRUE(ev.entities[1].took_damage);
  EXPECT_TRUE(ev.entities[1].died);
  EXPECT_EQ(a.entity(0).ammo, 99);
  EXPECT_EQ(a.entity(0).kills, 1);
  EXPECT_EQ(a.entity(1).deaths, 1);
  EXPECT_FALSE(a.entity(1).alive);
  try {
    a.perceive(1);
    FAIL();
  } catch (const std::logic_error& e) {
    EXPECT_STREQ(e.what(), "no perception while dead");
  }
  // Back after the respawn delay with full health and ammo.
  bool respawned = false;
  for (int t = 0; t < cfg.respawn_delay + 1 && !respawned; ++t) {
    respawned = a.step({}).entities[1].respawned;
  }
  EXPECT_TRUE(respawned);
  EXPECT_TRUE(a.entity(1).alive);
  EXPECT_EQ(a.entity(1).health, 100);
  EXPECT_EQ(a.entity(1).ammo, 100);
}

TEST(Arena, SecondaryCostsThreeRounds) {
  auto cfg = room();
  cfg.weapons[0].secondary.hit = {0.0, 0.0, 0.0};
  Arena a(cfg, {Controller::Learner, Controller::Patroller}, 7);
  place(a, 0, {2, 2}, Direction::E);
  place(a, 1, {4, 2}, Direction::E);
  const auto p = a.perceive(0);
  Rng rng(1);
  const auto intent = a.apply_action(
      0, {Mode::Danger, static_cast<std::size_t>(DangerAction::ShootSecondary)}, p, {}, rng);
  const auto ev = a.step({{0, intent}});
  EXPECT_TRUE(ev.entities[0].fired);
  EXPECT_FALSE(ev.entities[1].took_damage);
  EXPECT_EQ(a.entity(0).ammo, 97);
}

TEST(Arena, SeesOpponentAheadAtShortRange) {
  Arena a(room(), {Controller::Learner, Controller::Patroller}, 1);
  place(a, 0, {2, 2}, Direction::E);
  place(a, 1, {5, 2}, Direction::W);
  const auto p = a.perceive(0);
  EXPECT_TRUE(p.see_enemy);
  EXPECT_EQ(p.opponent_distance, OpponentDistance::Short);
  // Behind the viewer.
  place(a, 0, {2, 2}, Direction::W);
  EXPECT_FALSE(a.perceive(0).see_enemy);
}

TEST(Arena, WallsBlockSight) {
  constexpr std::string_view layout =
      "############\n"
      "#S.........#\n"
      "#....#.....#\n"
      "#....#.....#\n"
      "#....#.....#\n"
      "#.........S#\n"
      "############\n";
  Arena a(room(layout), {Controller::Learner, Controller::Patroller}, 1);
  place(a, 0, {2, 3}, Direction::E);
  place(a, 1, {8, 3}, Direction::W);
  const auto p = a.perceive(0);
  EXPECT_FALSE(p.see_enemy);
  EXPECT_EQ(p.opponent_distance, OpponentDistance::None);
}

TEST(Arena, HearsShotsWithinRadius) {
  auto cfg = room(
      "################\n"
      "#S.............#\n"
      "#..............#\n"
      "#..............#\n"
      "#.............S#\n"
      "################\n");
  for (int gap : {6, 9}) {
    Arena a(cfg, {Controller::Learner, Controller::Patroller, Controller::Hunter}, 3);
    place(a, 0, {2, 2}, Direction::W);
    place(a, 1, {2 + gap, 2}, Direction::E);
    place(a, 2, {4 + gap, 2}, Direction::W);
    Intent shoot;
    shoot.fire = Fire::Primary;
    shoot.target = 2;
    shoot.hold = true;
    Intent still;
    still.hold = true;
    const auto ev = a.step({{1, shoot}, {2, still}});
    ASSERT_TRUE(ev.entities[1].fired);
    const auto p = a.perceive(0);
    EXPECT_FALSE(p.see_enemy);
    EXPECT_EQ(p.hearing_noise, gap <= 8) << "gap " << gap;
  }
}

TEST(Arena, GoToPickupClosesDistance) {
  auto cfg = room(
      "############\n"
      "#S.........#\n"
      "#..........#\n"
      "#........H.#\n"
      "#..........#\n"
      "#.........S#\n"
      "############\n");
  Arena a(cfg, {Controller::Learner, Controller::Patroller}, 1);
  place(a, 0, {5, 3}, Direction::E);
  place(a, 1, {1, 1}, Direction::N);
  a.mutable_entity(0).health = 30;
  const auto p = a.perceive(0);
  ASSERT_EQ(modes::select_mode(p), Mode::Replenish);
  ASSERT_TRUE(p.see_pickup);
  const Cell pickup{9, 3};
  const int before = a.navigation().distance(a.entity(0).position, pickup);
  EXPECT_EQ(before, 4);
  Rng rng(1);
  const auto intent = a.apply_action(
      0, {Mode::Replenish, static_cast<std::size_t>(ReplenishAction::GoToPickup)}, p, {}, rng);
  a.step({{0, intent}});
  EXPECT_EQ(a.navigation().distance(a.entity(0).position, pickup), before - 1);
}

TEST(Arena, StopMovementHoldsPosition) {
  Arena a(room(), {Controller::Learner, Controller::Patroller}, 1);
  place(a, 0, {5, 3}, Direction::E);
  a.mutable_entity(0).movement = Movement::Run;
  const auto p = a.perceive(0);
  Rng rng(1);
  const auto intent = a.apply_action(
      0, {Mode::Danger, static_cast<std::size_t>(DangerAction::StopMovement)}, p, {}, rng);
  a.step({{0, intent}});
  EXPECT_EQ(a.entity(0).position, (Cell{5, 3}));
  EXPECT_EQ(a.entity(0).movement, Movement::Stop);
  a.step({});
  EXPECT_EQ(a.entity(0).position, (Cell{5, 3}));
}

TEST(Arena, CrouchTogglesAndSlowsMovement) {
  Arena a(room(), {Controller::Learner, Controller::Patroller}, 1);
  place(a, 0, {2, 3}, Direction::E);
  place(a, 1, {1, 1}, Direction::N);
  Rng rng(1);
  auto p = a.perceive(0);
  auto crouch = a.apply_action(
      0, {Mode::Explore, static_cast<std::size_t>(modes::ExploreAction::Crouch)}, p, {}, rng);
  a.step({{0, crouch}});
  EXPECT_TRUE(a.entity(0).crouched);
  a.mutable_entity(0).movement = Movement::Run;
  const int x0 = a.entity(0).position.x;
  for (int t = 0; t < 4; ++t) a.step({});
  EXPECT_EQ(a.entity(0).position.x - x0, 2);
  p = a.perceive(0);
  crouch = a.apply_action(
      0, {Mode::Explore, static_cast<std::size_t>(modes::ExploreAction::Crouch)}, p, {}, rng);
  a.step({{0, crouch}});
  EXPECT_FALSE(a.entity(0).crouched);
}

TEST(Arena, IllegalActionRejected) {
  Arena a(room(), {Controller::Learner, Controller::Patroller}, 1);
  place(a, 0, {2, 2}, Direction::W);
  place(a, 1, {8, 4}, Direction::W);
  const auto p = a.perceive(0);
  ASSERT_FALSE(p.see_enemy);
  Rng rng(1);
  try {
    a.apply_action(0, {Mode::Danger, static_cast<std::size_t>(DangerAction::ShootPrimary)}, p, {},
                   rng);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "illegal action");
  }
}

TEST(Arena, UnknownEntityRejected) {
  Arena a(room(), {Controller::Learner, Controller::Patroller}, 1);
  EXPECT_THROW(a.step({{5, Intent{}}}), std::out_of_range);
}

TEST(Arena, RespawnSingleSpawn) {
  auto cfg = room(
      "#######\n"
      "#S....#\n"
      "#.....#\n"
      "#######\n");
  Arena a(cfg, {Controller::Learner, Controller::Patroller}, 1);
  place(a, 0, {4, 2}, Direction::N);
  a.mutable_entity(0).health = 3;
  a.respawn(0);
  EXPECT_EQ(a.entity(0).position, (Cell{1, 1}));
  EXPECT_EQ(a.entity(0).health, 100);
}

TEST(Arena, RespawnPrefersSpawnFarFromEnemies) {
  Arena a(room(), {Controller::Learner, Controller::Patroller}, 1);
  place(a, 1, {2, 1}, Direction::N);
  place(a, 0, {5, 3}, Direction::N);
  a.mutable_entity(0).ammo = 4;
  a.respawn(0);
  EXPECT_EQ(a.entity(0).position, (Cell{10, 5}));
  EXPECT_EQ(a.entity(0).ammo, 100);
  EXPECT_EQ(a.entity(0).movement, Movement::Stop);
}

TEST(Arena, HealthPickupHeals) {
  auto cfg = room(
      "############\n"
      "#S.........#\n"
      "#..........#\n"
      "#....H.....#\n"
      "#..........#\n"
      "#.........S#\n"
      "############\n");
  Arena a(cfg, {Controller::Learner, Controller::Patroller}, 1);
  place(a, 0, {4, 3}, Direction::E);
  a.mutable_entity(0).health = 50;
  Intent go;
  go.path_target = Cell{5, 3};
  auto ev = a.step({{0, go}});
  EXPECT_TRUE(ev.entities[0].picked_item);
  EXPECT_EQ(a.entity(0).health, 75);
  EXPECT_FALSE(a.pickups()[0].available);

  Arena full(cfg, {Controller::Learner, Controller::Patroller}, 1);
  place(full, 0, {4, 3}, Direction::E);
  ev = full.step({{0, go}});
  EXPECT_FALSE(ev.entities[0].picked_item);
  EXPECT_TRUE(full.pickups()[0].available);
}

TEST(Scripts, HunterSeeksHealthWhenLow) {
  auto cfg = room(
      "############\n"
      "#S.........#\n"
      "#..........#\n"
      "#........H.#\n"
      "#..........#\n"
      "#.........S#\n"
      "############\n");
  Arena a(cfg, {Controller::Learner, Controller::Hunter}, 1);
  place(a, 0, {1, 5}, Direction::S);
  place(a, 1, {5, 3}, Direction::E);
  a.mutable_entity(1).health = 30;
  Rng rng(2);
  const auto in = a.scripted_intent(1, rng);
  ASSERT_TRUE(in.path_target.has_value());
  EXPECT_EQ(*in.path_target, (Cell{9, 3}));
  const int before = a.navigation().distance(a.entity(1).position, {9, 3});
  a.step({{1, in}});
  EXPECT_EQ(a.navigation().distance(a.entity(1).position, {9, 3}), before - 1);
}

TEST(Scripts, PatrollerWalksRoute) {
  auto cfg = room();
  cfg.patrol_route = {{9, 2}, {2, 4}};
  Arena a(cfg, {Controller::Learner, Controller::Patroller}, 1);
  place(a, 0, {1, 1}, Direction::N);
  place(a, 1, {5, 2}, Direction::E);
  Rng rng(2);
  const auto in = a.scripted_intent(1, rng);
  ASSERT_TRUE(in.path_target.has_value());
  EXPECT_EQ(*in.path_target, (Cell{9, 2}));
  EXPECT_EQ(in.fire, Fire::None);
}

TEST(Scripts, PatrollerShootsVisibleEnemy) {
  Arena a(room(), {Controller::Learner, Controller::Patroller}, 1);
  place(a, 0, {5, 2}, Direction::N);
  place(a, 1, {8, 2}, Direction::W);
  Rng rng(2);
  const auto in = a.scripted_intent(1, rng);
  EXPECT_EQ(in.fire, Fire::Primary);
  EXPECT_EQ(in.target, 0);
}

struct TickLog {
  std::vector<ArenaEvents> events;
  std::vector<std::map<int, Intent>> intents;
};

TickLog scripted_run(std::uint64_t seed, int ticks) {
  Arena a(default_config(), {Controller::Learner, Controller::Patroller, Controller::Hunter},
          seed);
  modes::DreBot bot(sarsa::LearnerParams(0.2, 0.9, 0.6, 0.2));
  Rng bot_rng(combine_seed(seed, 2));
  Rng script_rng(combine_seed(seed, 3));
  TickLog log;
  for (int t = 0; t < ticks; ++t) {
    std::map<int, Intent> intents;
    if (a.entity(0).alive) {
      const auto p = a.perceive(0);
      const auto action = bot.arbiter_step(p, bot_rng);
      intents[0] = a.apply_action(0, action, p, bot.memory(), bot_rng);
    }
    for (int id = 1; id < 3; ++id) {
      if (a.entity(id).alive) intents[id] = a.scripted_intent(id, script_rng);
    }
    log.intents.push_back(intents);
    log.events.push_back(a.step(intents));
    if (log.events.back().entities[0].died) bot.on_death();
  }
  return log;
}

TEST(Arena, ReplayIsDeterministic) {
  const auto a = scripted_run(99, 1000);
  const auto b = scripted_run(99, 1000);
  EXPECT_EQ(a.events, b.events);
  EXPECT_EQ(a.intents, b.intents);
  const auto c = scripted_run(100, 1000);
  EXPECT_NE(a.events, c.events);
}

TEST(Arena, LongRunInvariants) {
  Arena a(default_config(), {Controller::Learner, Controller::Patroller, Controller::Hunter}, 5);
  Rng rng(6);
  modes::DreBot bot(sarsa::LearnerParams(0.2, 0.9, 0.6, 0.2), modes::Policy::Random);
  for (int t = 0; t < 5000; ++t) {
    std::map<int, Intent> intents;
    if (a.entity(0).alive) {
      const auto p = a.perceive(0);
      if (p.see_enemy) {
        for (const Cell c : line_between(a.entity(0).position, *p.opponent_cell)) {
          ASSERT_FALSE(a.config().is_wall(c));
        }
      }
      const auto action = bot.arbiter_step(p, rng);
      intents[0] = a.apply_action(0, action, p, bot.memory(), rng);
    }
    for (int id = 1; id < 3; ++id) {
      if (a.entity(id).alive) intents[id] = a.scripted_intent(id, rng);
    }
    a.step(intents);
    int kills = 0, deaths = 0;
    for (const auto& e : a.entities()) {
      ASSERT_GE(e.health, 0);
      ASSERT_LE(e.health, 100);
      ASSERT_GE(e.ammo, 0);
      ASSERT_LE(e.ammo, 100);
      kills += e.kills;
      deaths += e.deaths;
    }
    ASSERT_EQ(kills, deaths);
  }
  EXPECT_GT(a.entity(0).deaths + a.entity(0).kills, 0);
}

TEST(Geometry, LineIsSymmetric) {
  for (int x = -6; x <= 6; ++x) {
    for (int y = -6; y <= 6; ++y) {
      const auto ab = line_between({0, 0}, {x, y});
      const auto ba = line_between({x, y}, {0, 0});
      ASSERT_EQ(ab, ba) << x << "," << y;
    }
  }
  EXPECT_EQ(line_between({0, 0}, {3, 0}), (std::vector<Cell>{{1, 0}, {2, 0}}));
  EXPECT_TRUE(line_between({0, 0}, {1, 1}).empty());
}

TEST(Navigation, NoCornerCutting) {
  auto cfg = room(
      "######\n"
      "#S.#.#\n"
      "#.#..#\n"
      "#...S#\n"
      "######\n");
  Navigation nav(cfg);
  EXPECT_FALSE(nav.can_step({2, 1}, Direction::SE));
  EXPECT_EQ(nav.distance({1, 1}, {4, 3}), 5);
  EXPECT_EQ(nav.distance({4, 1}, {4, 3}), 2);
  EXPECT_EQ(nav.distance({1, 1}, {3, 1}), Navigation::kUnreachable);
}

TEST(Config, MapAndKeys) {
  ArenaConfig cfg = default_config();
  EXPECT_EQ(cfg.width, 20);
  EXPECT_EQ(cfg.spawn_points.size(), 4u);
  EXPECT_EQ(cfg.pickups.size(), 8u);
  EXPECT_TRUE(apply_arena_key(cfg, "hearing_radius", "6.5"));
  EXPECT_EQ(cfg.hearing_radius, 6.5);
  EXPECT_TRUE(apply_arena_key(cfg, "weapon1_secondary_hit", "0.3,0.2,0.1"));
  EXPECT_EQ(cfg.weapons[1].secondary.hit[2], 0.1);
  EXPECT_FALSE(apply_arena_key(cfg, "gammas", "0.1"));
  EXPECT_THROW(apply_arena_key(cfg, "script_accuracy", "1.5"), std::invalid_argument);
  EXPECT_THROW(load_map(cfg, "###\n#.\n"), std::invalid_argument);
  EXPECT_EQ(parse_controller("hunter"), Controller::Hunter);
  EXPECT_EQ(controller_name(Controller::Learner), "dre");
}

TEST(ArenaConfig, ShippedMapMatchesBuiltIn) {
  std::ifstream in(DRE_DEFAULT_MAP_FILE);
  ASSERT_TRUE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), default_map());
}

}  // namespace
}  // namespace dre::arena
