#include "dre/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <set>
#include <stdexcept>

#include "dre/rng.hpp"

namespace dre::verify {

namespace {

// Reward table as written, row by row.
constexpr std::array<const char*, modes::kRewardCheckCount> kRewardText = {
    "+0.0001", "-0.0001", "+0.00001", "-0.00001", "+0.00001", "-0.00001", "+0.0001",
    "+0.1",    "-0.1",    "+1",       "-1",       "+0.1",     "+0.2"};

// Decimal text to an exact count of 1e-5 units.
std::int64_t parse_scaled(const char* text) {
  int sign = 1;
  if (*text == '+' || *text == '-') sign = (*text++ == '-') ? -1 : 1;
  std::int64_t whole = 0;
  while (*text >= '0' && *text <= '9') whole = whole * 10 + (*text++ - '0');
  std::int64_t frac = 0;
  int digits = 0;
  if (*text == '.') {
    ++text;
    while (*text >= '0' && *text <= '9') {
      frac = frac * 10 + (*text++ - '0');
      ++digits;
    }
  }
  if (digits > 5) throw std::logic_error("reward constant finer than 1e-5");
  for (int i = digits; i < 5; ++i) frac *= 10;
  return sign * (whole * 100000 + frac);
}

CheckResult make(std::string name, bool ok, std::string detail) {
  return {std::move(name), ok, std::move(detail)};
}

}  // namespace

GridWorld::GridWorld(int size, int goal_x, int goal_y)
    : size_(size), goal_(static_cast<std::size_t>(goal_y * size + goal_x)) {
  if (size < 2 || goal_x < 0 || goal_y < 0 || goal_x >= size || goal_y >= size) {
    throw std::invalid_argument("bad gridworld");
  }
}

GridWorld::Outcome GridWorld::step(std::size_t s, std::size_t a) const {
  int x = static_cast<int>(s) % size_;
  int y = static_cast<int>(s) / size_;
  switch (a) {
    case 0: y = std::max(0, y - 1); break;
    case 1: x = std::min(size_ - 1, x + 1); break;
    case 2: y = std::min(size_ - 1, y + 1); break;
    case 3: x = std::max(0, x - 1); break;
    default: throw std::out_of_range("bad gridworld action");
  }
  const auto next = static_cast<std::size_t>(y * size_ + x);
  const bool terminal = next == goal_;
  return {next, terminal ? 1.0 : 0.0, terminal};
}


ValueIteration value_iteration(const GridWorld& world, double gamma, double tol) {
  const std::size_t n = world.n_states();
  ValueIteration out;
  out.v.assign(n, 0.0);
  out.q.assign(n, {});
  for (int iter = 0; iter < 100000; ++iter) {
    double change = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      if (world.is_goal(s)) continue;
      double best = -1e300;
      for (std::size_t a = 0; a < GridWorld::kActions; ++a) {
        const auto o = world.step(s, a);
        const double q = o.reward + (o.terminal ? 0.0 : gamma * out.v[o.next]);
        out.q[s][a] = q;
        best = std::max(best, q);
      }
      change = std::max(change, std::abs(best - out.v[s]));
      out.v[s] = best;
    }
    if (change < tol) break;
  }
  out.optimal.assign(n, {});
  for (std::size_t s = 0; s < n; ++s) {
    if (world.is_goal(s)) continue;
    for (std::size_t a = 0; a < GridWorld::kActions; ++a) {
      if (out.q[s][a] >= out.v[s] - 1e-9) out.optimal[s].push_back(a);
    }
  }
  return out;
}

GridworldTraining train_gridworld(std::size_t steps, std::uint64_t seed, double alpha,
                                  double gamma, double lambda, double eps_start,
                                  double eps_end) {
  const auto start = std::chrono::steady_clock::now();
  const GridWorld world;
  const sarsa::LearnerParams base(alpha, gamma, lambda, eps_start);
  sarsa::SarsaLearner learner(base, world.n_states(), GridWorld::kActions);
  Rng rng(seed);
  constexpr std::size_t kMaxEpisode = 200;

  std::size_t t = 0;
  auto anneal = [&] {
    const double frac = steps > 1 ? static_cast<double>(t) / static_cast<double>(steps - 1) : 1.0;
    learner.set_params(base.with_epsilon(eps_start + (eps_end - eps_start) * std::min(1.0, frac)));
  };
  const std::vector<std::size_t> all = {0, 1, 2, 3};
  std::size_t episodes = 0;
  while (t < steps) {
    ++episodes;
    std::size_t s;
    do {
      s = rng.uniform_index(world.n_states());
    } while (world.is_goal(s));
    anneal();
    std::size_t a = learner.select_action(s, all, rng);
    learner.advance(0.0, s, a);
    bool ended = false;
    for (std::size_t k = 0; k < kMaxEpisode && t < steps; ++k) {
      const auto o = world.step(s, a);
      ++t;
      if (o.terminal) {
        learner.finalize_episode(o.reward);
        ended = true;
        break;
      }
      anneal();
      const std::size_t a2 = learner.select_action(o.next, all, rng);
      learner.advance(o.reward, o.next, a2);
      s = o.next;
      a = a2;
    }
    if (!ended) learner.reset_episode();
  }

  GridworldTraining out;
  out.steps = t;
  out.q.assign(learner.q().values().begin(), learner.q().values().end());
  out.episodes = episodes;
  out.greedy = learner.greedy_policy();
  const auto vi = value_iteration(world, gamma);
  for (std::size_t st = 0; st < world.n_states(); ++st) {
    if (world.is_goal(st)) continue;
    ++out.non_goal;
    const auto& opt = vi.optimal[st];
    if (std::find(opt.begin(), opt.end(), out.greedy[st]) != opt.end()) ++out.matched;
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

OneStepSarsa::OneStepSarsa(std::size_t n_states, std::size_t n_actions, double alpha, double gamma)
    : n_actions_(n_actions), alpha_(alpha), gamma_(gamma), q_(n_states * n_actions, 0.0) {}

void OneStepSarsa::update(std::size_t s, std::size_t a, double r, std::size_t s2, std::size_t a2) {
  double& q = q_[s * n_actions_ + a];
  const double target = r + gamma_ * q_[s2 * n_actions_ + a2];
  q = q + alpha_ * (target - q);
}

std::int64_t reward_oracle(const std::array<bool, modes::kRewardCheckCount>& flags) {
  std::int64_t total = 0;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    total += (flags[i] ? 1 : 0) * parse_scaled(kRewardText[i]);
  }
  return total;
}

CheckResult check_encoder_bijections() {
  using namespace modes;
  std::set<std::size_t> danger, replenish, explore;
  std::size_t danger_inputs = 0, replenish_inputs = 0, explore_inputs = 0;
  for (int hit = 0; hit < 2; ++hit)
    for (int bump = 0; bump < 2; ++bump)
      for (int noise = 0; noise < 2; ++noise)
        for (int d = 0; d < 4; ++d) {
          Perception p;
          p.being_hit = hit;
          p.bumping = bump;
          p.hearing_noise = noise;
          p.opponent_distance = static_cast<OpponentDistance>(d);
          p.see_enemy = d != 3;
          danger.insert(encode_danger(p));
          ++danger_inputs;
        }
  // One representative (ammo%, health%) pair per levels code.
  const std::array<std::pair<double, double>, 8> levels = {{{30, 90},
                                                           {90, 30},
                                                           {30, 30},
                                                           {10, 90},
                                                           {90, 10},
                                                           {10, 10},
                                                           {10, 30},
                                                           {30, 10}}};
  for (int enemy = 0; enemy < 2; ++enemy)
    for (int see = 0; see < 2; ++see)
      for (int hear = 0; hear < 2; ++hear)
        for (const auto& [ammo, health] : levels) {
          Perception p;
          p.see_enemy = enemy;
          p.opponent_distance = enemy ? OpponentDistance::Short : OpponentDistance::None;
          p.see_pickup = see;
          p.hear_pickup = hear;
          p.ammo_pct = ammo;
          p.health_pct = health;
          replenish.insert(encode_replenish(p));
          ++replenish_inputs;
        }
  for (int m = 0; m < 3; ++m)
    for (int c = 0; c < 2; ++c) {
      Perception p;
      p.movement = static_cast<Movement>(m);
      p.crouched = c;
      explore.insert(encode_explore(p));
      ++explore_inputs;
    }
  auto covers = [](const std::set<std::size_t>& s, std::size_t n) {
    return s.size() == n && *s.begin() == 0 && *s.rbegin() == n - 1;
  };
  const bool ok = danger_inputs == 32 && covers(danger, 32) && replenish_inputs == 64 &&
                  covers(replenish, 64) && explore_inputs == 6 && covers(explore, 6);
  return make("encoder bijections", ok,
              "danger " + std::to_string(danger.size()) + "/32, replenish " +
                  std::to_string(replenish.size()) + "/64, explore " +
                  std::to_string(explore.size()) + "/6");
}

CheckResult check_action_counts() {
  using namespace modes;
  const bool ok = action_count(Mode::Danger) == 8 && action_count(Mode::Replenish) == 7 &&
                  action_count(Mode::Explore) == 6;
  return make("action set sizes", ok,
              std::to_string(action_count(Mode::Danger)) + "/" +
                  std::to_string(action_count(Mode::Replenish)) + "/" +
                  std::to_string(action_count(Mode::Explore)));
}

CheckResult check_reward_exactness(const RewardFn& reward) {
  std::size_t checked = 0, mismatched = 0;
  for (unsigned bits = 0; bits < (1u << 10); ++bits) {
    modes::RewardInputs in;
    in.healthy = bits & 1;
    in.colliding = bits & 2;
    in.moving = bits & 4;
    in.see_opponent = bits & 8;
    in.causing_damage = bits & 16;
    in.being_damaged = bits & 32;
    in.killed_opponent = bits & 64;
    in.killed_by_opponent = bits & 128;
    in.picked_up_item = bits & 256;
    in.gained_adrenaline = bits & 512;
    const auto out = reward(in);
    std::array<bool, modes::kRewardCheckCount> f = {
        in.healthy,        !in.healthy,       !in.colliding,         in.colliding,
        in.moving,         !in.moving,        in.see_opponent,       in.causing_damage,
        in.being_damaged,  in.killed_opponent, in.killed_by_opponent, in.picked_up_item,
        in.gained_adrenaline};
    ++checked;
    if (out.flags != f || out.total_scaled != reward_oracle(f)) ++mismatched;
  }
  return make("reward exactness", mismatched == 0 && checked == 1024,
              std::to_string(checked) + " flag vectors, " + std::to_string(mismatched) +
                  " mismatches");
}

CheckResult check_lambda_zero_equivalence(std::size_t transitions, std::uint64_t seed) {
  constexpr std::size_t kStates = 16, kActions = 5;
  constexpr double kAlpha = 0.2, kGamma = 0.9;
  sarsa::SarsaLearner learner(sarsa::LearnerParams(kAlpha, kGamma, 0.0, 0.2), kStates, kActions);
  OneStepSarsa reference(kStates, kActions, kAlpha, kGamma);
  Rng rng(seed);
  for (std::size_t i = 0; i < transitions; ++i) {
    const std::size_t s = rng.uniform_index(kStates), a = rng.uniform_index(kActions);
    const std::size_t s2 = rng.uniform_index(kStates), a2 = rng.uniform_index(kActions);
    const double r = -1.6 + 3.0001 * rng.uniform01();
    learner.update({s, a, r, s2, a2});
    reference.update(s, a, r, s2, a2);
  }
  const auto q = learner.q().values();
  const bool identical =
      q.size() == reference.values().size() &&
      std::memcmp(q.data(), reference.values().data(), q.size() * sizeof(double)) == 0;
  return make("lambda=0 equivalence", identical,
              std::to_string(transitions) + " transitions, " +
                  (identical ? "bit-identical" : "tables differ"));
}

CheckResult check_trace_decay(std::size_t max_k) {
  const std::array<double, 4> grid = {0.0, 0.3, 0.6, 0.9};
  double worst = 0.0;
  for (double gamma : grid) {
    for (double lambda : grid) {
      sarsa::SarsaLearner learner(sarsa::LearnerParams(0.2, gamma, lambda, 0.0), 4, 2);
      learner.update({0, 0, 0.5, 1, 0});  // first decay of the freshly set trace
      for (std::size_t k = 1; k <= max_k; ++k) {
        const double expected = std::pow(gamma * lambda, static_cast<double>(k));
        worst = std::max(worst, std::abs(learner.traces().at(0, 0) - expected));
        learner.update({1 + k % 3, k % 2, 0.25, 1 + (k + 1) % 3, 0});
      }
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "max deviation %.3g", worst);
  return make("trace decay", worst <= 1e-12, buf);
}

CheckResult check_gridworld_oracle(std::size_t steps, std::uint64_t seed) {
  const auto run = train_gridworld(steps, seed);
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%zu/%zu states optimal after %zu steps (%.2fs)", run.matched,
                run.non_goal, run.steps, run.seconds);
  return make("gridworld vs value iteration", run.matched == run.non_goal, buf);
}

std::vector<CheckResult> run_selftest(const RewardFn& reward) {
  return {check_encoder_bijections(),
          check_action_counts(),
          check_reward_exactness(reward),
          check_lambda_zero_equivalence(10000, 11),
          check_trace_decay(100),
          check_gridworld_oracle(50000, 7)};
}

}  // namespace dre::verify
