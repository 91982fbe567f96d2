#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dre/modes.hpp"
#include "dre/sarsa.hpp"

// Reference implementations that share no code path with the learner or
// the reward accumulator. Used by `dre selftest` and the test suites.
namespace dre::verify {

// Deterministic square gridworld. Actions: 0 up, 1 right, 2 down, 3 left;
// moves into the border leave the agent in place. Entering the goal pays
// +1 and ends the episode; every other step pays 0. The default goal sits in
// the centre so every action is optimal somewhere.
class GridWorld {
 public:
  explicit GridWorld(int size = 5, int goal_x = 2, int goal_y = 2);

  static constexpr std::size_t kActions = 4;

  std::size_t n_states() const { return static_cast<std::size_t>(size_ * size_); }
  std::size_t goal() const { return goal_; }
  bool is_goal(std::size_t s) const { return s == goal_; }

  struct Outcome {
    std::size_t next;
    double reward;
    bool terminal;
  };
  Outcome step(std::size_t s, std::size_t a) const;

 private:
  int size_;
  std::size_t goal_;
};

struct ValueIteration {
  std::vector<double> v;
  std::vector<std::array<double, GridWorld::kActions>> q;
  // Actions within 1e-9 of the optimum, per state (empty for the goal).
  std::vector<std::vector<std::size_t>> optimal;
};

ValueIteration value_iteration(const GridWorld& world, double gamma, double tol = 1e-13);

struct GridworldTraining {
  std::vector<std::size_t> greedy;
  std::vector<double> q;             // final table, row-major
  std::size_t episodes = 0;
  std::size_t steps = 0;
  std::size_t matched = 0;  // non-goal states whose greedy action is optimal
  std::size_t non_goal = 0;
  double seconds = 0.0;
};

// Sarsa on the gridworld with exploring starts and epsilon annealed
// linearly from eps_start to eps_end over `steps` environment steps.
GridworldTraining train_gridworld(std::size_t steps, std::uint64_t seed, double alpha = 0.1,
                                  double gamma = 0.9, double lambda = 0.0,
                                  double eps_start = 0.3, double eps_end = 0.01);

// Plain one-step Sarsa: Q(s,a) += alpha * (r + gamma Q(s',a') - Q(s,a)).
class OneStepSarsa {
 public:
  OneStepSarsa(std::size_t n_states, std::size_t n_actions, double alpha, double gamma);
  void update(std::size_t s, std::size_t a, double r, std::size_t s2, std::size_t a2);
  const std::vector<double>& values() const { return q_; }

 private:
  std::size_t n_actions_;
  double alpha_;
  double gamma_;
  std::vector<double> q_;
};

// Reward-table dot product in 1e-5 units, from constants parsed out of
// their decimal text.
std::int64_t reward_oracle(const std::array<bool, modes::kRewardCheckCount>& flags);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

using RewardFn = std::function<modes::RewardBreakdown(const modes::RewardInputs&)>;

CheckResult check_encoder_bijections();
CheckResult check_action_counts();
CheckResult check_reward_exactness(const RewardFn& reward);
CheckResult check_lambda_zero_equivalence(std::size_t transitions, std::uint64_t seed);
CheckResult check_trace_decay(std::size_t max_k = 100);
CheckResult check_gridworld_oracle(std::size_t steps = 50000, std::uint64_t seed = 7);

std::vector<CheckResult> run_selftest(const RewardFn& reward = modes::compute_reward);

}  // namespace dre::verify
