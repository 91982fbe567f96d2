#pragma once

#include <array>
#include <cstddef>
#include <optional>

#include "dre/modes.hpp"
#include "dre/rng.hpp"
#include "dre/sarsa.hpp"

namespace dre::modes {

enum class Policy { Learning, Random };

// Mode arbiter over three independent Sarsa(lambda) learners.
//
// Each decision tick the arbiter picks a mode, encodes the perception for
// that mode's learner and asks it for an action. The reward reported after
// the tick is held until the next decision: if the mode is unchanged it
// drives that learner's Sarsa update, otherwise it closes the outgoing
// learner's episode. A bot death closes the active learner's episode too.
class DreBot {
 public:
  DreBot(const sarsa::LearnerParams& params, Policy policy = Policy::Learning);

  ActionId arbiter_step(const Perception& p, Rng& rng);

  // Reward observed after the most recent action.
  void record_reward(double reward) { last_reward_ = reward; }

  void on_death();

  Policy policy() const { return policy_; }
  const sarsa::SarsaLearner& learner(Mode mode) const {
    return learners_[static_cast<std::size_t>(mode)];
  }
  sarsa::SarsaLearner& learner(Mode mode) { return learners_[static_cast<std::size_t>(mode)]; }
  const BotMemory& memory() const { return memory_; }
  std::optional<Mode> active_mode() const { return active_; }
  std::size_t steps_in(Mode mode) const { return steps_[static_cast<std::size_t>(mode)]; }

 private:
  Policy policy_;
  std::array<sarsa::SarsaLearner, 3> learners_;
  BotMemory memory_;
  std::optional<Mode> active_;
  double last_reward_ = 0.0;
  std::array<std::size_t, 3> steps_{};
};

}  // namespace dre::modes
