#include "dre/bot.hpp"

namespace dre::modes {

DreBot::DreBot(const sarsa::LearnerParams& params, Policy policy)
    : policy_(policy),
      learners_{sarsa::SarsaLearner(params, kDangerStates, kDangerActions),
                sarsa::SarsaLearner(params, kReplenishStates, kReplenishActions),
                sarsa::SarsaLearner(params, kExploreStates, kExploreActions)} {}

ActionId DreBot::arbiter_step(const Perception& p, Rng& rng) {
  const Mode mode = select_mode(p);
  if (p.opponent_cell) memory_.last_seen_opponent = p.opponent_cell;

  const bool learning = policy_ == Policy::Learning;
  if (learning && active_ && *active_ != mode) {
    learner(*active_).finalize_episode(last_reward_);
  }

  const std::size_t s = encode_state(mode, p);
  const auto legal = legal_actions(mode, p, memory_);
  auto& active = learner(mode);
  std::size_t a;
  if (learning) {
    a = active.select_action(s, legal, rng);
    active.advance(last_reward_, s, a);
  } else {
    a = legal[rng.uniform_index(legal.size())];
  }

  const ActionId action{mode, a};
  if (action.is(ReplenishAction::RecordItem) && p.pickup_cell) {
    memory_.record_item(*p.pickup_cell);
  }
  last_reward_ = 0.0;
  active_ = mode;
  ++steps_[static_cast<std::size_t>(mode)];
  return action;
}

void DreBot::on_death() {
  if (policy_ == Policy::Learning && active_) learner(*active_).finalize_episode(last_reward_);
  active_.reset();
  last_reward_ = 0.0;
}

}  // namespace dre::modes
