#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "dre/rng.hpp"

namespace dre::sarsa {

// Learning parameters shared by every mode's learner. Construction validates
// the ranges: alpha in (0,1], gamma/lambda/epsilon in [0,1].
class LearnerParams {
 public:
  LearnerParams(double alpha, double gamma, double lambda, double epsilon);

  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }
  double lambda() const { return lambda_; }
  double epsilon() const { return epsilon_; }

  LearnerParams with_epsilon(double epsilon) const {
    return LearnerParams(alpha_, gamma_, lambda_, epsilon);
  }

 private:
  double alpha_;
  double gamma_;
  double lambda_;
  double epsilon_;
};

// Dense row-major (state, action) table of reals, zero-initialized.
class DenseTable {
 public:
  DenseTable(std::size_t n_states, std::size_t n_actions);

  std::size_t n_states() const { return n_states_; }
  std::size_t n_actions() const { return n_actions_; }

  double at(std::size_t s, std::size_t a) const { return values_[s * n_actions_ + a]; }
  double& at(std::size_t s, std::size_t a) { return values_[s * n_actions_ + a]; }

  std::span<const double> row(std::size_t s) const {
    return {values_.data() + s * n_actions_, n_actions_};
  }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  void fill(double v);
  double sum() const;

  friend bool operator==(const DenseTable&, const DenseTable&) = default;

 private:
  std::size_t n_states_;
  std::size_t n_actions_;
  std::vector<double> values_;
};

using QTable = DenseTable;
using TraceTable = DenseTable;

struct StepRecord {
  std::size_t s;
  std::size_t a;
  double r;
  std::size_t s_next;
  std::size_t a_next;
};

struct StateAction {
  std::size_t s;
  std::size_t a;
};

// Tabular Sarsa(lambda) with replacing traces and epsilon-greedy selection.
//
// The learner keeps at most one pending (s, a) pair: the pair chosen on the
// previous decision whose update is waiting for the next reward and the next
// chosen pair. `advance` performs that update and moves the pending pair
// forward; `finalize_episode` applies the terminal update and clears traces.
class SarsaLearner {
 public:
  SarsaLearner(LearnerParams params, std::size_t n_states, std::size_t n_actions);

  const LearnerParams& params() const { return params_; }
  void set_params(const LearnerParams& params) { params_ = params; }

  const QTable& q() const { return q_; }
  QTable& mutable_q() { return q_; }
  const TraceTable& traces() const { return e_; }
  std::size_t n_states() const { return q_.n_states(); }
  std::size_t n_actions() const { return q_.n_actions(); }

  // With probability epsilon a uniform draw from `legal`; otherwise the legal
  // action with the largest Q(s, .), ties going to the lowest index.
  // Throws std::invalid_argument on an empty legal set or out-of-range index.
  std::size_t select_action(std::size_t s, std::span<const std::size_t> legal, Rng& rng) const;

  // Greedy action over `legal` only, no exploration.
  std::size_t greedy_action(std::size_t s, std::span<const std::size_t> legal) const;

  // One Sarsa(lambda) backup over the whole table.
  void update(const StepRecord& step);

  // Feeds the reward that followed the pending pair plus the newly chosen
  // pair. With no pending pair the reward is dropped and (s, a) becomes
  // pending.
  void advance(double reward, std::size_t s_next, std::size_t a_next);

  // Terminal update with Q(s', a') = 0, then traces zeroed and pending
  // cleared. No-op when nothing is pending.
  void finalize_episode(double reward);

  // Drops the pending pair and traces without learning.
  void reset_episode();

  const std::optional<StateAction>& pending() const { return pending_; }

  // Lowest-index argmax of Q(s, .) for every state, ignoring legality.
  std::vector<std::size_t> greedy_policy() const;

 private:
  void check_state(std::size_t s) const;
  void check_action(std::size_t a) const;
  void backup(std::size_t s, std::size_t a, double delta);

  LearnerParams params_;
  QTable q_;
  TraceTable e_;
  std::optional<StateAction> pending_;
};

// CSV with header `state,action,q`, one row per cell. Values use the
// shortest decimal form that round-trips exactly.
void write_q_csv(std::ostream& out, const QTable& q);
QTable read_q_csv(std::istream& in);

}  // namespace dre::sarsa
