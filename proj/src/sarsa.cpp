#include "dre/sarsa.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace dre::sarsa {

namespace {

bool in_unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

LearnerParams::LearnerParams(double alpha, double gamma, double lambda, double epsilon)
    : alpha_(alpha), gamma_(gamma), lambda_(lambda), epsilon_(epsilon) {
  if (!(std::isfinite(alpha) && alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must be in (0,1]");
  }
  if (!in_unit(gamma)) throw std::invalid_argument("gamma must be in [0,1]");
  if (!in_unit(lambda)) throw std::invalid_argument("lambda must be in [0,1]");
  if (!in_unit(epsilon)) throw std::invalid_argument("epsilon must be in [0,1]");
}

DenseTable::DenseTable(std::size_t n_states, std::size_t n_actions)
    : n_states_(n_states), n_actions_(n_actions), values_(n_states * n_actions, 0.0) {
  if (n_states == 0 || n_actions == 0) {
    throw std::invalid_argument("table dimensions must be positive");
  }
}

void DenseTable::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

double DenseTable::sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

SarsaLearner::SarsaLearner(LearnerParams params, std::size_t n_states, std::size_t n_actions)
    : params_(params), q_(n_states, n_actions), e_(n_states, n_actions) {}

void SarsaLearner::check_state(std::size_t s) const {
  if (s >= q_.n_states()) throw std::out_of_range("bad state index");
}

void SarsaLearner::check_action(std::size_t a) const {
  if (a >= q_.n_actions()) throw std::out_of_range("bad action index");
}

std::size_t SarsaLearner::greedy_action(std::size_t s, std::span<const std::size_t> legal) const {
  if (legal.empty()) throw std::invalid_argument("no legal action");
  check_state(s);
  std::size_t best = legal.front();
  check_action(best);
  for (std::size_t a : legal) {
    check_action(a);
    const double v = q_.at(s, a);
    const double b = q_.at(s, best);
    if (v > b || (v == b && a < best)) best = a;
  }
  return best;
}

std::size_t SarsaLearner::select_action(std::size_t s, std::span<const std::size_t> legal,
                                        Rng& rng) const {
  if (legal.empty()) throw std::invalid_argument("no legal action");
  check_state(s);
  if (rng.uniform01() < params_.epsilon()) {
    const std::size_t a = legal[rng.uniform_index(legal.size())];
    check_action(a);
    return a;
  }
  return greedy_action(s, legal);
}

void SarsaLearner::backup(std::size_t s, std::size_t a, double delta) {
  e_.at(s, a) = 1.0;
  const double alpha = params_.alpha();
  const double decay = params_.gamma() * params_.lambda();
  auto q = q_.values();
  auto e = e_.values();
  for (std::size_t i = 0; i < q.size(); ++i) {
    q[i] += alpha * delta * e[i];
    e[i] *= decay;
  }
}

void SarsaLearner::update(const StepRecord& step) {
  if (!std::isfinite(step.r)) throw std::invalid_argument("bad reward");
  check_state(step.s);
  check_state(step.s_next);
  check_action(step.a);
  check_action(step.a_next);
  const double delta =
      step.r + params_.gamma() * q_.at(step.s_next, step.a_next) - q_.at(step.s, step.a);
  backup(step.s, step.a, delta);
}

void SarsaLearner::advance(double reward, std::size_t s_next, std::size_t a_next) {
  check_state(s_next);
  check_action(a_next);
  if (pending_) update({pending_->s, pending_->a, reward, s_next, a_next});
  pending_ = StateAction{s_next, a_next};
}

void SarsaLearner::finalize_episode(double reward) {
  if (!pending_) return;
  if (!std::isfinite(reward)) throw std::invalid_argument("bad reward");
  const auto [s, a] = *pending_;
  backup(s, a, reward - q_.at(s, a));
  e_.fill(0.0);
  pending_.reset();
}

void SarsaLearner::reset_episode() {
  e_.fill(0.0);
  pending_.reset();
}

std::vector<std::size_t> SarsaLearner::greedy_policy() const {
  std::vector<std::size_t> policy(q_.n_states());
  for (std::size_t s = 0; s < q_.n_states(); ++s) {
    auto row = q_.row(s);
    std::size_t best = 0;
    for (std::size_t a = 1; a < row.size(); ++a) {
      if (row[a] > row[best]) best = a;
    }
    policy[s] = best;
  }
  return policy;
}

void write_q_csv(std::ostream& out, const QTable& q) {
  out << "state,action,q\n";
  for (std::size_t s = 0; s < q.n_states(); ++s) {
    for (std::size_t a = 0; a < q.n_actions(); ++a) {
      out << s << ',' << a << ',' << format_double(q.at(s, a)) << '\n';
    }
  }
}

QTable read_q_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "state,action,q") {
    throw std::runtime_error("q-table csv: missing header");
  }
  struct Cell {
    std::size_t s, a;
    double q;
  };
  std::vector<Cell> cells;
  std::size_t max_s = 0, max_a = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Cell c{};
    const char* p = line.data();
    const char* end = line.data() + line.size();
    auto r1 = std::from_chars(p, end, c.s);
    if (r1.ec != std::errc() || r1.ptr == end || *r1.ptr != ',') {
      throw std::runtime_error("q-table csv: bad row " + std::to_string(line_no));
    }
    auto r2 = std::from_chars(r1.ptr + 1, end, c.a);
    if (r2.ec != std::errc() || r2.ptr == end || *r2.ptr != ',') {
      throw std::runtime_error("q-table csv: bad row " + std::to_string(line_no));
    }
    auto r3 = std::from_chars(r2.ptr + 1, end, c.q);
    if (r3.ec != std::errc() || r3.ptr != end || !std::isfinite(c.q)) {
      throw std::runtime_error("q-table csv: bad row " + std::to_string(line_no));
    }
    max_s = std::max(max_s, c.s);
    max_a = std::max(max_a, c.a);
    cells.push_back(c);
  }
  if (cells.empty()) throw std::runtime_error("q-table csv: no rows");
  QTable q(max_s + 1, max_a + 1);
  if (cells.size() != q.values().size()) {
    throw std::runtime_error("q-table csv: table is not dense");
  }
  std::vector<bool> seen(cells.size(), false);
  for (const auto& c : cells) {
    const std::size_t idx = c.s * q.n_actions() + c.a;
    if (seen[idx]) throw std::runtime_error("q-table csv: duplicate cell");
    seen[idx] = true;
    q.at(c.s, c.a) = c.q;
  }
  return q;
}

}  // namespace dre::sarsa
