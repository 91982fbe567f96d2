#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dre/arena.hpp"
#include "dre/bot.hpp"

namespace dre::harness {

using modes::Policy;

struct ExperimentConfig {
  std::vector<double> gammas = {0.0, 0.3, 0.6, 0.9};
  std::vector<double> lambdas = {0.0, 0.3, 0.6, 0.9};
  double alpha = 0.2;
  double epsilon = 0.2;
  int deaths_per_game = 200;
  int runs = 2;
  int baseline_games = 5;
  std::vector<arena::Controller> opponents = {arena::Controller::Patroller,
                                              arena::Controller::Hunter};
  std::uint64_t base_seed = 2013;
  // Safety valve: a game still running after this many ticks is aborted.
  std::int64_t max_game_ticks = 5'000'000;
  arena::ArenaConfig arena = arena::default_config();

  void validate() const;
};

// Applies one experiment setting from a config file. Returns false for keys
// that are not experiment settings.
bool apply_experiment_key(ExperimentConfig& cfg, std::string_view key, std::string_view value);

struct RunRecord {
  int run = 1;
  double gamma = 0.0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  Policy policy = Policy::Learning;
  std::int64_t total_reward_scaled = 0;
  int kills = 0;
  int deaths = 0;
  std::int64_t ticks = 0;
  std::vector<std::int64_t> life_rewards_scaled;
  std::array<std::size_t, 3> mode_steps{};
  std::optional<std::string> error;

  double total_reward() const { return modes::scaled_to_real(total_reward_scaled); }
  int kd_difference() const { return kills - deaths; }
  double avg_reward() const { return deaths > 0 ? total_reward() / deaths : 0.0; }
  bool ok() const { return !error.has_value(); }

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

// Optional per-game observers. `on_tick` sees the arena after each step;
// `on_finish` sees the bot once the game ends (including aborted games).
struct GameHooks {
  std::function<void(const arena::Arena&, const arena::ArenaEvents&)> on_tick;
  std::function<void(const modes::DreBot&, const RunRecord&)> on_finish;
};

inline constexpr int kDreEntity = 0;

// Reward inputs for one entity after a tick.
modes::RewardInputs reward_inputs(const arena::Arena& arena, const arena::ArenaEvents& events,
                                  int id);

RunRecord play_game(const ExperimentConfig& cfg, double gamma, double lambda,
                    std::uint64_t seed, Policy policy, const GameHooks& hooks = {});

std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t gamma_index,
                        std::size_t lambda_index, int run);
std::uint64_t baseline_seed(std::uint64_t base_seed, int game);

struct RunSummary {
  int run = 0;
  std::size_t games = 0;
  std::size_t failed = 0;
  double mean_avg_reward = 0.0;
  double mean_total_reward = 0.0;
  double mean_kd = 0.0;
};

struct SweepReport {
  std::vector<RunRecord> records;
  std::vector<RunSummary> per_run;
  RunSummary overall;

  bool complete() const { return overall.failed == 0; }
};

// Means over completed records, grouped by run index.
SweepReport summarize(std::vector<RunRecord> records);

using FinishCallback = std::function<void(const modes::DreBot&, const RunRecord&)>;

// Plays every (run, gamma, lambda) cell. Cells are independent and run on
// up to `parallelism` threads; results come back ordered by
// (run, gamma index, lambda index) whatever the execution order.
SweepReport run_sweep(const ExperimentConfig& cfg, unsigned parallelism = 1,
                      const FinishCallback& on_finish = {});

// Random-policy games with learning disabled; record `run` is the game number.
SweepReport run_baseline(const ExperimentConfig& cfg, int games, unsigned parallelism = 1,
                         const FinishCallback& on_finish = {});

struct Stat {
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for n < 2
};

Stat describe(const std::vector<double>& values);

enum class Verdict { LearningSuperior, BaselineSuperior, Mixed, Indistinguishable };
std::string_view verdict_name(Verdict v);

struct ComparisonSummary {
  Stat learning_total;
  Stat baseline_total;
  Stat learning_kd;
  Stat baseline_kd;
  double total_difference = 0.0;
  double kd_difference = 0.0;
  Verdict verdict = Verdict::Indistinguishable;
};

// Throws std::invalid_argument when either report has no completed records.
ComparisonSummary compare(const SweepReport& learning, const SweepReport& baseline);

// Spearman rank correlation with average ranks for ties. NaN when either
// side is constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// Results CSV: run,gamma,lambda,seed,total_reward,kills,deaths,kd_diff,avg_reward
inline constexpr std::string_view kResultsHeader =
    "run,gamma,lambda,seed,total_reward,kills,deaths,kd_diff,avg_reward";

std::string format_scaled(std::int64_t scaled);
void write_results_csv(std::ostream& out, const std::vector<RunRecord>& records);

struct CsvError : std::runtime_error {
  CsvError(const std::string& what, std::vector<int> rows)
      : std::runtime_error(what), bad_rows(std::move(rows)) {}
  std::vector<int> bad_rows;  // 1-based line numbers
};

// Parses results written by write_results_csv (or transcribed by hand).
// Throws CsvError listing every malformed line, or when there are no rows.
std::vector<RunRecord> read_results_csv(std::istream& in);

// One JSON object per game with its per-life reward series.
std::string life_log_line(const RunRecord& record);

// One JSON object for one entity after one tick.
std::string event_log_line(const arena::Arena& arena, const arena::ArenaEvents& events, int id);

}  // namespace dre::harness
