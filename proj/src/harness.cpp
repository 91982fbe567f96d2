#include "dre/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "dre/config.hpp"
#include "json.hpp"

namespace dre::harness {

namespace {

constexpr std::uint64_t kSweepSalt = 0x5eed5eedULL;
constexpr std::uint64_t kBaselineSalt = 0xba5e11eeULL;

void check_unit_list(const std::vector<double>& v, std::string_view what) {
  if (v.empty()) throw std::invalid_argument(std::string(what) + " must not be empty");
  for (double x : v) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument(std::string(what) + " out of [0,1]");
  }
}

template <typename Job>
void run_jobs(std::size_t count, unsigned parallelism, Job job) {
  const unsigned workers =
      static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(parallelism, count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace

void ExperimentConfig::validate() const {
  check_unit_list(gammas, "gammas");
  check_unit_list(lambdas, "lambdas");
  sarsa::LearnerParams(alpha, gammas.front(), lambdas.front(), epsilon);
  if (deaths_per_game <= 0) throw std::invalid_argument("deaths_per_game must be positive");
  if (runs <= 0) throw std::invalid_argument("runs must be positive");
  if (baseline_games <= 0) throw std::invalid_argument("games must be positive");
  if (opponents.empty()) throw std::invalid_argument("at least one opponent is required");
  if (max_game_ticks <= 0) throw std::invalid_argument("max_game_ticks must be positive");
  arena.validate();
}

bool apply_experiment_key(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  if (key == "gammas") cfg.gammas = config::parse_double_list(value, key);
  else if (key == "lambdas") cfg.lambdas = config::parse_double_list(value, key);
  else if (key == "alpha") cfg.alpha = config::parse_double(value, key);
  else if (key == "epsilon") cfg.epsilon = config::parse_double(value, key);
  else if (key == "deaths") cfg.deaths_per_game = static_cast<int>(config::parse_int(value, key));
  else if (key == "runs") cfg.runs = static_cast<int>(config::parse_int(value, key));
  else if (key == "games") cfg.baseline_games = static_cast<int>(config::parse_int(value, key));
  else if (key == "seed") cfg.base_seed = config::parse_uint(value, key);
  else if (key == "max_game_ticks") cfg.max_game_ticks = config::parse_int(value, key);
  else if (key == "opponents") {
    cfg.opponents.clear();
    for (auto name : config::split(value, ',')) {
      cfg.opponents.push_back(arena::parse_controller(config::trim(name)));
    }
  } else {
    return false;
  }
  return true;
}

modes::RewardInputs reward_inputs(const arena::Arena& arena, const arena::ArenaEvents& events,
                                  int id) {
  const auto& e = arena.entity(id);
  const auto& ev = events.entities.at(static_cast<std::size_t>(id));
  modes::RewardInputs in;
  in.healthy = 100.0 * e.health / arena.config().max_health > modes::kLowLevelPct;
  in.colliding = ev.collided;
  in.moving = ev.moved;
  in.see_opponent = ev.saw_enemy;
  in.causing_damage = ev.dealt_damage;
  in.being_damaged = ev.took_damage;
  in.killed_opponent = ev.killed;
  in.killed_by_opponent = ev.died;
  in.picked_up_item = ev.picked_item;
  in.gained_adrenaline = ev.gained_adrenaline;
  return in;
}

RunRecord play_game(const ExperimentConfig& cfg, double gamma, double lambda,
                    std::uint64_t seed, Policy policy, const GameHooks& hooks) {
  RunRecord rec;
  rec.gamma = gamma;
  rec.lambda = lambda;
  rec.seed = seed;
  rec.policy = policy;

  cfg.validate();
  std::vector<arena::Controller> controllers = {arena::Controller::Learner};
  controllers.insert(controllers.end(), cfg.opponents.begin(), cfg.opponents.end());
  arena::Arena arena(cfg.arena, controllers, combine_seed(seed, 1));
  Rng bot_rng(combine_seed(seed, 2));
  Rng script_rng(combine_seed(seed, 3));
  modes::DreBot bot(sarsa::LearnerParams(cfg.alpha, gamma, lambda, cfg.epsilon), policy);

  std::int64_t life_reward = 0;
  try {
    while (arena.entity(kDreEntity).deaths < cfg.deaths_per_game) {
      if (arena.tick() >= cfg.max_game_ticks ||
          (cfg.arena.tick_limit && arena.tick() >= *cfg.arena.tick_limit)) {
        throw std::runtime_error("tick limit reached after " + std::to_string(arena.tick()) +
                                 " ticks");
      }
      std::map<int, arena::Intent> intents;
      const bool bot_acting = arena.entity(kDreEntity).alive;
      if (bot_acting) {
        const auto p = arena.perceive(kDreEntity);
        const auto action = bot.arbiter_step(p, bot_rng);
        intents[kDreEntity] = arena.apply_action(kDreEntity, action, p, bot.memory(), bot_rng);
      }
      for (const auto& e : arena.entities()) {
        if (e.id != kDreEntity && e.alive) intents[e.id] = arena.scripted_intent(e.id, script_rng);
      }
      const auto events = arena.step(intents);
      if (bot_acting) {
        const auto reward = modes::compute_reward(reward_inputs(arena, events, kDreEntity));
        rec.total_reward_scaled += reward.total_scaled;
        life_reward += reward.total_scaled;
        bot.record_reward(reward.total());
        if (events.entities[kDreEntity].died) {
          bot.on_death();
          rec.life_rewards_scaled.push_back(life_reward);
          life_reward = 0;
        }
      }
      if (hooks.on_tick) hooks.on_tick(arena, events);
    }
  } catch (const std::exception& ex) {
    rec.error = ex.what();
  }
  rec.kills = arena.entity(kDreEntity).kills;
  rec.deaths = arena.entity(kDreEntity).deaths;
  rec.ticks = arena.tick();
  for (auto mode : modes::kAllModes) {
    rec.mode_steps[static_cast<std::size_t>(mode)] = bot.steps_in(mode);
  }
  if (hooks.on_finish) hooks.on_finish(bot, rec);
  return rec;
}

std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t gamma_index,
                        std::size_t lambda_index, int run) {
  const std::uint64_t key = (static_cast<std::uint64_t>(run) << 40) |
                            (static_cast<std::uint64_t>(gamma_index) << 20) |
                            static_cast<std::uint64_t>(lambda_index);
  return combine_seed(combine_seed(base_seed, kSweepSalt), key);
}

std::uint64_t baseline_seed(std::uint64_t base_seed, int game) {
  return combine_seed(combine_seed(base_seed, kBaselineSalt), static_cast<std::uint64_t>(game));
}

SweepReport summarize(std::vector<RunRecord> records) {
  SweepReport report;
  report.records = std::move(records);
  std::map<int, RunSummary> groups;
  auto add = [](RunSummary& s, const RunRecord& r) {
    ++s.games;
    if (!r.ok()) {
      ++s.failed;
      return;
    }
    s.mean_avg_reward += r.avg_reward();
    s.mean_total_reward += r.total_reward();
    s.mean_kd += r.kd_difference();
  };
  auto finish = [](RunSummary& s) {
    const std::size_t n = s.games - s.failed;
    if (n == 0) return;
    s.mean_avg_reward /= static_cast<double>(n);
    s.mean_total_reward /= static_cast<double>(n);
    s.mean_kd /= static_cast<double>(n);
  };
  for (const auto& r : report.records) {
    auto& g = groups[r.run];
    g.run = r.run;
    add(g, r);
    add(report.overall, r);
  }
  for (auto& [run, s] : groups) {
    finish(s);
    report.per_run.push_back(s);
  }
  finish(report.overall);
  return report;
}

SweepReport run_sweep(const ExperimentConfig& cfg, unsigned parallelism,
                      const FinishCallback& on_finish) {
  cfg.validate();
  struct Cell {
    int run;
    std::size_t gi, li;
  };
  std::vector<Cell> cells;
  for (int run = 1; run <= cfg.runs; ++run) {
    for (std::size_t gi = 0; gi < cfg.gammas.size(); ++gi) {
      for (std::size_t li = 0; li < cfg.lambdas.size(); ++li) cells.push_back({run, gi, li});
    }
  }
  std::vector<RunRecord> records(cells.size());
  run_jobs(cells.size(), parallelism, [&](std::size_t i) {
    const auto& c = cells[i];
    GameHooks hooks;
    if (on_finish) {
      hooks.on_finish = [&on_finish, run = c.run](const modes::DreBot& bot, const RunRecord& r) {
        RunRecord tagged = r;
        tagged.run = run;
        on_finish(bot, tagged);
      };
    }
    auto rec = play_game(cfg, cfg.gammas[c.gi], cfg.lambdas[c.li],
                         cell_seed(cfg.base_seed, c.gi, c.li, c.run), Policy::Learning, hooks);
    rec.run = c.run;
    records[i] = std::move(rec);
  });
  return summarize(std::move(records));
}

SweepReport run_baseline(const ExperimentConfig& cfg, int games, unsigned parallelism,
                         const FinishCallback& on_finish) {
  cfg.validate();
  if (games < 1) throw std::invalid_argument("games must be >= 1");
  std::vector<RunRecord> records(static_cast<std::size_t>(games));
  run_jobs(records.size(), parallelism, [&](std::size_t i) {
    const int game = static_cast<int>(i) + 1;
    GameHooks hooks;
    if (on_finish) {
      hooks.on_finish = [&on_finish, game](const modes::DreBot& bot, const RunRecord& r) {
        RunRecord tagged = r;
        tagged.run = game;
        on_finish(bot, tagged);
      };
    }
    auto rec = play_game(cfg, 0.0, 0.0, baseline_seed(cfg.base_seed, game), Policy::Random, hooks);
    rec.run = game;
    records[i] = std::move(rec);
  });
  return summarize(std::move(records));
}

Stat describe(const std::vector<double>& values) {
  Stat s;
  s.n = values.size();
  if (s.n == 0) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::LearningSuperior: return "learning superior";
    case Verdict::BaselineSuperior: return "baseline superior";
    case Verdict::Mixed: return "mixed";
    case Verdict::Indistinguishable: return "indistinguishable";
  }
  return "?";
}

ComparisonSummary compare(const SweepReport& learning, const SweepReport& baseline) {
  auto collect = [](const SweepReport& r, std::vector<double>& total, std::vector<double>& kd) {
    for (const auto& rec : r.records) {
      if (!rec.ok()) continue;
      total.push_back(rec.total_reward());
      kd.push_back(rec.kd_difference());
    }
  };
  std::vector<double> lt, lk, bt, bk;
  collect(learning, lt, lk);
  collect(baseline, bt, bk);
  if (lt.empty() || bt.empty()) throw std::invalid_argument("compare: empty report");
  ComparisonSummary c;
  c.learning_total = describe(lt);
  c.learning_kd = describe(lk);
  c.baseline_total = describe(bt);
  c.baseline_kd = describe(bk);
  c.total_difference = c.learning_total.mean - c.baseline_total.mean;
  c.kd_difference = c.learning_kd.mean - c.baseline_kd.mean;
  const int sign_total = (c.total_difference > 0) - (c.total_difference < 0);
  const int sign_kd = (c.kd_difference > 0) - (c.kd_difference < 0);
  if (sign_total == 0 && sign_kd == 0) c.verdict = Verdict::Indistinguishable;
  else if (sign_total >= 0 && sign_kd >= 0) c.verdict = Verdict::LearningSuperior;
  else if (sign_total <= 0 && sign_kd <= 0) c.verdict = Verdict::BaselineSuperior;
  else c.verdict = Verdict::Mixed;
  return c;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: size mismatch");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const Stat sx = describe(rx);
  const Stat sy = describe(ry);
  if (x.size() < 2 || sx.stddev == 0.0 || sy.stddev == 0.0) return std::nan("");
  double cov = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) cov += (rx[i] - sx.mean) * (ry[i] - sy.mean);
  cov /= static_cast<double>(rx.size() - 1);
  return cov / (sx.stddev * sy.stddev);
}

std::string format_scaled(std::int64_t scaled) {
  const bool negative = scaled < 0;
  const std::uint64_t mag =
      negative ? static_cast<std::uint64_t>(-(scaled + 1)) + 1 : static_cast<std::uint64_t>(scaled);
  const std::uint64_t scale = static_cast<std::uint64_t>(modes::kRewardScale);
  std::string frac = std::to_string(mag % scale);
  frac.insert(0, 5 - frac.size(), '0');
  return (negative ? "-" : "") + std::to_string(mag / scale) + "." + frac;
}

void write_results_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << kResultsHeader << '\n';
  for (const auto& r : records) {
    if (!r.ok()) continue;
    out << r.run << ',' << config::format_double(r.gamma) << ','
        << config::format_double(r.lambda) << ',' << r.seed << ','
        << format_scaled(r.total_reward_scaled) << ',' << r.kills << ',' << r.deaths << ','
        << r.kd_difference() << ',' << config::format_double(r.avg_reward()) << '\n';
  }
}

std::vector<RunRecord> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw CsvError("results csv: empty file", {});
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsHeader) throw CsvError("results csv: bad header", {1});

  std::vector<RunRecord> records;
  std::vector<int> bad;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (config::trim(line).empty()) continue;
    try {
      const auto f = config::split(line, ',');
      if (f.size() != 9) throw std::invalid_argument("field count");
      RunRecord r;
      r.run = static_cast<int>(config::parse_int(f[0], "run"));
      r.gamma = config::parse_double(f[1], "gamma");
      r.lambda = config::parse_double(f[2], "lambda");
      r.seed = config::parse_uint(f[3], "seed");
      r.total_reward_scaled = std::llround(config::parse_double(f[4], "total_reward") *
                                           static_cast<double>(modes::kRewardScale));
      r.kills = static_cast<int>(config::parse_int(f[5], "kills"));
      r.deaths = static_cast<int>(config::parse_int(f[6], "deaths"));
      const auto kd = config::parse_int(f[7], "kd_diff");
      const double avg = config::parse_double(f[8], "avg_reward");
      if (r.kills < 0 || r.deaths < 0 || kd != r.kd_difference()) {
        throw std::invalid_argument("inconsistent counts");
      }
      if (std::abs(avg - r.avg_reward()) > 1e-6 * std::max(1.0, std::abs(avg))) {
        throw std::invalid_argument("inconsistent avg_reward");
      }
      records.push_back(r);
    } catch (const std::invalid_argument&) {
      bad.push_back(line_no);
    }
  }
  if (!bad.empty()) {
    std::string msg = "results csv: malformed rows at lines";
    for (int b : bad) msg += " " + std::to_string(b);
    throw CsvError(msg, bad);
  }
  if (records.empty()) throw CsvError("results csv: no data rows", {});
  return records;
}

std::string life_log_line(const RunRecord& record) {
  nlohmann::json j;
  j["run"] = record.run;
  j["gamma"] = record.gamma;
  j["lambda"] = record.lambda;
  j["seed"] = record.seed;
  j["policy"] = record.policy == Policy::Learning ? "learning" : "random";
  nlohmann::json lives = nlohmann::json::array();
  for (auto v : record.life_rewards_scaled) lives.push_back(modes::scaled_to_real(v));
  j["life_rewards"] = std::move(lives);
  if (record.error) j["error"] = *record.error;
  return j.dump();
}

std::string event_log_line(const arena::Arena& arena, const arena::ArenaEvents& events, int id) {
  const auto& e = arena.entity(id);
  const auto& ev = events.entities.at(static_cast<std::size_t>(id));
  nlohmann::json j;
  j["tick"] = events.tick;
  j["entity"] = id;
  j["controller"] = arena::controller_name(e.controller);
  j["x"] = e.position.x;
  j["y"] = e.position.y;
  j["health"] = e.health;
  j["ammo"] = e.ammo;
  j["alive"] = e.alive;
  j["kills"] = e.kills;
  j["deaths"] = e.deaths;
  j["events"] = {{"dealt_damage", ev.dealt_damage}, {"took_damage", ev.took_damage},
                 {"killed", ev.killed},             {"died", ev.died},
                 {"picked_item", ev.picked_item},   {"gained_adrenaline", ev.gained_adrenaline},
                 {"collided", ev.collided},         {"moved", ev.moved},
                 {"saw_enemy", ev.saw_enemy},       {"heard_noise", ev.heard_noise},
                 {"heard_pickup", ev.heard_pickup}, {"fired", ev.fired}};
  return j.dump();
}

}  // namespace dre::harness
