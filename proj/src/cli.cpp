#include "dre/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

#include "CLI11.hpp"
#include "dre/config.hpp"
#include "dre/harness.hpp"
#include "dre/report.hpp"
#include "dre/verify.hpp"

namespace dre::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config_path;
  std::string out_dir = "results";
  std::optional<std::uint64_t> seed;
  std::string gammas;
  std::string lambdas;
  std::optional<int> runs;
  std::optional<int> deaths;
  std::optional<int> games;
  bool random = false;
  std::optional<unsigned> parallel;
  bool verbose = false;
  std::string results_path;
  std::string baseline_path;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

harness::ExperimentConfig load_config(const Options& opt) {
  harness::ExperimentConfig cfg;
  bool seed_from_file = false;
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path);
    if (!in) throw UsageError("cannot read config file: " + opt.config_path);
    const std::string base_dir = fs::path(opt.config_path).parent_path().string();
    try {
      for (const auto& e : config::parse_key_values(in)) {
        if (e.key == "seed") seed_from_file = true;
        if (!harness::apply_experiment_key(cfg, e.key, e.value) &&
            !arena::apply_arena_key(cfg.arena, e.key, e.value, base_dir.empty() ? "." : base_dir)) {
          throw UsageError(opt.config_path + ":" + std::to_string(e.line) + ": unknown key '" +
                           e.key + "'");
        }
      }
    } catch (const UsageError&) {
      throw;
    } catch (const std::exception& ex) {
      throw UsageError(opt.config_path + ": " + ex.what());
    }
  }
  try {
    if (opt.seed) {
      cfg.base_seed = *opt.seed;
    } else if (const char* env = std::getenv("DRE_SEED"); env && !seed_from_file) {
      cfg.base_seed = config::parse_uint(env, "DRE_SEED");
    }
    if (!opt.gammas.empty()) cfg.gammas = config::parse_double_list(opt.gammas, "--gammas");
    if (!opt.lambdas.empty()) cfg.lambdas = config::parse_double_list(opt.lambdas, "--lambdas");
    if (opt.runs) cfg.runs = *opt.runs;
    if (opt.deaths) cfg.deaths_per_game = *opt.deaths;
    if (opt.games) cfg.baseline_games = *opt.games;
    cfg.validate();
  } catch (const std::exception& ex) {
    throw UsageError(ex.what());
  }
  return cfg;
}

unsigned parallelism(const Options& opt, std::size_t jobs) {
  if (opt.parallel) return std::max(1u, *opt.parallel);
  const unsigned cores = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(jobs, cores));
}

fs::path prepare_out(const Options& opt) {
  fs::path out(opt.out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw UsageError("cannot create output directory: " + opt.out_dir);
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path.string());
  f << content;
}

std::string mode_file_tag(modes::Mode mode) {
  std::string s(modes::mode_name(mode));
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string cell_tag(const harness::RunRecord& r) {
  return "run" + std::to_string(r.run) + "_gamma" + config::format_double(r.gamma) + "_lambda" +
         config::format_double(r.lambda);
}

void dump_q_tables(const fs::path& dir, const std::string& tag, const modes::DreBot& bot) {
  fs::create_directories(dir);
  for (auto mode : modes::kAllModes) {
    std::ofstream f(dir / (tag + "_" + mode_file_tag(mode) + ".csv"), std::ios::binary);
    sarsa::write_q_csv(f, bot.learner(mode).q());
  }
}

void dump_policies(const fs::path& dir, const modes::DreBot& bot) {
  for (auto mode : modes::kAllModes) {
    std::ofstream f(dir / ("policy_" + mode_file_tag(mode) + ".csv"), std::ios::binary);
    f << "state,label,action,q\n";
    const auto& learner = bot.learner(mode);
    const auto greedy = learner.greedy_policy();
    for (std::size_t s = 0; s < greedy.size(); ++s) {
      f << s << ',' << modes::describe_state(mode, s) << ','
        << modes::action_name(mode, greedy[s]) << ','
        << config::format_double(learner.q().at(s, greedy[s])) << '\n';
    }
  }
}

std::string lives_jsonl(const std::vector<harness::RunRecord>& records) {
  std::string s;
  for (const auto& r : records) s += harness::life_log_line(r) + "\n";
  return s;
}

std::string csv_text(const std::vector<harness::RunRecord>& records) {
  std::ostringstream ss;
  harness::write_results_csv(ss, records);
  return ss.str();
}

void report_failures(const harness::SweepReport& rep, std::ostream& err) {
  for (const auto& r : rep.records) {
    if (!r.ok()) {
      err << "game failed (run " << r.run << ", gamma " << r.gamma << ", lambda " << r.lambda
          << ", seed " << r.seed << "): " << *r.error << '\n';
    }
  }
}

void write_charts(const fs::path& out, const std::vector<harness::RunRecord>& records) {
  write_file(out / "total_reward.svg", report::heatmap_svg(records, report::Metric::TotalReward));
  write_file(out / "kd_difference.svg",
             report::heatmap_svg(records, report::Metric::KillDeathDifference));
}

int cmd_sweep(const Options& opt, std::ostream& out, std::ostream& err) {
  const auto cfg = load_config(opt);
  const fs::path dir = prepare_out(opt);
  const std::size_t jobs = cfg.gammas.size() * cfg.lambdas.size() * static_cast<std::size_t>(cfg.runs);
  std::mutex log_mutex;
  auto on_finish = [&](const modes::DreBot& bot, const harness::RunRecord& r) {
    dump_q_tables(dir / "qtables", cell_tag(r), bot);
    if (opt.verbose) {
      std::lock_guard lock(log_mutex);
      err << "finished " << cell_tag(r) << ": K-D " << r.kd_difference() << ", reward "
          << harness::format_scaled(r.total_reward_scaled) << '\n';
    }
  };
  const auto rep = harness::run_sweep(cfg, parallelism(opt, jobs), on_finish);
  write_file(dir / "results.csv", csv_text(rep.records));
  write_file(dir / "lives.jsonl", lives_jsonl(rep.records));
  const std::string text = report::full_report(rep, std::nullopt);
  write_file(dir / "report.txt", text);
  write_charts(dir, rep.records);
  out << text;
  if (!rep.complete()) {
    report_failures(rep, err);
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_baseline(const Options& opt, std::ostream& out, std::ostream& err) {
  const auto cfg = load_config(opt);
  const fs::path dir = prepare_out(opt);
  const auto rep = harness::run_baseline(cfg, cfg.baseline_games,
                                         parallelism(opt, static_cast<std::size_t>(cfg.baseline_games)));
  write_file(dir / "baseline.csv", csv_text(rep.records));
  write_file(dir / "baseline_lives.jsonl", lives_jsonl(rep.records));
  const std::string text = report::baseline_table(rep);
  write_file(dir / "baseline_report.txt", text);
  out << text;
  if (!rep.complete()) {
    report_failures(rep, err);
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_play(const Options& opt, std::ostream& out, std::ostream& err) {
  const auto cfg = load_config(opt);
  const fs::path dir = prepare_out(opt);
  std::ofstream events(dir / "play_events.jsonl", std::ios::binary);
  if (!events) throw UsageError("cannot write event log");
  harness::GameHooks hooks;
  hooks.on_tick = [&](const arena::Arena& a, const arena::ArenaEvents& ev) {
    for (const auto& e : a.entities()) events << harness::event_log_line(a, ev, e.id) << '\n';
  };
  const auto policy = opt.random ? modes::Policy::Random : modes::Policy::Learning;
  hooks.on_finish = [&](const modes::DreBot& bot, const harness::RunRecord&) {
    if (policy == modes::Policy::Learning) {
      dump_q_tables(dir / "qtables", "play", bot);
      dump_policies(dir, bot);
    }
  };
  const auto rec = harness::play_game(cfg, cfg.gammas.front(), cfg.lambdas.front(),
                                      cfg.base_seed, policy, hooks);
  write_file(dir / "play.csv", csv_text({rec}));
  write_file(dir / "play_lives.jsonl", lives_jsonl({rec}));
  out << "policy " << (opt.random ? "random" : "learning") << ", gamma "
      << config::format_double(rec.gamma) << ", lambda " << config::format_double(rec.lambda)
      << ", seed " << rec.seed << '\n'
      << "kills " << rec.kills << ", deaths " << rec.deaths << ", K-D " << rec.kd_difference()
      << ", total reward " << harness::format_scaled(rec.total_reward_scaled) << ", ticks "
      << rec.ticks << '\n';
  if (!rec.ok()) {
    err << "game failed: " << *rec.error << '\n';
    return kExitPartial;
  }
  return kExitOk;
}

std::vector<harness::RunRecord> read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read results file: " + path);
  try {
    return harness::read_results_csv(in);
  } catch (const harness::CsvError& ex) {
    throw UsageError(path + ": " + ex.what());
  }
}

int cmd_report(const Options& opt, std::ostream& out, std::ostream&) {
  const fs::path dir(opt.out_dir);
  const std::string results = opt.results_path.empty() ? (dir / "results.csv").string()
                                                       : opt.results_path;
  std::string baseline = opt.baseline_path;
  if (baseline.empty() && fs::exists(dir / "baseline.csv")) baseline = (dir / "baseline.csv").string();

  const auto learning = harness::summarize(read_csv_file(results));
  std::optional<harness::SweepReport> base;
  if (!baseline.empty()) {
    auto records = read_csv_file(baseline);
    for (auto& r : records) r.policy = modes::Policy::Random;
    base = harness::summarize(std::move(records));
  }
  const std::string text = report::full_report(learning, base);
  prepare_out(opt);
  write_file(dir / "report.txt", text);
  write_charts(dir, learning.records);
  out << text;
  return kExitOk;
}

int cmd_selftest(std::ostream& out) {
  bool all = true;
  for (const auto& c : verify::run_selftest()) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    all = all && c.passed;
  }
  return all ? kExitOk : kExitUsage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"DRE-Bot experiments: three Sarsa(lambda) learners in a deathmatch arena"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&opt](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "key = value config file");
    sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", opt.seed, "base seed (falls back to $DRE_SEED)");
    sub->add_option("--parallel", opt.parallel, "worker threads");
    sub->add_flag("--verbose", opt.verbose, "progress on stderr");
  };
  auto add_experiment = [&opt](CLI::App* sub) {
    sub->add_option("--gammas", opt.gammas, "comma separated discount values");
    sub->add_option("--lambdas", opt.lambdas, "comma separated trace values");
    sub->add_option("--runs", opt.runs, "runs per grid");
    sub->add_option("--deaths", opt.deaths, "DRE-Bot deaths that end a game");
  };

  auto* sweep = app.add_subcommand("sweep", "gamma x lambda sweep with learning enabled");
  add_common(sweep);
  add_experiment(sweep);
  auto* baseline = app.add_subcommand("baseline", "random-action games, learning disabled");
  add_common(baseline);
  add_experiment(baseline);
  baseline->add_option("--games", opt.games, "number of games");
  auto* play = app.add_subcommand("play", "one game with an event log");
  add_common(play);
  add_experiment(play);
  play->add_flag("--random", opt.random, "random legal actions, no learning");
  auto* rep = app.add_subcommand("report", "tables and charts from results CSVs");
  add_common(rep);
  rep->add_option("--results", opt.results_path, "learning results CSV (default <out>/results.csv)");
  rep->add_option("--baseline", opt.baseline_path, "baseline results CSV");
  auto* selftest = app.add_subcommand("selftest", "run the built-in invariant checks");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*sweep) return cmd_sweep(opt, out, err);
    if (*baseline) return cmd_baseline(opt, out, err);
    if (*play) return cmd_play(opt, out, err);
    if (*rep) return cmd_report(opt, out, err);
    if (*selftest) return cmd_selftest(out);
  } catch (const UsageError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace dre::cli
