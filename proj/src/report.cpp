#include "dre/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "dre/config.hpp"

namespace dre::report {

namespace {

template <typename... Args>
std::string format(const char* fmt, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

std::string cell_value(const harness::RunRecord& r, Metric metric) {
  if (metric == Metric::TotalReward) return format("%.2f", r.total_reward());
  return std::to_string(r.kd_difference());
}

const char* metric_title(Metric metric) {
  return metric == Metric::TotalReward ? "Total Reward Received" : "Final Kill-Death Difference";
}

struct Grid {
  std::vector<double> gammas;
  std::vector<double> lambdas;
  std::vector<int> runs;
  std::map<std::tuple<int, double, double>, const harness::RunRecord*> cells;
};

Grid build_grid(const std::vector<harness::RunRecord>& records) {
  std::set<double> gammas, lambdas;
  std::set<int> runs;
  Grid g;
  for (const auto& r : records) {
    gammas.insert(r.gamma);
    lambdas.insert(r.lambda);
    runs.insert(r.run);
    if (r.ok()) g.cells[{r.run, r.gamma, r.lambda}] = &r;
  }
  g.gammas.assign(gammas.begin(), gammas.end());
  g.lambdas.assign(lambdas.begin(), lambdas.end());
  g.runs.assign(runs.begin(), runs.end());
  return g;
}

std::string label(double v) {
  // Grid labels print with one decimal like 0.0 / 0.3 unless more are needed.
  std::string s = format("%.1f", v);
  if (config::parse_double(s, "label") != v) s = config::format_double(v);
  return s;
}

std::string format_correlation(double v) {
  return std::isnan(v) ? std::string("undefined") : format("%+.3f", v);
}

}  // namespace

std::string grid_table(const std::vector<harness::RunRecord>& records, Metric metric) {
  const Grid g = build_grid(records);
  std::ostringstream out;
  out << metric_title(metric) << '\n';
  std::string header = format("%-4s| %-11s", "Run", "");
  for (double l : g.lambdas) header += format("| %11s ", ("lambda: " + label(l)).c_str());
  out << header << '\n' << std::string(header.size(), '-') << '\n';
  for (double gamma : g.gammas) {
    for (int run : g.runs) {
      out << format("%-4d| %-11s", run, ("gamma: " + label(gamma)).c_str());
      for (double l : g.lambdas) {
        auto it = g.cells.find({run, gamma, l});
        const std::string v = it == g.cells.end() ? "--" : cell_value(*it->second, metric);
        out << format("| %11s ", v.c_str());
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string averages_block(const harness::SweepReport& report) {
  std::ostringstream out;
  out << "Run Averages\n";
  const std::string header = format("%-6s| %14s | %12s | %14s | %5s", "Run", "Average Reward",
                                    "Total Reward", "K-D Difference", "Games");
  out << header << '\n' << std::string(header.size(), '-') << '\n';
  for (const auto& s : report.per_run) {
    out << format("Run %-2d| %14.2f | %12.2f | %14.2f | %5zu", s.run, s.mean_avg_reward,
                  s.mean_total_reward, s.mean_kd, s.games - s.failed);
    if (s.failed > 0) out << format("  (%zu incomplete)", s.failed);
    out << '\n';
  }
  return out.str();
}

std::string baseline_table(const harness::SweepReport& baseline) {
  std::ostringstream out;
  out << "Random Action Games\n";
  const std::string header = format("%-8s| %14s | %12s | %14s", "", "Average Reward",
                                    "Total Reward", "K-D Difference");
  out << header << '\n' << std::string(header.size(), '-') << '\n';
  for (const auto& r : baseline.records) {
    if (!r.ok()) {
      out << format("Game %-3d| %14s | %12s | %14s", r.run, "--", "--", "--") << '\n';
      continue;
    }
    out << format("Game %-3d| %14.2f | %12.2f | %14d", r.run, r.avg_reward(), r.total_reward(),
                  r.kd_difference())
        << '\n';
  }
  const auto& o = baseline.overall;
  out << format("%-8s| %14.2f | %12.2f | %14.2f", "Mean", o.mean_avg_reward, o.mean_total_reward,
                o.mean_kd)
      << '\n';
  return out.str();
}

std::string comparison_block(const harness::ComparisonSummary& c) {
  std::ostringstream out;
  out << "Learning vs Random Baseline\n";
  const std::string header = format("%-15s| %22s | %22s | %10s", "Metric", "Learning mean (sd)",
                                    "Baseline mean (sd)", "Difference");
  out << header << '\n' << std::string(header.size(), '-') << '\n';
  auto row = [&](const char* name, const harness::Stat& l, const harness::Stat& b, double d) {
    out << format("%-15s| %12.2f (%7.2f) | %12.2f (%7.2f) | %+10.2f", name, l.mean, l.stddev,
                  b.mean, b.stddev, d)
        << '\n';
  };
  row("Total Reward", c.learning_total, c.baseline_total, c.total_difference);
  row("K-D Difference", c.learning_kd, c.baseline_kd, c.kd_difference);
  out << "Games: learning " << c.learning_total.n << ", baseline " << c.baseline_total.n << '\n';
  out << "Verdict: " << harness::verdict_name(c.verdict) << '\n';
  return out.str();
}

ParameterCorrelation parameter_correlation(const std::vector<harness::RunRecord>& records) {
  std::vector<double> reward, gamma, lambda;
  for (const auto& r : records) {
    if (!r.ok()) continue;
    reward.push_back(r.total_reward());
    gamma.push_back(r.gamma);
    lambda.push_back(r.lambda);
  }
  ParameterCorrelation c;
  c.games = reward.size();
  c.reward_vs_gamma = harness::spearman(gamma, reward);
  c.reward_vs_lambda = harness::spearman(lambda, reward);
  return c;
}

std::string correlation_block(const ParameterCorrelation& c) {
  std::ostringstream out;
  out << "Parameter Sensitivity (Spearman rank correlation, " << c.games << " games)\n";
  out << "total reward vs gamma:  " << format_correlation(c.reward_vs_gamma) << '\n';
  out << "total reward vs lambda: " << format_correlation(c.reward_vs_lambda) << '\n';
  return out.str();
}

std::string full_report(const harness::SweepReport& learning,
                        const std::optional<harness::SweepReport>& baseline) {
  std::ostringstream out;
  out << grid_table(learning.records, Metric::TotalReward) << '\n';
  out << grid_table(learning.records, Metric::KillDeathDifference) << '\n';
  out << averages_block(learning) << '\n';
  out << correlation_block(parameter_correlation(learning.records));
  if (baseline) {
    out << '\n' << baseline_table(*baseline) << '\n';
    out << comparison_block(harness::compare(learning, *baseline));
  }
  if (!learning.complete()) {
    out << "\nINCOMPLETE: " << learning.overall.failed << " game(s) failed\n";
  }
  return out.str();
}

std::string heatmap_svg(const std::vector<harness::RunRecord>& records, Metric metric) {
  const Grid g = build_grid(records);
  constexpr int kCell = 70, kMarginLeft = 90, kMarginTop = 60, kPanelGap = 40;
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (const auto& [key, r] : g.cells) {
    const double v = metric == Metric::TotalReward ? r->total_reward() : r->kd_difference();
    lo = any ? std::min(lo, v) : v;
    hi = any ? std::max(hi, v) : v;
    any = true;
  }
  const int cols = static_cast<int>(g.lambdas.size());
  const int rows = static_cast<int>(g.gammas.size());
  const int panel_w = cols * kCell;
  const int width = kMarginLeft + static_cast<int>(g.runs.size()) * (panel_w + kPanelGap);
  const int height = kMarginTop + rows * kCell + 40;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<text x=\"10\" y=\"20\" font-size=\"16\">" << metric_title(metric) << "</text>\n";
  for (std::size_t p = 0; p < g.runs.size(); ++p) {
    const int x0 = kMarginLeft + static_cast<int>(p) * (panel_w + kPanelGap);
    out << "<text x=\"" << x0 << "\" y=\"40\">Run " << g.runs[p] << "</text>\n";
    for (int c = 0; c < cols; ++c) {
      out << "<text x=\"" << x0 + c * kCell + 8 << "\" y=\"" << kMarginTop + rows * kCell + 20
          << "\">&#955;=" << label(g.lambdas[c]) << "</text>\n";
    }
    for (int rr = 0; rr < rows; ++rr) {
      if (p == 0) {
        out << "<text x=\"10\" y=\"" << kMarginTop + rr * kCell + kCell / 2 + 4 << "\">&#947;="
            << label(g.gammas[rr]) << "</text>\n";
      }
      for (int c = 0; c < cols; ++c) {
        const int x = x0 + c * kCell;
        const int y = kMarginTop + rr * kCell;
        auto it = g.cells.find({g.runs[p], g.gammas[rr], g.lambdas[c]});
        std::string fill = "#dddddd";
        std::string text = "--";
        if (it != g.cells.end()) {
          const double v = metric == Metric::TotalReward ? it->second->total_reward()
                                                         : it->second->kd_difference();
          const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
          // White to dark blue.
          const int r = static_cast<int>(std::lround(255 - t * 215));
          const int gr = static_cast<int>(std::lround(255 - t * 175));
          fill = format("#%02x%02x%02x", r, gr, 255 - static_cast<int>(std::lround(t * 80)));
          text = cell_value(*it->second, metric);
        }
        out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell << "\" height=\""
            << kCell << "\" fill=\"" << fill << "\" stroke=\"#ffffff\"/>\n";
        out << "<text x=\"" << x + kCell / 2 << "\" y=\"" << y + kCell / 2 + 4
            << "\" text-anchor=\"middle\">" << text << "</text>\n";
      }
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace dre::report
