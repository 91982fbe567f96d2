#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dre/harness.hpp"

namespace dre::report {

enum class Metric { TotalReward, KillDeathDifference };

// Gamma x lambda grid, one row per (gamma, run), one column per lambda.
// Missing or failed cells print as "--".
std::string grid_table(const std::vector<harness::RunRecord>& records, Metric metric);

// Per-run means of average reward, total reward and K-D difference.
std::string averages_block(const harness::SweepReport& report);

// One row per random-action game plus the mean row.
std::string baseline_table(const harness::SweepReport& baseline);

std::string comparison_block(const harness::ComparisonSummary& summary);

struct ParameterCorrelation {
  double reward_vs_gamma = 0.0;
  double reward_vs_lambda = 0.0;
  std::size_t games = 0;
};

ParameterCorrelation parameter_correlation(const std::vector<harness::RunRecord>& records);
std::string correlation_block(const ParameterCorrelation& c);

// Full plain-text report. The comparison block appears when a baseline is
// supplied.
std::string full_report(const harness::SweepReport& learning,
                        const std::optional<harness::SweepReport>& baseline);

// SVG heatmap of the grid for one metric, one panel per run.
std::string heatmap_svg(const std::vector<harness::RunRecord>& records, Metric metric);

}  // namespace dre::report
