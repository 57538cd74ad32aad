#pragma once

#include <map>
#include <string>
#include <vector>

#include "ridebench/analysis.hpp"
#include "ridebench/metrics.hpp"
#include "ridebench/runner.hpp"

namespace ridebench {

// Every chart ships with a CSV sidecar holding the exact plotted numbers.
struct ReportArtifact {
  std::string svg;
  std::string csv;
};

// Rolling-MAAPE lines, one per experiment, with the condition ranges shaded.
ReportArtifact render_evolution(const std::vector<MaapeSeries>& series,
                                const ConditionSpec& conditions);

// Per-experiment bars of one regression coefficient with 95% whiskers
// (+-1.96 SE). `coefficient` is "Intercept" for stable conditions.
ReportArtifact render_condition_bars(
    const std::vector<ConditionRegression>& fits,
    const std::string& coefficient, const std::string& title);

// Baseline training and per-step simulation times per experiment.
ReportArtifact render_timing(const std::vector<TimingReport>& timings);

// Best cell per condition by point estimate; cells whose 95% CIs overlap
// the winner's are listed as statistically indistinguishable.
struct SummaryRow {
  std::string condition;
  std::string experiment;
  double estimate = 0.0;
  double ci_halfwidth = 0.0;
  double train_seconds = 0.0;
  std::vector<std::string> indistinguishable;
};

struct SummaryTable {
  std::vector<SummaryRow> rows;
  std::string to_text() const;
  std::string to_csv() const;
};

SummaryTable render_summary(const std::vector<ConditionRegression>& fits,
                            const std::vector<TimingReport>& timings);

// Small multiples of the zero-truth closure cells: predicted demand per
// closed station-day.
ReportArtifact render_closed_stations(const ClosedStationReport& report);

}  // namespace ridebench
