#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ridebench/analysis.hpp"
#include "ridebench/runner.hpp"
#include "ridebench/synthetic.hpp"

namespace ridebench::cli {

// The single declarative run configuration. One file drives the whole
// pipeline; command-line flags override individual fields.
struct RunConfig {
  std::uint64_t seed = 42;
  std::string output_root = "out";

  // data
  std::string source = "synthetic";  // "synthetic" | "csv"
  std::string csv_path;
  std::vector<std::string> holiday_dates;
  std::string holidays_file;
  bool treat_sundays_as_holiday = true;
  SyntheticScenario synthetic;
  DateRange train_range;
  DateRange test_range;

  // conditions
  ConditionSpec conditions;

  // grid
  bool grid_all = true;
  struct Cell {
    std::string model, strategy, output;
  };
  std::vector<Cell> grid_cells;

  // hyperparameters
  HyperParams hyper;

  int jobs = 0;  // 0: hardware concurrency
  int checkpoint_every = 30;

  CalendarSpec calendar() const;
  std::vector<ExperimentConfig> resolve_grid() const;  // validated
};

RunConfig load_config(const std::string& path);  // throws ConfigError

// Paths under the output root.
struct OutputLayout {
  std::string root;
  std::string panel_csv() const { return root + "/panel.csv"; }
  std::string manifest() const { return root + "/manifest.json"; }
  std::string log_csv(const std::string& cell) const {
    return root + "/logs/" + cell + ".csv";
  }
  std::string timing_csv(const std::string& cell) const {
    return root + "/timings/" + cell + ".csv";
  }
  std::string checkpoints() const { return root + "/checkpoints"; }
  std::string maape_csv(const std::string& cell) const {
    return root + "/metrics/" + cell + "_maape.csv";
  }
  std::string regression_csv(const std::string& cell) const {
    return root + "/analysis/" + cell + "_regression.csv";
  }
  std::string regression_table() const {
    return root + "/analysis/regression_table.txt";
  }
  std::string comparisons_csv() const {
    return root + "/analysis/comparisons.csv";
  }
  std::string report_dir() const { return root + "/report"; }
};

// Manifest bookkeeping: artifact checksums plus enough config echo to
// reconstruct the run. Timestamps live here and only here; every other
// artifact is deterministic for a fixed seed.
void manifest_record(const OutputLayout& out, const std::string& command,
                     const std::vector<std::string>& artifacts,
                     const std::string& config_echo);

int cmd_synth(const RunConfig& cfg);
int cmd_ingest(const RunConfig& cfg);
int cmd_run(const RunConfig& cfg, const std::vector<std::string>& only_cells);
int cmd_analyze(const RunConfig& cfg);
int cmd_report(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg);

// Maps exceptions onto the documented exit codes (2 config, 3 data,
// 4 model).
int dispatch(int argc, char** argv);

}  // namespace ridebench::cli
