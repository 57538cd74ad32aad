#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ridebench/arima.hpp"
#include "ridebench/forecast_log.hpp"
#include "ridebench/normalize.hpp"
#include "ridebench/panel.hpp"
#include "ridebench/train.hpp"
#include "ridebench/windows.hpp"

namespace ridebench {

enum class ModelKind { kArima, kSarima, kMlp, kCnn, kLstm };
enum class Strategy { kStatic, kOnline };

std::string model_name(ModelKind k);
ModelKind model_from_name(const std::string& name);
std::string strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);
std::string output_design_name(OutputDesign d);
OutputDesign output_design_from_name(const std::string& name);
bool is_neural(ModelKind k);
Family to_family(ModelKind k);

struct HyperParams {
  TrainConfig train;               // baseline neural training
  int online_window = 90;          // W most recent forecast origins
  int online_epochs = 1;           // passes per daily update
  double online_learning_rate = -1;  // < 0: reuse train.learning_rate
  int seasonal_period = 7;         // SARIMA period
};

// One cell of the strategy grid. The statistical models are univariate and
// re-estimated with new information, so they are only valid with the
// (single, online) combination.
struct ExperimentConfig {
  ModelKind model = ModelKind::kMlp;
  Strategy strategy = Strategy::kStatic;
  OutputDesign output = OutputDesign::kMulti;
  DateRange train_range;
  DateRange test_range;
  HyperParams hyper;
  std::uint64_t seed = 0;

  std::string cell_id() const;  // e.g. "lstm_online_multi"
  void validate() const;        // throws ConfigError
};

struct TimingReport {
  std::string experiment;
  int n_models = 0;                     // streams trained (stations or 1)
  double baseline_train_seconds = 0.0;  // whole cell
  double baseline_train_seconds_per_model = 0.0;
  double mean_update_seconds = 0.0;     // per origin per model
  double mean_simulate_seconds = 0.0;   // per origin per model
  int n_update_samples = 0;
  int n_simulate_samples = 0;

  std::string to_csv() const;
};

// Aggregates raw wall-time samples into the report. For single-output
// cells the training time is also reported per model: comparing whole-
// system cost against a multi-output cell means multiplying the per-model
// time by the station count.
TimingReport measure_timing(const std::string& experiment, int n_models,
                            const std::vector<double>& train_seconds,
                            const std::vector<double>& update_seconds,
                            const std::vector<double>& simulate_seconds);

// Parameter-state audit: forecasts must not mutate parameters, and static
// cells must end the walk with the parameters they started it with.
struct LeakAudit {
  bool forecast_step_pure = true;
  bool static_params_constant = true;  // vacuously true for online cells
  std::vector<std::uint64_t> initial_checksums;  // one per model stream
  std::vector<std::uint64_t> final_checksums;

  bool passed(Strategy strategy) const {
    return forecast_step_pure &&
           (strategy == Strategy::kOnline || static_params_constant);
  }
};

struct RunResult {
  ForecastLog log;
  TimingReport timing;
  LeakAudit audit;
  std::vector<std::string> warnings;
};

struct RunOptions {
  std::string checkpoint_dir;      // empty: checkpointing disabled
  int checkpoint_every = 30;       // origins between checkpoints
  int interrupt_after_origins = -1;  // test hook; < 0 disables
};

// Thrown by the interrupt test hook; carries no model state. A rerun with
// the same checkpoint directory resumes where the interrupt hit.
class RunInterrupted : public std::runtime_error {
public:
  RunInterrupted() : std::runtime_error("run interrupted (test hook)") {}
};

// Rolling-origin walk over the test range. Static cells train once and
// freeze; online cells fine-tune (or re-estimate) after logging each
// origin's forecast, so parameters used at origin t never depend on data
// at or after t. Forecasts are denormalized and clamped to >= 0.
RunResult run_experiment(const RidershipPanel& panel,
                         const ExperimentConfig& config,
                         const RunOptions& options = {});

struct GridCellResult {
  ExperimentConfig config;
  bool ok = false;
  std::string error;
  RunResult result;  // valid when ok
};

// Independent cells, optionally in parallel. A failing cell is isolated
// and reported; the rest of the grid still runs.
std::vector<GridCellResult> run_grid(const RidershipPanel& panel,
                                     const std::vector<ExperimentConfig>& grid,
                                     const RunOptions& options = {},
                                     int jobs = 1);

// The full 14-cell strategy grid: the three neural families in all four
// strategy/output combinations plus the two statistical single/online cells.
std::vector<ExperimentConfig> default_grid(const DateRange& train_range,
                                           const DateRange& test_range,
                                           const HyperParams& hyper,
                                           std::uint64_t seed);

}  // namespace ridebench
