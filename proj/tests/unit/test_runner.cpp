#include <doctest.h>

#include <filesystem>

#include "ridebench/errors.hpp"
#include "ridebench/metrics.hpp"
#include "ridebench/runner.hpp"
#include "ridebench/synthetic.hpp"

using namespace ridebench;

namespace {

RidershipPanel small_panel(int stations = 3, int days = 180,
                           double noise = 0.05, std::uint64_t seed = 11) {
  SyntheticScenario sc;
  sc.n_stations = stations;
  sc.n_days = days;
  sc.start_date = Date::from_iso("2019-01-07");
  sc.base_levels = {400.0};
  sc.weekly_profile = {1.0, 1.05, 1.1, 1.05, 1.0, 0.6, 0.4};
  sc.noise_sigma = noise;
  return generate_synthetic(sc, seed, CalendarSpec{});
}

ExperimentConfig small_config(const RidershipPanel& panel, ModelKind model,
                              Strategy strategy, OutputDesign output) {
  ExperimentConfig cfg;
  cfg.model = model;
  cfg.strategy = strategy;
  cfg.output = output;
  cfg.train_range = {panel.start_date(), panel.start_date() + 119};
  cfg.test_range = {panel.start_date() + 120, panel.end_date()};
  cfg.hyper.train.epochs = 4;
  cfg.hyper.train.batch_size = 16;
  cfg.hyper.online_window = 30;
  cfg.seed = 77;
  return cfg;
}

std::string fresh_dir(const std::string& stem) {
  static int counter = 0;
  auto dir = std::filesystem::temp_directory_path() /
             (stem + "_" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace

TEST_CASE("statistical models only allow the single/online cell") {
  auto panel = small_panel();
  CHECK_THROWS_AS(
      small_config(panel, ModelKind::kArima, Strategy::kOnline,
                   OutputDesign::kMulti).validate(),
      ConfigError);
  CHECK_THROWS_AS(
      small_config(panel, ModelKind::kSarima, Strategy::kStatic,
                   OutputDesign::kSingle).validate(),
      ConfigError);
  CHECK_NOTHROW(small_config(panel, ModelKind::kArima, Strategy::kOnline,
                             OutputDesign::kSingle).validate());
}

TEST_CASE("default grid enumerates the 14 cells") {
  auto panel = small_panel();
  auto cfg = small_config(panel, ModelKind::kMlp, Strategy::kStatic,
                          OutputDesign::kMulti);
  auto grid = default_grid(cfg.train_range, cfg.test_range, cfg.hyper, 1);
  CHECK(grid.size() == 14);
  int arima_cells = 0;
  for (const auto& cell : grid) {
    CHECK_NOTHROW(cell.validate());
    if (!is_neural(cell.model)) ++arima_cells;
  }
  CHECK(arima_cells == 2);
}

TEST_CASE("static run: complete, pure, and with frozen parameters") {
  auto panel = small_panel();
  auto cfg = small_config(panel, ModelKind::kMlp, Strategy::kStatic,
                          OutputDesign::kMulti);
  auto res = run_experiment(panel, cfg);

  const auto origins = enumerate_origins(panel, cfg.test_range);
  CHECK(res.log.records.size() == origins.size() * panel.n_stations() * 7);
  CHECK(res.audit.forecast_step_pure);
  CHECK(res.audit.static_params_constant);
  CHECK(res.audit.passed(cfg.strategy));
  CHECK(res.timing.baseline_train_seconds > 0);
  CHECK(res.timing.n_simulate_samples == static_cast<int>(origins.size()));
  CHECK(res.timing.n_update_samples == 0);
  for (const auto& r : res.log.records) CHECK(r.pred >= 0.0);
}

TEST_CASE("online neural run changes parameters but keeps forecasts pure") {
  auto panel = small_panel();
  auto cfg = small_config(panel, ModelKind::kMlp, Strategy::kOnline,
                          OutputDesign::kMulti);
  auto res = run_experiment(panel, cfg);
  CHECK(res.audit.forecast_step_pure);
  CHECK_FALSE(res.audit.static_params_constant);  // updates happened
  CHECK(res.audit.passed(cfg.strategy));
  CHECK(res.timing.n_update_samples > 0);
}

TEST_CASE("online run on near-constant data stays within the noise band") {
  auto panel = small_panel(2, 180, 0.02, 5);
  auto cfg = small_config(panel, ModelKind::kMlp, Strategy::kOnline,
                          OutputDesign::kMulti);
  cfg.hyper.train.epochs = 30;
  auto res = run_experiment(panel, cfg);
  auto series = maape_series(res.log);
  double mean = 0;
  for (double v : series.daily) mean += v;
  mean /= series.daily.size();
  CHECK(mean < 0.15);  // forecasts track the stable weekly pattern
}

TEST_CASE("arima online single run completes and logs every record") {
  auto panel = small_panel(2, 170, 0.05, 9);
  auto cfg = small_config(panel, ModelKind::kArima, Strategy::kOnline,
                          OutputDesign::kSingle);
  auto res = run_experiment(panel, cfg);
  const auto origins = enumerate_origins(panel, cfg.test_range);
  CHECK(res.log.records.size() == origins.size() * 2 * 7);
  CHECK(res.audit.forecast_step_pure);
  CHECK(res.timing.n_update_samples == static_cast<int>(origins.size()) * 2);
}

TEST_CASE("identical config and seed give byte-identical logs") {
  auto panel = small_panel();
  for (auto model : {ModelKind::kMlp, ModelKind::kLstm}) {
    auto cfg = small_config(panel, model, Strategy::kOnline,
                            OutputDesign::kMulti);
    cfg.hyper.train.epochs = 2;
    auto a = run_experiment(panel, cfg);
    auto b = run_experiment(panel, cfg);
    CHECK(a.log.to_csv() == b.log.to_csv());
  }
}

TEST_CASE("single-output neural cells run one model per station") {
  auto panel = small_panel(3, 170);
  auto cfg = small_config(panel, ModelKind::kMlp, Strategy::kStatic,
                          OutputDesign::kSingle);
  auto res = run_experiment(panel, cfg);
  CHECK(res.timing.n_models == 3);
  CHECK(res.audit.initial_checksums.size() == 3);
  const auto origins = enumerate_origins(panel, cfg.test_range);
  CHECK(res.log.records.size() == origins.size() * 3 * 7);
}

TEST_CASE("grid isolates per-cell failures") {
  auto panel = small_panel();
  auto ok_cfg = small_config(panel, ModelKind::kMlp, Strategy::kStatic,
                             OutputDesign::kMulti);
  auto bad_cfg = ok_cfg;
  bad_cfg.test_range.last = panel.end_date() + 100;  // outside the panel
  auto results = run_grid(panel, {ok_cfg, bad_cfg});
  REQUIRE(results.size() == 2);
  CHECK(results[0].ok);
  CHECK_FALSE(results[1].ok);
  CHECK(results[1].error.find("panel") != std::string::npos);
}

TEST_CASE("interrupted run resumes to the identical final log") {
  auto panel = small_panel(2, 170);
  for (auto model : {ModelKind::kLstm, ModelKind::kArima}) {
    auto cfg = small_config(panel, model,
                            Strategy::kOnline,
                            model == ModelKind::kArima ? OutputDesign::kSingle
                                                       : OutputDesign::kMulti);
    cfg.hyper.train.epochs = 2;

    auto baseline = run_experiment(panel, cfg);  // no checkpointing

    RunOptions opt;
    opt.checkpoint_dir = fresh_dir("rb_ckpt");
    opt.checkpoint_every = 7;
    opt.interrupt_after_origins = 11;
    CHECK_THROWS_AS(run_experiment(panel, cfg, opt), RunInterrupted);

    RunOptions resume = opt;
    resume.interrupt_after_origins = -1;
    auto resumed = run_experiment(panel, cfg, resume);
    CHECK(resumed.log.to_csv() == baseline.log.to_csv());
  }
}

TEST_CASE("timing aggregation arithmetic") {
  auto rep = measure_timing("x", 2, {1.0, 3.0}, {0.5, 1.5}, {0.1, 0.3});
  CHECK(rep.baseline_train_seconds == 4.0);
  CHECK(rep.baseline_train_seconds_per_model == 2.0);
  CHECK(rep.mean_update_seconds == 1.0);
  CHECK(rep.mean_simulate_seconds == doctest::Approx(0.2));
  CHECK(rep.n_update_samples == 2);
}

TEST_CASE("experiment cell ids are stable") {
  auto panel = small_panel();
  auto cfg = small_config(panel, ModelKind::kLstm, Strategy::kOnline,
                          OutputDesign::kMulti);
  CHECK(cfg.cell_id() == "lstm_online_multi");
  CHECK(model_from_name("sarima") == ModelKind::kSarima);
  CHECK(strategy_from_name("static") == Strategy::kStatic);
  CHECK(output_design_from_name("single") == OutputDesign::kSingle);
}
