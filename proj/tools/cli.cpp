#include "tools/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <set>
#include <thread>

#include "ridebench/checksum.hpp"
#include "ridebench/csv.hpp"
#include "ridebench/errors.hpp"
#include "ridebench/metrics.hpp"
#include "ridebench/panel.hpp"
#include "ridebench/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ridebench::cli {

namespace {

DateRange parse_range(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2) {
    throw ConfigError(what + " must be [first, last] ISO dates");
  }
  DateRange r{Date::from_iso(j[0].get<std::string>()),
              Date::from_iso(j[1].get<std::string>())};
  if (r.empty()) throw ConfigError(what + " is empty (last before first)");
  return r;
}

json range_to_json(const DateRange& r) {
  return json::array({r.first.to_iso(), r.last.to_iso()});
}

}  // namespace

CalendarSpec RunConfig::calendar() const {
  CalendarSpec cal;
  cal.treat_sundays_as_holiday = treat_sundays_as_holiday;
  if (!holidays_file.empty()) {
    cal = CalendarSpec::from_file(holidays_file, treat_sundays_as_holiday);
  }
  for (const auto& iso : holiday_dates) {
    cal.holiday_dates.insert(Date::from_iso(iso));
  }
  return cal;
}

std::vector<ExperimentConfig> RunConfig::resolve_grid() const {
  std::vector<ExperimentConfig> cells;
  if (grid_all) {
    cells = default_grid(train_range, test_range, hyper, seed);
  } else {
    for (const auto& c : grid_cells) {
      ExperimentConfig cfg;
      cfg.model = model_from_name(c.model);
      cfg.strategy = strategy_from_name(c.strategy);
      cfg.output = output_design_from_name(c.output);
      cfg.train_range = train_range;
      cfg.test_range = test_range;
      cfg.hyper = hyper;
      cfg.seed = seed;
      cells.push_back(cfg);
    }
  }
  for (const auto& c : cells) c.validate();
  return cells;
}

RunConfig load_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }

  try {
    RunConfig cfg;
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("output")) {
      cfg.output_root = j["output"].value("root", cfg.output_root);
    }

    if (!j.contains("data")) throw ConfigError("missing 'data' section");
    const json& data = j["data"];
    cfg.source = data.value("source", cfg.source);
    if (cfg.source != "synthetic" && cfg.source != "csv") {
      throw ConfigError("data.source must be 'synthetic' or 'csv'");
    }
    cfg.csv_path = data.value("csv_path", std::string{});
    if (cfg.source == "csv" && cfg.csv_path.empty()) {
      throw ConfigError("data.csv_path required when data.source is 'csv'");
    }
    if (data.contains("calendar")) {
      const json& cal = data["calendar"];
      cfg.treat_sundays_as_holiday =
          cal.value("treat_sundays_as_holiday", true);
      cfg.holidays_file = cal.value("holidays_file", std::string{});
      for (const auto& d : cal.value("holiday_dates", json::array())) {
        cfg.holiday_dates.push_back(d.get<std::string>());
      }
    }
    cfg.train_range = parse_range(data.at("train_range"), "data.train_range");
    cfg.test_range = parse_range(data.at("test_range"), "data.test_range");

    if (data.contains("synthetic")) {
      const json& syn = data["synthetic"];
      SyntheticScenario& sc = cfg.synthetic;
      sc.n_stations = syn.value("n_stations", sc.n_stations);
      sc.n_days = syn.value("n_days", sc.n_days);
      if (syn.contains("start_date")) {
        sc.start_date = Date::from_iso(syn["start_date"].get<std::string>());
      }
      if (syn.contains("base_levels")) {
        sc.base_levels.clear();
        if (syn["base_levels"].is_number()) {
          sc.base_levels.push_back(syn["base_levels"].get<double>());
        } else {
          for (const auto& b : syn["base_levels"]) {
            sc.base_levels.push_back(b.get<double>());
          }
        }
      }
      if (syn.contains("weekly_profile")) {
        sc.weekly_profile.clear();
        for (const auto& w : syn["weekly_profile"]) {
          sc.weekly_profile.push_back(w.get<double>());
        }
      }
      sc.yearly_amplitude = syn.value("yearly_amplitude", sc.yearly_amplitude);
      sc.noise_sigma = syn.value("noise_sigma", sc.noise_sigma);
      for (const auto& shk : syn.value("shocks", json::array())) {
        SyntheticShock shock;
        shock.start_day = shk.at("start_day").get<int>();
        shock.duration_days = shk.value("duration_days", -1);
        shock.level_multiplier = shk.value("level_multiplier", 1.0);
        for (const auto& c : shk.value("closed_stations", json::array())) {
          shock.closed_stations.push_back(c.get<int>());
        }
        sc.shocks.push_back(shock);
      }
    } else if (cfg.source == "synthetic") {
      throw ConfigError("data.synthetic required when data.source is 'synthetic'");
    }

    if (j.contains("conditions")) {
      const json& cond = j["conditions"];
      if (cond.contains("covid")) {
        cfg.conditions.covid = parse_range(cond["covid"], "conditions.covid");
      }
      if (cond.contains("protest")) {
        cfg.conditions.protest =
            parse_range(cond["protest"], "conditions.protest");
      }
    }

    if (j.contains("grid")) {
      const json& grid = j["grid"];
      if (grid.contains("cells") && grid["cells"].is_array()) {
        cfg.grid_all = false;
        for (const auto& c : grid["cells"]) {
          cfg.grid_cells.push_back({c.at("model").get<std::string>(),
                                    c.at("strategy").get<std::string>(),
                                    c.at("output").get<std::string>()});
        }
      } else if (grid.contains("cells") && grid["cells"] == "all") {
        cfg.grid_all = true;
      }
    }

    if (j.contains("hyperparameters")) {
      const json& hp = j["hyperparameters"];
      if (hp.contains("neural")) {
        const json& nn = hp["neural"];
        TrainConfig& t = cfg.hyper.train;
        t.epochs = nn.value("epochs", t.epochs);
        t.batch_size = nn.value("batch_size", t.batch_size);
        t.learning_rate = nn.value("learning_rate", t.learning_rate);
        const std::string opt = nn.value("optimizer", std::string{"adam"});
        if (opt == "adam") {
          t.optimizer = OptimizerKind::kAdam;
        } else if (opt == "sgd_momentum") {
          t.optimizer = OptimizerKind::kSgdMomentum;
        } else {
          throw ConfigError("optimizer must be 'adam' or 'sgd_momentum'");
        }
      }
      if (hp.contains("online")) {
        const json& on = hp["online"];
        cfg.hyper.online_window = on.value("window", cfg.hyper.online_window);
        cfg.hyper.online_epochs = on.value("epochs", cfg.hyper.online_epochs);
        cfg.hyper.online_learning_rate =
            on.value("learning_rate", cfg.hyper.online_learning_rate);
      }
      if (hp.contains("arima")) {
        cfg.hyper.seasonal_period =
            hp["arima"].value("seasonal_period", cfg.hyper.seasonal_period);
      }
    }

    cfg.jobs = j.value("jobs", 0);
    cfg.checkpoint_every = j.value("checkpoint_every", 30);
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

namespace {

json config_echo_json(const RunConfig& cfg) {
  json grid = json::array();
  for (const auto& cell : cfg.resolve_grid()) grid.push_back(cell.cell_id());
  json shocks = json::array();
  for (const auto& s : cfg.synthetic.shocks) {
    shocks.push_back({{"start_day", s.start_day},
                      {"duration_days", s.duration_days},
                      {"level_multiplier", s.level_multiplier},
                      {"closed_stations", s.closed_stations}});
  }
  return json{
      {"seed", cfg.seed},
      {"source", cfg.source},
      {"train_range", range_to_json(cfg.train_range)},
      {"test_range", range_to_json(cfg.test_range)},
      {"grid", grid},
      {"synthetic_shocks", shocks},
      {"neural",
       {{"epochs", cfg.hyper.train.epochs},
        {"batch_size", cfg.hyper.train.batch_size},
        {"learning_rate", cfg.hyper.train.learning_rate}}},
      {"online",
       {{"window", cfg.hyper.online_window},
        {"epochs", cfg.hyper.online_epochs},
        {"learning_rate", cfg.hyper.online_learning_rate}}},
  };
}

std::string now_iso8601() {
  const auto t = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

RidershipPanel load_panel(const RunConfig& cfg) {
  if (cfg.source == "csv") {
    IngestReport rep;
    auto panel = ingest_csv(cfg.csv_path, cfg.calendar(), &rep);
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
    return panel;
  }
  return generate_synthetic(cfg.synthetic, cfg.seed, cfg.calendar());
}

std::vector<std::string> cells_with_logs(const RunConfig& cfg,
                                         const OutputLayout& out) {
  std::vector<std::string> cells;
  for (const auto& cell : cfg.resolve_grid()) {
    if (fs::exists(out.log_csv(cell.cell_id()))) {
      cells.push_back(cell.cell_id());
    }
  }
  return cells;
}

}  // namespace

void manifest_record(const OutputLayout& out, const std::string& command,
                     const std::vector<std::string>& artifacts,
                     const std::string& config_echo) {
  json m;
  if (fs::exists(out.manifest())) {
    try {
      m = json::parse(read_text_file(out.manifest()));
    } catch (...) {
      m = json::object();
    }
  }
  if (!m.contains("created_at")) m["created_at"] = now_iso8601();
  m["updated_at"] = now_iso8601();
  if (!config_echo.empty()) m["config"] = json::parse(config_echo);
  if (!m.contains("artifacts")) m["artifacts"] = json::object();
  for (const auto& path : artifacts) {
    m["artifacts"][path] = checksum_hex(fnv1a64_file(path));
  }
  if (!m.contains("commands")) m["commands"] = json::array();
  m["commands"].push_back({{"command", command}, {"at", now_iso8601()}});
  fs::create_directories(out.root);
  write_text_file(out.manifest(), m.dump(2) + "\n");
}

int cmd_synth(const RunConfig& cfg) {
  if (cfg.source != "synthetic") {
    throw ConfigError("synth requires data.source = 'synthetic'");
  }
  OutputLayout out{cfg.output_root};
  fs::create_directories(out.root);
  auto panel = load_panel(cfg);
  export_csv(panel, out.panel_csv());
  manifest_record(out, "synth", {out.panel_csv()},
                  config_echo_json(cfg).dump());
  std::cout << "wrote " << out.panel_csv() << ": " << panel.n_stations()
            << " stations x " << panel.n_days() << " days\n";
  return 0;
}

int cmd_ingest(const RunConfig& cfg) {
  if (cfg.source != "csv") {
    throw ConfigError("ingest requires data.source = 'csv'");
  }
  OutputLayout out{cfg.output_root};
  fs::create_directories(out.root);
  IngestReport rep;
  auto panel = ingest_csv(cfg.csv_path, cfg.calendar(), &rep);
  export_csv(panel, out.panel_csv());
  manifest_record(out, "ingest", {out.panel_csv()},
                  config_echo_json(cfg).dump());
  std::cout << "ingested " << rep.rows_read << " rows; " << rep.cells_imputed
            << " cell(s) imputed; " << rep.gap_days << " gap day(s); "
            << rep.duplicate_rows << " duplicate(s)\n";
  std::cout << "canonical panel written to " << out.panel_csv() << "\n";
  return 0;
}

int cmd_run(const RunConfig& cfg, const std::vector<std::string>& only_cells) {
  auto grid = cfg.resolve_grid();
  if (!only_cells.empty()) {
    std::set<std::string> keep(only_cells.begin(), only_cells.end());
    std::vector<ExperimentConfig> filtered;
    for (const auto& cell : grid) {
      if (keep.count(cell.cell_id())) filtered.push_back(cell);
    }
    if (filtered.empty()) {
      throw ConfigError("no grid cells match the requested selection");
    }
    grid = std::move(filtered);
  }

  OutputLayout out{cfg.output_root};
  fs::create_directories(out.root + "/logs");
  fs::create_directories(out.root + "/timings");

  auto panel = load_panel(cfg);
  RunOptions options;
  options.checkpoint_dir = out.checkpoints();
  options.checkpoint_every = cfg.checkpoint_every;
  const int jobs = cfg.jobs > 0
                       ? cfg.jobs
                       : static_cast<int>(std::thread::hardware_concurrency());

  auto results = run_grid(panel, grid, options, std::max(1, jobs));

  std::vector<std::string> artifacts;
  int failures = 0;
  for (const auto& cell : results) {
    const std::string id = cell.config.cell_id();
    if (!cell.ok) {
      ++failures;
      std::cerr << id << " FAILED: " << cell.error << "\n";
      continue;
    }
    write_text_file(out.log_csv(id), cell.result.log.to_csv());
    write_text_file(out.timing_csv(id), cell.result.timing.to_csv());
    artifacts.push_back(out.log_csv(id));
    for (const auto& w : cell.result.warnings) {
      std::cerr << id << " warning: " << w << "\n";
    }
    std::cout << id << ": " << cell.result.log.records.size() << " records, "
              << "train " << cell.result.timing.baseline_train_seconds
              << "s, audit "
              << (cell.result.audit.passed(cell.config.strategy) ? "ok"
                                                                 : "FAILED")
              << "\n";
  }
  manifest_record(out, "run", artifacts, config_echo_json(cfg).dump());
  return failures == 0 ? 0 : 4;
}

int cmd_analyze(const RunConfig& cfg) {
  OutputLayout out{cfg.output_root};
  const auto cells = cells_with_logs(cfg, out);
  if (cells.empty()) {
    throw DataError("no forecast logs under " + out.root +
                    "/logs; run the grid first");
  }
  if (!cfg.conditions.covid && !cfg.conditions.protest) {
    throw ConfigError("analyze needs a conditions section (covid/protest)");
  }
  fs::create_directories(out.root + "/metrics");
  fs::create_directories(out.root + "/analysis");

  const CalendarSpec cal = cfg.calendar();
  std::vector<std::string> artifacts;
  std::vector<ConditionRegression> fits;
  for (const auto& id : cells) {
    auto log = ForecastLog::from_csv(out.log_csv(id));
    auto series = maape_series(log);
    write_text_file(out.maape_csv(id), series.to_csv());
    artifacts.push_back(out.maape_csv(id));

    auto labels = label_conditions(series.dates, cfg.conditions, cal);
    auto fit = fit_ols(series.daily, labels, id);
    write_text_file(out.regression_csv(id), fit.to_csv());
    artifacts.push_back(out.regression_csv(id));
    fits.push_back(std::move(fit));
  }

  write_text_file(out.regression_table(), format_regression_table(fits));
  artifacts.push_back(out.regression_table());

  // Online-vs-static covid-coefficient comparisons per family and design.
  std::ostringstream cmp;
  cmp << "family,output,coefficient,online_coef,static_coef,diff,z,p,"
         "significant_5pct\n";
  for (const std::string family : {"mlp", "cnn", "lstm"}) {
    for (const std::string output : {"single", "multi"}) {
      const ConditionRegression* online = nullptr;
      const ConditionRegression* fixed = nullptr;
      for (const auto& f : fits) {
        if (f.experiment == family + "_online_" + output) online = &f;
        if (f.experiment == family + "_static_" + output) fixed = &f;
      }
      if (!online || !fixed) continue;
      auto c = compare_cells(*online, *fixed, "covid");
      const int io = online->index_of("covid");
      const int is = fixed->index_of("covid");
      cmp << family << ',' << output << ",covid,"
          << format_double(online->coef[io]) << ','
          << format_double(fixed->coef[is]) << ',' << format_double(c.diff)
          << ',' << format_double(c.z) << ',' << format_double(c.p_value)
          << ',' << (c.significant_5pct ? 1 : 0) << '\n';
    }
  }
  write_text_file(out.comparisons_csv(), cmp.str());
  artifacts.push_back(out.comparisons_csv());

  manifest_record(out, "analyze", artifacts, "");
  std::cout << "analyzed " << cells.size() << " cell(s)\n";
  return 0;
}

int cmd_report(const RunConfig& cfg) {
  OutputLayout out{cfg.output_root};
  const auto cells = cells_with_logs(cfg, out);
  std::vector<std::string> missing;
  for (const auto& id : cells) {
    if (!fs::exists(out.maape_csv(id))) missing.push_back(out.maape_csv(id));
    if (!fs::exists(out.regression_csv(id))) {
      missing.push_back(out.regression_csv(id));
    }
  }
  if (cells.empty() || !missing.empty()) {
    std::string what = "missing inputs for report:";
    if (cells.empty()) what += " (no logs)";
    for (const auto& m : missing) what += " " + m;
    throw DataError(what);
  }

  fs::create_directories(out.report_dir());
  std::vector<std::string> artifacts;
  auto emit = [&artifacts](const std::string& base, const ReportArtifact& art) {
    write_text_file(base + ".svg", art.svg);
    write_text_file(base + ".csv", art.csv);
    artifacts.push_back(base + ".svg");
    artifacts.push_back(base + ".csv");
  };

  std::vector<MaapeSeries> all_series;
  std::vector<ConditionRegression> fits;
  std::vector<TimingReport> timings;
  for (const auto& id : cells) {
    all_series.push_back(MaapeSeries::from_csv(out.maape_csv(id)));
    fits.push_back(ConditionRegression::from_csv(out.regression_csv(id)));
    if (fs::exists(out.timing_csv(id))) {
      CsvReader reader(out.timing_csv(id));
      std::vector<std::string> f;
      reader.next_row(f);  // header
      if (reader.next_row(f) && f.size() >= 8) {
        TimingReport t;
        t.experiment = f[0];
        t.n_models = std::stoi(f[1]);
        t.baseline_train_seconds = std::stod(f[2]);
        t.baseline_train_seconds_per_model = std::stod(f[3]);
        t.mean_update_seconds = std::stod(f[4]);
        t.mean_simulate_seconds = std::stod(f[5]);
        t.n_update_samples = std::stoi(f[6]);
        t.n_simulate_samples = std::stoi(f[7]);
        timings.push_back(t);
      }
    }
  }

  emit(out.report_dir() + "/evolution_all",
       render_evolution(all_series, cfg.conditions));
  emit(out.report_dir() + "/condition_stable",
       render_condition_bars(fits, "Intercept", "MAAPE in stable conditions"));
  emit(out.report_dir() + "/condition_covid",
       render_condition_bars(fits, "covid", "added MAAPE during covid"));
  emit(out.report_dir() + "/condition_protest",
       render_condition_bars(fits, "protest", "added MAAPE during protest"));
  emit(out.report_dir() + "/condition_holidays",
       render_condition_bars(fits, "holidays", "added MAAPE on holidays"));
  if (!timings.empty()) {
    emit(out.report_dir() + "/timing", render_timing(timings));
  }

  auto summary = render_summary(fits, timings);
  write_text_file(out.report_dir() + "/summary.txt", summary.to_text());
  write_text_file(out.report_dir() + "/summary.csv", summary.to_csv());
  artifacts.push_back(out.report_dir() + "/summary.txt");
  artifacts.push_back(out.report_dir() + "/summary.csv");

  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string dir = out.report_dir() + "/" + cells[i];
    fs::create_directories(dir);
    emit(dir + "/evolution",
         render_evolution({all_series[i]}, cfg.conditions));
    auto log = ForecastLog::from_csv(out.log_csv(cells[i]));
    emit(dir + "/closed_stations",
         render_closed_stations(closed_station_report(log)));
  }

  manifest_record(out, "report", artifacts, "");
  std::cout << "report written under " << out.report_dir() << "\n";
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  OutputLayout out{cfg.output_root};
  if (!fs::exists(out.manifest())) {
    throw DataError("no manifest at " + out.manifest());
  }
  json m = json::parse(read_text_file(out.manifest()));
  int checked = 0, bad = 0;
  const json artifacts = m.value("artifacts", json::object());
  for (const auto& [path, checksum] : artifacts.items()) {
    ++checked;
    if (!fs::exists(path)) {
      std::cerr << "missing: " << path << "\n";
      ++bad;
      continue;
    }
    const std::string actual = checksum_hex(fnv1a64_file(path));
    if (actual != checksum.get<std::string>()) {
      std::cerr << "checksum mismatch: " << path << "\n";
      ++bad;
    }
  }
  std::cout << "verified " << checked << " artifact(s), " << bad
            << " problem(s)\n";
  if (bad > 0) throw DataError("manifest verification failed");
  return 0;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"short-term transit demand forecasting benchmark"};
  app.require_subcommand(1);

  std::string config_path = "ridebench.json";
  std::string out_override;
  std::uint64_t seed_override = 0;
  bool seed_given = false;
  int jobs_override = 0;

  app.add_option("--config", config_path, "run configuration file")
      ->capture_default_str();
  app.add_option("--out", out_override, "override output.root");
  app.add_option("--seed", seed_override, "override the run seed")
      ->each([&](const std::string&) { seed_given = true; });
  app.add_option("--jobs", jobs_override, "concurrent grid cells");

  auto* synth = app.add_subcommand("synth", "generate a synthetic panel CSV");
  auto* ingest = app.add_subcommand("ingest", "validate and canonicalize a panel CSV");
  auto* run = app.add_subcommand("run", "execute the experiment grid");
  auto* analyze = app.add_subcommand("analyze", "metrics and condition regressions");
  auto* report = app.add_subcommand("report", "render charts and summary tables");
  auto* verify = app.add_subcommand("verify", "re-check manifest checksums");

  std::string run_model, run_strategy, run_output;
  std::vector<std::string> run_cells;
  bool run_grid_all = false;
  run->add_flag("--grid-all", run_grid_all, "run every configured cell");
  run->add_option("--model", run_model, "single cell: model family");
  run->add_option("--strategy", run_strategy, "single cell: static|online");
  run->add_option("--output-design", run_output, "single cell: single|multi");
  run->add_option("--cell", run_cells, "cell id like lstm_online_multi");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (!out_override.empty()) cfg.output_root = out_override;
    if (seed_given) cfg.seed = seed_override;
    if (jobs_override > 0) cfg.jobs = jobs_override;

    if (synth->parsed()) return cmd_synth(cfg);
    if (ingest->parsed()) return cmd_ingest(cfg);
    if (run->parsed()) {
      std::vector<std::string> only = run_cells;
      if (!run_model.empty() || !run_strategy.empty() || !run_output.empty()) {
        if (run_model.empty() || run_strategy.empty() || run_output.empty()) {
          throw ConfigError(
              "--model/--strategy/--output-design must be given together");
        }
        only.push_back(run_model + "_" + run_strategy + "_" + run_output);
      }
      if (run_grid_all) only.clear();
      return cmd_run(cfg, only);
    }
    if (analyze->parsed()) return cmd_analyze(cfg);
    if (report->parsed()) return cmd_report(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace ridebench::cli
