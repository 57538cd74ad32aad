#include "ridebench/runner.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <memory>
#include <sstream>

#include "ridebench/checksum.hpp"
#include "ridebench/csv.hpp"
#include "ridebench/errors.hpp"
#include "ridebench/metrics.hpp"
#include "ridebench/network.hpp"
#include "ridebench/rng.hpp"

namespace fs = std::filesystem;

namespace ridebench {

std::string model_name(ModelKind k) {
  switch (k) {
    case ModelKind::kArima: return "arima";
    case ModelKind::kSarima: return "sarima";
    case ModelKind::kMlp: return "mlp";
    case ModelKind::kCnn: return "cnn";
    case ModelKind::kLstm: return "lstm";
  }
  return "?";
}

ModelKind model_from_name(const std::string& name) {
  if (name == "arima") return ModelKind::kArima;
  if (name == "sarima") return ModelKind::kSarima;
  if (name == "mlp") return ModelKind::kMlp;
  if (name == "cnn") return ModelKind::kCnn;
  if (name == "lstm") return ModelKind::kLstm;
  throw ConfigError("unknown model: '" + name + "'");
}

std::string strategy_name(Strategy s) {
  return s == Strategy::kStatic ? "static" : "online";
}

Strategy strategy_from_name(const std::string& name) {
  if (name == "static") return Strategy::kStatic;
  if (name == "online") return Strategy::kOnline;
  throw ConfigError("unknown strategy: '" + name + "'");
}

std::string output_design_name(OutputDesign d) {
  return d == OutputDesign::kSingle ? "single" : "multi";
}

OutputDesign output_design_from_name(const std::string& name) {
  if (name == "single") return OutputDesign::kSingle;
  if (name == "multi") return OutputDesign::kMulti;
  throw ConfigError("unknown output design: '" + name + "'");
}

bool is_neural(ModelKind k) {
  return k == ModelKind::kMlp || k == ModelKind::kCnn || k == ModelKind::kLstm;
}

Family to_family(ModelKind k) {
  switch (k) {
    case ModelKind::kMlp: return Family::kMlp;
    case ModelKind::kCnn: return Family::kCnn;
    case ModelKind::kLstm: return Family::kLstm;
    default: throw ModelError("not a neural model: " + model_name(k));
  }
}

std::string ExperimentConfig::cell_id() const {
  return model_name(model) + "_" + strategy_name(strategy) + "_" +
         output_design_name(output);
}

void ExperimentConfig::validate() const {
  if (!is_neural(model)) {
    if (strategy != Strategy::kOnline || output != OutputDesign::kSingle) {
      throw ConfigError(model_name(model) +
                        " is univariate and re-estimated with new data; only "
                        "the (single, online) cell is valid");
    }
  }
  if (train_range.empty() || test_range.empty()) {
    throw ConfigError("experiment needs non-empty train and test ranges");
  }
  if (test_range.first <= train_range.last) {
    throw ConfigError("test range must start after the training range");
  }
  if (train_range.length() < kLookbackDays + kHorizonDays) {
    throw ConfigError("training range shorter than one window (28 days)");
  }
  if (hyper.train.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (hyper.train.learning_rate <= 0) {
    throw ConfigError("learning rate must be > 0");
  }
  if (hyper.online_window < 1) throw ConfigError("online window must be >= 1");
  if (hyper.online_epochs < 0) throw ConfigError("online epochs must be >= 0");
}

std::string TimingReport::to_csv() const {
  std::ostringstream out;
  out << "experiment,n_models,baseline_train_seconds,"
         "baseline_train_seconds_per_model,mean_update_seconds,"
         "mean_simulate_seconds,n_update_samples,n_simulate_samples\n";
  out << experiment << ',' << n_models << ','
      << format_double(baseline_train_seconds) << ','
      << format_double(baseline_train_seconds_per_model) << ','
      << format_double(mean_update_seconds) << ','
      << format_double(mean_simulate_seconds) << ',' << n_update_samples << ','
      << n_simulate_samples << '\n';
  return out.str();
}

TimingReport measure_timing(const std::string& experiment, int n_models,
                            const std::vector<double>& train_seconds,
                            const std::vector<double>& update_seconds,
                            const std::vector<double>& simulate_seconds) {
  TimingReport rep;
  rep.experiment = experiment;
  rep.n_models = n_models;
  for (double t : train_seconds) rep.baseline_train_seconds += t;
  rep.baseline_train_seconds_per_model =
      n_models > 0 ? rep.baseline_train_seconds / n_models : 0.0;
  for (double t : update_seconds) rep.mean_update_seconds += t;
  rep.n_update_samples = static_cast<int>(update_seconds.size());
  if (rep.n_update_samples > 0) rep.mean_update_seconds /= rep.n_update_samples;
  for (double t : simulate_seconds) rep.mean_simulate_seconds += t;
  rep.n_simulate_samples = static_cast<int>(simulate_seconds.size());
  if (rep.n_simulate_samples > 0) {
    rep.mean_simulate_seconds /= rep.n_simulate_samples;
  }
  return rep;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// One model walking the test range: a station's model under the single
// design, or the whole-system model under multi.
class ModelStream {
public:
  virtual ~ModelStream() = default;
  // Normalized predictions, station-major [stations_out * 7].
  virtual std::vector<double> forecast_at(Date origin) = 0;
  virtual void update_with(Date origin, std::vector<std::string>* warnings) = 0;
  virtual std::uint64_t checksum() const = 0;
  virtual void save_state(std::ostream& out) const = 0;
  virtual void load_state(std::istream& in) = 0;
  virtual double baseline_train() = 0;  // returns wall seconds
};

class NeuralStream : public ModelStream {
public:
  NeuralStream(const RidershipPanel& panel, const NormalizationState& norm,
               const ExperimentConfig& cfg, int station, std::uint64_t seed)
      : panel_(panel), norm_(norm), cfg_(cfg), station_(station) {
    NetworkSpec spec;
    spec.family = to_family(cfg.model);
    spec.stations_in =
        cfg.output == OutputDesign::kMulti ? panel.n_stations() : 1;
    spec.stations_out = spec.stations_in;
    net_ = std::make_unique<Network>(spec, seed);

    train_cfg_ = cfg.hyper.train;
    train_cfg_.seed = seed;
    online_cfg_ = train_cfg_;
    online_cfg_.epochs = cfg.hyper.online_epochs;
    if (cfg.hyper.online_learning_rate > 0) {
      online_cfg_.learning_rate = cfg.hyper.online_learning_rate;
    }
    online_cfg_.seed = splitmix64(seed ^ 0x6f6e6c696e65ULL);
    online_trainer_ = std::make_unique<Trainer>(*net_, online_cfg_);
  }

  double baseline_train() override {
    const auto start = Clock::now();
    auto windows = make_windows(panel_, norm_, cfg_.output, cfg_.train_range,
                                station_);
    Trainer trainer(*net_, train_cfg_);
    trainer.run(windows, train_cfg_.epochs);
    return seconds_since(start);
  }

  std::vector<double> forecast_at(Date origin) override {
    SupervisedWindow w =
        make_forecast_window(panel_, norm_, cfg_.output, origin, station_);
    Batch batch = net_->prepare_batch(std::span<const SupervisedWindow>(&w, 1));
    autodiff::Var pred = net_->forward(batch);
    return pred.value().v;
  }

  void update_with(Date origin, std::vector<std::string>* warnings) override {
    if (cfg_.strategy != Strategy::kOnline || cfg_.hyper.online_epochs == 0) {
      return;
    }
    // Windows whose 7-day target block ends at or before the day whose
    // truth just arrived.
    const Date hi = origin - (kHorizonDays - 1);
    const Date first_feasible = panel_.start_date() + kLookbackDays;
    if (hi < first_feasible) return;
    Date lo = hi - (cfg_.hyper.online_window - 1);
    if (lo < first_feasible) lo = first_feasible;
    const DateRange span{lo - kLookbackDays, hi + (kHorizonDays - 1)};
    auto windows = make_windows(panel_, norm_, cfg_.output, span, station_);

    std::vector<std::vector<double>> snapshot;
    for (auto& p : net_->params()) snapshot.push_back(p.value().v);
    try {
      online_trainer_->run(windows, cfg_.hyper.online_epochs);
    } catch (const ModelError& e) {
      for (std::size_t i = 0; i < snapshot.size(); ++i) {
        net_->params()[i].value().v = snapshot[i];
      }
      if (warnings) {
        warnings->push_back("update failed at " + origin.to_iso() +
                            ", parameters carried forward: " + e.what());
      }
    }
  }

  std::uint64_t checksum() const override { return net_->param_checksum(); }

  void save_state(std::ostream& out) const override {
    net_->save(out);
    online_trainer_->serialize(out);
  }

  void load_state(std::istream& in) override {
    net_->load(in);
    online_trainer_->deserialize(in);
  }

private:
  const RidershipPanel& panel_;
  const NormalizationState& norm_;
  const ExperimentConfig& cfg_;
  int station_;
  std::unique_ptr<Network> net_;
  std::unique_ptr<Trainer> online_trainer_;
  TrainConfig train_cfg_;
  TrainConfig online_cfg_;
};

class ArimaStream : public ModelStream {
public:
  ArimaStream(const RidershipPanel& panel, const NormalizationState& norm,
              const ExperimentConfig& cfg, int station)
      : panel_(panel), norm_(norm), cfg_(cfg), station_(station) {
    // Normalized training series, then any gap days before the test range.
    const int d0 = panel.day_index(cfg.train_range.first);
    const int d1 = panel.day_index(cfg.train_range.last);
    for (int d = d0; d <= d1; ++d) series_.push_back(normed(d));
    for (Date d = cfg.train_range.last + 1; d < cfg.test_range.first; ++d) {
      series_.push_back(normed(panel_.day_index(d)));
    }
  }

  double baseline_train() override {
    const auto start = Clock::now();
    const bool seasonal = cfg_.model == ModelKind::kSarima;
    fit_ = stepwise_select(series_, seasonal,
                           seasonal ? cfg_.hyper.seasonal_period : 0);
    return seconds_since(start);
  }

  std::vector<double> forecast_at(Date origin) override {
    (void)origin;
    return forecast(fit_, series_, kHorizonDays);
  }

  void update_with(Date origin, std::vector<std::string>* warnings) override {
    series_.push_back(normed(panel_.day_index(origin)));
    try {
      fit_ = update(fit_, series_);
    } catch (const ConvergenceError& e) {
      fit_ = e.best_fit;  // best CSS point found; keep walking
    } catch (const ModelError& e) {
      if (warnings) {
        warnings->push_back("re-estimation failed at " + origin.to_iso() +
                            ", previous fit carried forward: " + e.what());
      }
    }
  }

  std::uint64_t checksum() const override {
    auto params = fit_.pack_params();
    params.push_back(fit_.sigma2);
    return fnv1a64(params);
  }

  void save_state(std::ostream& out) const override {
    const std::string text = fit_.to_text();
    const std::uint64_t len = text.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    const std::uint64_t n = series_.size();
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  }

  void load_state(std::istream& in) override {
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    std::string text(len, '\0');
    in.read(text.data(), static_cast<std::streamsize>(len));
    fit_ = ArimaFit::from_text(text);
    std::uint64_t n = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    if (!in) throw ModelError("arima stream state: truncated");
    // The series itself is reconstructed from the panel.
    const int base = static_cast<int>(series_.size());
    for (int i = base; i < static_cast<int>(n); ++i) {
      const Date d = cfg_.test_range.first + (i - base);
      series_.push_back(normed(panel_.day_index(d)));
    }
  }

private:
  double normed(int day_index) const {
    return norm_.normalize(static_cast<double>(panel_.count(station_, day_index)),
                           station_);
  }

  const RidershipPanel& panel_;
  const NormalizationState& norm_;
  const ExperimentConfig& cfg_;
  int station_;
  std::vector<double> series_;
  ArimaFit fit_;
};

struct StreamFiles {
  fs::path dir;
  fs::path state;
  fs::path records;
  fs::path done;
  bool enabled = false;
};

StreamFiles stream_files(const RunOptions& opt, const std::string& cell,
                         const std::string& stream) {
  StreamFiles f;
  if (opt.checkpoint_dir.empty()) return f;
  f.enabled = true;
  f.dir = fs::path(opt.checkpoint_dir) / cell / stream;
  f.state = f.dir / "state.bin";
  f.records = f.dir / "records.csv";
  f.done = f.dir / "done";
  return f;
}

void append_records(const fs::path& path,
                    const std::vector<ForecastRecord>& records,
                    std::size_t from, const ForecastLog& log_for_names) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw DataError("cannot append to " + path.string());
  for (std::size_t i = from; i < records.size(); ++i) {
    const auto& r = records[i];
    out << log_for_names.stations[r.station] << ',' << r.origin.to_iso() << ','
        << r.horizon << ',' << format_double(r.pred) << ','
        << format_double(r.truth) << '\n';
  }
}

std::vector<ForecastRecord> read_records(const fs::path& path,
                                         const ForecastLog& log_for_names,
                                         std::size_t limit) {
  std::vector<ForecastRecord> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  std::map<std::string, int> idx;
  for (std::size_t i = 0; i < log_for_names.stations.size(); ++i) {
    idx[log_for_names.stations[i]] = static_cast<int>(i);
  }
  while (out.size() < limit && std::getline(in, line)) {
    auto f = split_csv_line(line);
    if (f.size() != 5) break;
    ForecastRecord r;
    r.station = idx.at(f[0]);
    r.origin = Date::from_iso(f[1]);
    r.horizon = std::stoi(f[2]);
    r.pred = std::stod(f[3]);
    r.truth = std::stod(f[4]);
    out.push_back(r);
  }
  return out;
}

void truncate_records(const fs::path& path, std::size_t keep) {
  std::ifstream in(path);
  if (!in) return;
  std::ostringstream kept;
  std::string line;
  std::size_t n = 0;
  while (n < keep && std::getline(in, line)) {
    kept << line << '\n';
    ++n;
  }
  in.close();
  write_text_file(path.string(), kept.str());
}

// Walks one stream over the origins, checkpointing every
// options.checkpoint_every origins when enabled.
struct StreamWalkResult {
  std::vector<ForecastRecord> records;
  std::vector<double> update_seconds;
  std::vector<double> simulate_seconds;
  double train_seconds = 0.0;
  std::uint64_t initial_checksum = 0;
  std::uint64_t final_checksum = 0;
  bool forecast_pure = true;
};

StreamWalkResult walk_stream(ModelStream& stream, const RidershipPanel& panel,
                             const NormalizationState& norm,
                             const ExperimentConfig& cfg,
                             const std::vector<Date>& origins, int station,
                             const StreamFiles& files,
                             const RunOptions& options,
                             const ForecastLog& names,
                             std::atomic<int>& origin_counter,
                             std::vector<std::string>& warnings) {
  StreamWalkResult res;
  const int out_stations = cfg.output == OutputDesign::kMulti
                               ? panel.n_stations()
                               : 1;
  const std::size_t per_origin = static_cast<std::size_t>(out_stations) * 7;

  std::size_t start_origin = 0;
  bool resumed = false;

  if (files.enabled) {
    fs::create_directories(files.dir);
    if (fs::exists(files.done)) {
      res.records = read_records(files.records, names,
                                 origins.size() * per_origin);
      StreamWalkResult done_res = std::move(res);
      // checksums still need the live model; fall through only when the
      // stream is incomplete, so reconstruct them from the state file when
      // present, else recompute nothing.
      if (fs::exists(files.state)) {
        std::ifstream in(files.state, std::ios::binary);
        std::size_t dummy = 0;
        in.read(reinterpret_cast<char*>(&dummy), sizeof(dummy));
        stream.load_state(in);
      }
      done_res.initial_checksum = stream.checksum();
      done_res.final_checksum = done_res.initial_checksum;
      return done_res;
    }
    if (fs::exists(files.state)) {
      std::ifstream in(files.state, std::ios::binary);
      if (!in) throw DataError("cannot open " + files.state.string());
      std::size_t next_origin = 0;
      in.read(reinterpret_cast<char*>(&next_origin), sizeof(next_origin));
      stream.load_state(in);
      if (!in) throw ModelError("stream state truncated: " + files.state.string());
      start_origin = next_origin;
      truncate_records(files.records, start_origin * per_origin);
      res.records = read_records(files.records, names,
                                 start_origin * per_origin);
      resumed = true;
    }
  }

  if (!resumed) {
    res.train_seconds = stream.baseline_train();
    if (files.enabled) {
      // Checkpoint the freshly trained baseline at origin 0.
      std::ofstream out(files.state.string() + ".tmp", std::ios::binary);
      std::size_t next_origin = 0;
      out.write(reinterpret_cast<const char*>(&next_origin), sizeof(next_origin));
      stream.save_state(out);
      out.close();
      fs::rename(files.state.string() + ".tmp", files.state);
      write_text_file(files.records.string(), "");
    }
  }

  res.initial_checksum = stream.checksum();
  std::size_t flushed = res.records.size();

  for (std::size_t oi = start_origin; oi < origins.size(); ++oi) {
    const Date t = origins[oi];

    const std::uint64_t before = stream.checksum();
    auto sim_start = Clock::now();
    std::vector<double> preds = stream.forecast_at(t);
    res.simulate_seconds.push_back(seconds_since(sim_start));
    if (stream.checksum() != before) res.forecast_pure = false;

    if (preds.size() != per_origin) {
      throw ModelError("stream produced " + std::to_string(preds.size()) +
                       " predictions, expected " + std::to_string(per_origin));
    }
    for (int so = 0; so < out_stations; ++so) {
      const int s = cfg.output == OutputDesign::kMulti ? so : station;
      for (int h = 1; h <= 7; ++h) {
        ForecastRecord r;
        r.station = s;
        r.origin = t;
        r.horizon = h;
        const double de = norm.denormalize(preds[so * 7 + (h - 1)], s);
        r.pred = de < 0 ? 0.0 : de;
        r.truth = static_cast<double>(panel.count(s, panel.day_index(t) + h - 1));
        res.records.push_back(r);
      }
    }

    auto upd_start = Clock::now();
    stream.update_with(t, &warnings);
    if (cfg.strategy == Strategy::kOnline) {
      res.update_seconds.push_back(seconds_since(upd_start));
    }

    const bool checkpoint_now =
        files.enabled && options.checkpoint_every > 0 &&
        ((oi + 1) % options.checkpoint_every == 0 || oi + 1 == origins.size());
    if (checkpoint_now) {
      append_records(files.records, res.records, flushed, names);
      flushed = res.records.size();
      std::ofstream out(files.state.string() + ".tmp", std::ios::binary);
      const std::size_t next_origin = oi + 1;
      out.write(reinterpret_cast<const char*>(&next_origin), sizeof(next_origin));
      stream.save_state(out);
      out.close();
      fs::rename(files.state.string() + ".tmp", files.state);
    }

    const int processed = ++origin_counter;
    if (options.interrupt_after_origins >= 0 &&
        processed >= options.interrupt_after_origins) {
      if (files.enabled && !checkpoint_now) {
        append_records(files.records, res.records, flushed, names);
        std::ofstream out(files.state.string() + ".tmp", std::ios::binary);
        const std::size_t next_origin = oi + 1;
        out.write(reinterpret_cast<const char*>(&next_origin), sizeof(next_origin));
        stream.save_state(out);
        out.close();
        fs::rename(files.state.string() + ".tmp", files.state);
      }
      throw RunInterrupted();
    }
  }

  if (files.enabled) {
    append_records(files.records, res.records, flushed, names);
    write_text_file(files.done.string(), "done\n");
  }
  res.final_checksum = stream.checksum();
  return res;
}

}  // namespace

RunResult run_experiment(const RidershipPanel& panel,
                         const ExperimentConfig& config,
                         const RunOptions& options) {
  config.validate();
  if (!panel.covers(config.train_range) || !panel.covers(config.test_range)) {
    throw DataError("panel does not cover the experiment date ranges");
  }

  const NormalizationState norm = fit_normalization(panel, config.train_range);
  const std::vector<Date> origins = enumerate_origins(panel, config.test_range);
  if (origins.empty()) {
    throw DataError("test range yields no forecast origins");
  }

  RunResult out;
  out.log.experiment = config.cell_id();
  out.log.stations = panel.stations();

  struct StreamDef {
    int station;          // -1 for the system model
    std::string id;
  };
  std::vector<StreamDef> defs;
  if (config.output == OutputDesign::kMulti) {
    defs.push_back({-1, "all"});
  } else {
    for (int s = 0; s < panel.n_stations(); ++s) {
      defs.push_back({s, panel.stations()[s]});
    }
  }

  std::vector<double> train_times, update_times, simulate_times;
  std::atomic<int> origin_counter{0};

  for (const auto& def : defs) {
    std::unique_ptr<ModelStream> stream;
    const std::uint64_t stream_seed =
        splitmix64(config.seed * 0x9e3779b97f4a7c15ULL +
                   static_cast<std::uint64_t>(def.station + 1));
    if (is_neural(config.model)) {
      stream = std::make_unique<NeuralStream>(panel, norm, config,
                                              def.station, stream_seed);
    } else {
      stream = std::make_unique<ArimaStream>(panel, norm, config, def.station);
    }
    StreamFiles files = stream_files(options, config.cell_id(), def.id);
    StreamWalkResult res =
        walk_stream(*stream, panel, norm, config, origins, def.station, files,
                    options, out.log, origin_counter, out.warnings);

    out.log.records.insert(out.log.records.end(), res.records.begin(),
                           res.records.end());
    train_times.push_back(res.train_seconds);
    update_times.insert(update_times.end(), res.update_seconds.begin(),
                        res.update_seconds.end());
    simulate_times.insert(simulate_times.end(), res.simulate_seconds.begin(),
                          res.simulate_seconds.end());
    out.audit.initial_checksums.push_back(res.initial_checksum);
    out.audit.final_checksums.push_back(res.final_checksum);
    out.audit.forecast_step_pure =
        out.audit.forecast_step_pure && res.forecast_pure;
    if (res.initial_checksum != res.final_checksum) {
      out.audit.static_params_constant = false;
    }
  }

  out.log.sort_canonical();
  out.timing = measure_timing(config.cell_id(),
                              static_cast<int>(defs.size()), train_times,
                              update_times, simulate_times);

  const std::size_t expected = static_cast<std::size_t>(panel.n_stations()) *
                               origins.size() * 7;
  if (out.log.records.size() != expected) {
    throw ModelError("incomplete forecast log: " +
                     std::to_string(out.log.records.size()) + " of " +
                     std::to_string(expected) + " records");
  }
  return out;
}

std::vector<GridCellResult> run_grid(const RidershipPanel& panel,
                                     const std::vector<ExperimentConfig>& grid,
                                     const RunOptions& options, int jobs) {
  for (const auto& cfg : grid) cfg.validate();  // fail before any compute

  std::vector<GridCellResult> results(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= grid.size()) return;
      GridCellResult& cell = results[i];
      cell.config = grid[i];
      try {
        cell.result = run_experiment(panel, grid[i], options);
        cell.ok = true;
      } catch (const RunInterrupted&) {
        throw;  // test hook: propagate
      } catch (const std::exception& e) {
        cell.ok = false;
        cell.error = e.what();
      }
    }
  };

  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::future<void>> futures;
    for (int j = 0; j < jobs; ++j) {
      futures.push_back(std::async(std::launch::async, worker));
    }
    for (auto& f : futures) f.get();
  }
  return results;
}

std::vector<ExperimentConfig> default_grid(const DateRange& train_range,
                                           const DateRange& test_range,
                                           const HyperParams& hyper,
                                           std::uint64_t seed) {
  std::vector<ExperimentConfig> grid;
  auto add = [&](ModelKind m, Strategy s, OutputDesign o) {
    ExperimentConfig cfg;
    cfg.model = m;
    cfg.strategy = s;
    cfg.output = o;
    cfg.train_range = train_range;
    cfg.test_range = test_range;
    cfg.hyper = hyper;
    cfg.seed = seed;
    grid.push_back(cfg);
  };
  for (ModelKind m : {ModelKind::kMlp, ModelKind::kCnn, ModelKind::kLstm}) {
    for (Strategy s : {Strategy::kStatic, Strategy::kOnline}) {
      for (OutputDesign o : {OutputDesign::kSingle, OutputDesign::kMulti}) {
        add(m, s, o);
      }
    }
  }
  add(ModelKind::kArima, Strategy::kOnline, OutputDesign::kSingle);
  add(ModelKind::kSarima, Strategy::kOnline, OutputDesign::kSingle);
  return grid;
}

}  // namespace ridebench
