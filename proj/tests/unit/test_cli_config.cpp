#include <doctest.h>

#include <filesystem>

#include "ridebench/csv.hpp"
#include "ridebench/errors.hpp"
#include "tools/cli.hpp"

using namespace ridebench;
using namespace ridebench::cli;

namespace {

std::string write_config(const std::string& body) {
  static int counter = 0;
  auto path = std::filesystem::temp_directory_path() /
              ("rb_cfg_" + std::to_string(counter++) + ".json");
  write_text_file(path.string(), body);
  return path.string();
}

const char* kGoodConfig = R"json({
  "seed": 7,
  "output": {"root": "/tmp/rb_cli_out"},
  "data": {
    "source": "synthetic",
    "train_range": ["2019-01-07", "2019-06-30"],
    "test_range": ["2019-07-01", "2019-12-31"],
    "synthetic": {
      "n_stations": 3,
      "n_days": 365,
      "start_date": "2019-01-07",
      "base_levels": 400,
      "weekly_profile": [1, 1.05, 1.1, 1.05, 1, 0.6, 0.4],
      "noise_sigma": 0.05,
      "shocks": [{"start_day": 250, "level_multiplier": 0.5}]
    }
  },
  "conditions": {"covid": ["2019-09-13", "2019-12-31"]},
  "grid": {"cells": [
    {"model": "mlp", "strategy": "online", "output": "multi"},
    {"model": "arima", "strategy": "online", "output": "single"}
  ]},
  "hyperparameters": {
    "neural": {"epochs": 3, "batch_size": 16, "learning_rate": 0.001},
    "online": {"window": 30, "epochs": 1}
  }
})json";

}  // namespace

TEST_CASE("well-formed config loads with every section") {
  auto cfg = load_config(write_config(kGoodConfig));
  CHECK(cfg.seed == 7);
  CHECK(cfg.output_root == "/tmp/rb_cli_out");
  CHECK(cfg.source == "synthetic");
  CHECK(cfg.synthetic.n_stations == 3);
  CHECK(cfg.synthetic.shocks.size() == 1);
  CHECK(cfg.synthetic.shocks[0].level_multiplier == 0.5);
  CHECK(cfg.train_range.first.to_iso() == "2019-01-07");
  CHECK(cfg.conditions.covid.has_value());
  CHECK_FALSE(cfg.conditions.protest.has_value());
  CHECK(cfg.hyper.train.epochs == 3);
  CHECK(cfg.hyper.online_window == 30);

  auto grid = cfg.resolve_grid();
  REQUIRE(grid.size() == 2);
  CHECK(grid[0].cell_id() == "mlp_online_multi");
  CHECK(grid[1].cell_id() == "arima_online_single");
}

TEST_CASE("grid 'all' resolves to the 14 cells") {
  std::string body = kGoodConfig;
  const auto pos = body.find("\"grid\"");
  REQUIRE(pos != std::string::npos);
  body.replace(pos, body.find("]},", pos) + 3 - pos,
               "\"grid\": {\"cells\": \"all\"},");
  auto cfg = load_config(write_config(body));
  CHECK(cfg.resolve_grid().size() == 14);
}

TEST_CASE("invalid grid cell is rejected before any compute") {
  std::string body = kGoodConfig;
  const std::string bad = "{\"model\": \"arima\", \"strategy\": \"online\", "
                          "\"output\": \"multi\"}";
  const auto pos = body.find("{\"model\": \"mlp\"");
  REQUIRE(pos != std::string::npos);
  body.replace(pos, body.find('}', pos) + 1 - pos, bad);
  auto cfg = load_config(write_config(body));
  CHECK_THROWS_AS(cfg.resolve_grid(), ConfigError);
}

TEST_CASE("missing sections have specific errors") {
  CHECK_THROWS_WITH_AS(load_config(write_config("{}")),
                       doctest::Contains("data"), ConfigError);
  CHECK_THROWS_AS(load_config(write_config("{not json")), ConfigError);
  CHECK_THROWS_WITH_AS(
      load_config(write_config(R"({"data": {"source": "csv",
        "train_range": ["2019-01-01","2019-02-01"],
        "test_range": ["2019-02-02","2019-03-01"]}})")),
      doctest::Contains("csv_path"), ConfigError);
}

TEST_CASE("calendar spec merges file and inline holidays") {
  auto holidays = std::filesystem::temp_directory_path() / "rb_holidays.txt";
  write_text_file(holidays.string(), "# fixed\n2019-12-25\n\n2019-01-01\n");
  std::string body = kGoodConfig;
  const auto pos = body.find("\"synthetic\": {");
  body.insert(pos, "\"calendar\": {\"holidays_file\": \"" + holidays.string() +
                       "\", \"holiday_dates\": [\"2019-07-20\"]}, ");
  auto cfg = load_config(write_config(body));
  auto cal = cfg.calendar();
  CHECK(cal.is_holiday(Date::from_iso("2019-12-25")));
  CHECK(cal.is_holiday(Date::from_iso("2019-07-20")));
  CHECK(cal.is_holiday(Date::from_iso("2019-07-21")));  // a Sunday
  CHECK_FALSE(cal.is_holiday(Date::from_iso("2019-07-22")));
}
