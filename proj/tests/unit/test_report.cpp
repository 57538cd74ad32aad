#include <doctest.h>

#include <sstream>

#include "ridebench/csv.hpp"
#include "ridebench/errors.hpp"
#include "ridebench/report.hpp"

using namespace ridebench;

namespace {

MaapeSeries constant_series(const std::string& name, double value, int days) {
  MaapeSeries s;
  s.experiment = name;
  const Date d0 = Date::from_iso("2020-01-01");
  for (int i = 0; i < days; ++i) {
    s.dates.push_back(d0 + i);
    s.daily.push_back(value);
  }
  s.rolling7 = rolling_mean(s.daily, 7);
  return s;
}

ConditionRegression fake_fit(const std::string& name, double intercept,
                             double covid, double covid_se) {
  ConditionRegression f;
  f.experiment = name;
  f.names = {"Intercept", "covid", "protest", "saturday",
             "holidays", "covid:saturday", "covid:holidays"};
  f.coef = {intercept, covid, 0.2, 0.01, 0.1, -0.05, -0.02};
  f.se = {0.01, covid_se, 0.03, 0.02, 0.02, 0.03, 0.03};
  for (std::size_t i = 0; i < f.coef.size(); ++i) {
    f.t_stat.push_back(f.coef[i] / f.se[i]);
    f.p_value.push_back(0.001);
    f.stars.push_back("***");
  }
  f.r_squared = 0.5;
  f.adj_r_squared = 0.49;
  f.n = 700;
  return f;
}

}  // namespace

TEST_CASE("evolution chart: constant series, sidecar equals rolling output") {
  auto s = constant_series("mlp_static_multi", 0.25, 30);
  ConditionSpec spec;
  spec.covid = DateRange{Date::from_iso("2020-01-20"), Date::from_iso("2020-01-25")};
  auto art = render_evolution({s}, spec);

  CHECK(art.svg.find("<svg") == 0);
  CHECK(art.svg.find("polyline") != std::string::npos);
  CHECK(art.svg.find("mlp_static_multi") != std::string::npos);

  // Sidecar holds exactly the plotted (non-NaN) rolling values.
  std::istringstream csv(art.csv);
  std::string line;
  std::getline(csv, line);
  CHECK(line == "experiment,date,rolling7");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    auto f = split_csv_line(line);
    REQUIRE(f.size() == 3);
    CHECK(f[2] == format_double(0.25));
  }
  CHECK(rows == 24);  // 30 days minus the 6-day rolling warmup
}

TEST_CASE("two series get two legend entries") {
  auto a = constant_series("cell_a", 0.2, 20);
  auto b = constant_series("cell_b", 0.4, 20);
  auto art = render_evolution({a, b}, ConditionSpec{});
  CHECK(art.svg.find("cell_a") != std::string::npos);
  CHECK(art.svg.find("cell_b") != std::string::npos);
}

TEST_CASE("svg output is deterministic bytes") {
  auto a = constant_series("cell_a", 0.2, 20);
  auto r1 = render_evolution({a}, ConditionSpec{});
  auto r2 = render_evolution({a}, ConditionSpec{});
  CHECK(r1.svg == r2.svg);
  CHECK(r1.csv == r2.csv);
}

TEST_CASE("condition bars: whisker is 1.96 standard errors each side") {
  auto fit = fake_fit("lstm_online_multi", 0.09, 0.12, 0.008);
  auto art = render_condition_bars({fit}, "Intercept", "stable conditions");
  // Intercept 0.09 with SE 0.01: half-width 1.96*0.01 = 0.0196.
  CHECK(art.csv.find("lstm_online_multi,Intercept,0.09,0.01,") !=
        std::string::npos);
  std::istringstream csv(art.csv);
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  auto f = split_csv_line(row);
  REQUIRE(f.size() == 6);
  const double lo = std::stod(f[4]), hi = std::stod(f[5]);
  CHECK(hi - lo == doctest::Approx(2 * 1.96 * 0.01));

  SUBCASE("zero-SE fit draws a zero-length whisker") {
    auto degenerate = fake_fit("x", 0.09, 0.12, 0.0);
    degenerate.se[0] = 0.0;
    auto art2 = render_condition_bars({degenerate}, "Intercept", "t");
    std::istringstream c2(art2.csv);
    std::getline(c2, header);
    std::getline(c2, row);
    auto g = split_csv_line(row);
    CHECK(std::stod(g[4]) == std::stod(g[5]));
  }

  SUBCASE("missing coefficient errors") {
    CHECK_THROWS_AS(render_condition_bars({fit}, "nope", "t"), ModelError);
  }
}

TEST_CASE("summary picks the minimum and lists overlapping ties") {
  auto best = fake_fit("lstm_online_multi", 0.09, 0.119, 0.012);
  auto tie = fake_fit("lstm_online_single", 0.09, 0.141, 0.012);   // CI overlaps
  auto worse = fake_fit("mlp_static_single", 0.084, 0.819, 0.016);  // far away

  std::vector<TimingReport> timings(1);
  timings[0].experiment = "lstm_online_multi";
  timings[0].baseline_train_seconds_per_model = 27.0;

  auto table = render_summary({best, tie, worse}, timings);
  REQUIRE(!table.rows.empty());
  const SummaryRow* covid_row = nullptr;
  for (const auto& r : table.rows) {
    if (r.condition == "covid") covid_row = &r;
  }
  REQUIRE(covid_row != nullptr);
  CHECK(covid_row->experiment == "lstm_online_multi");
  CHECK(covid_row->train_seconds == 27.0);
  REQUIRE(covid_row->indistinguishable.size() == 1);
  CHECK(covid_row->indistinguishable[0] == "lstm_online_single");

  auto text = table.to_text();
  CHECK(text.find("covid") != std::string::npos);
  CHECK(text.find("lstm_online_multi") != std::string::npos);

  SUBCASE("single experiment yields single-entry rows") {
    auto solo = render_summary({best}, timings);
    for (const auto& r : solo.rows) {
      CHECK(r.experiment == "lstm_online_multi");
      CHECK(r.indistinguishable.empty());
    }
  }
}

TEST_CASE("timing chart carries every experiment") {
  TimingReport a;
  a.experiment = "mlp_static_multi";
  a.n_models = 1;
  a.baseline_train_seconds_per_model = 1.5;
  a.mean_simulate_seconds = 0.01;
  TimingReport b;
  b.experiment = "lstm_static_multi";
  b.n_models = 1;
  b.baseline_train_seconds_per_model = 7.5;
  b.mean_simulate_seconds = 0.05;
  auto art = render_timing({a, b});
  CHECK(art.svg.find("mlp_static_multi") != std::string::npos);
  CHECK(art.csv.find("lstm_static_multi,1,7.5,") != std::string::npos);
}

TEST_CASE("closed-station chart groups cells by station") {
  ClosedStationReport rep;
  rep.threshold = 1.0;
  rep.nonzero_fraction = 0.5;
  for (int d = 0; d < 4; ++d) {
    ClosedStationCell c;
    c.station = d < 2 ? "S001" : "S002";
    c.day = Date::from_iso("2020-06-01") + d;
    c.mean_prediction = 120.5 + d;
    c.max_prediction = 130.0;
    c.n_predictions = 7;
    rep.cells.push_back(c);
  }
  auto art = render_closed_stations(rep);
  CHECK(art.svg.find("S001") != std::string::npos);
  CHECK(art.svg.find("S002") != std::string::npos);
  CHECK(art.csv.find("S001,2020-06-01,120.5,130,7") != std::string::npos);
}
