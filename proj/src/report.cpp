#include "ridebench/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "ridebench/csv.hpp"
#include "ridebench/errors.hpp"

namespace ridebench {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

const char* kPalette[] = {"#1f6fb4", "#d1495b", "#4f9d69", "#8a62a3",
                          "#c98a2b", "#3898a8", "#75483b", "#5a6570",
                          "#a8385a", "#2b6e5a", "#97572b", "#444444",
                          "#7a9a01", "#015c92"};
constexpr int kPaletteSize = 14;

// Minimal deterministic SVG sink.
class Svg {
public:
  Svg(double width, double height) : w_(width), h_(height) {
    body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w_)
          << "\" height=\"" << num(h_) << "\" viewBox=\"0 0 " << num(w_) << ' '
          << num(h_) << "\">\n";
    body_ << "<rect x=\"0\" y=\"0\" width=\"" << num(w_) << "\" height=\""
          << num(h_) << "\" fill=\"#ffffff\"/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill,
            double opacity = 1.0) {
    body_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\""
          << num(w) << "\" height=\"" << num(h) << "\" fill=\"" << fill
          << "\" fill-opacity=\"" << num(opacity) << "\"/>\n";
  }

  void line(double x1, double y1, double x2, double y2,
            const std::string& stroke, double width = 1.0) {
    body_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\""
          << num(x2) << "\" y2=\"" << num(y2) << "\" stroke=\"" << stroke
          << "\" stroke-width=\"" << num(width) << "\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts,
                const std::string& stroke, double width = 1.5) {
    if (pts.empty()) return;
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke
          << "\" stroke-width=\"" << num(width) << "\" points=\"";
    for (const auto& [x, y] : pts) body_ << num(x) << ',' << num(y) << ' ';
    body_ << "\"/>\n";
  }

  void text(double x, double y, const std::string& s, int size = 11,
            const std::string& anchor = "start",
            const std::string& fill = "#222222") {
    body_ << "<text x=\"" << num(x) << "\" y=\"" << num(y)
          << "\" font-family=\"sans-serif\" font-size=\"" << size
          << "\" text-anchor=\"" << anchor << "\" fill=\"" << fill << "\">" << s
          << "</text>\n";
  }

  std::string finish() {
    body_ << "</svg>\n";
    return body_.str();
  }

private:
  double w_, h_;
  std::ostringstream body_;
};

struct Frame {
  double x0, y0, x1, y1;  // plot area in SVG coordinates (y grows down)
  double vx0, vx1, vy0, vy1;  // value ranges

  double px(double v) const { return x0 + (v - vx0) / (vx1 - vx0) * (x1 - x0); }
  double py(double v) const { return y1 - (v - vy0) / (vy1 - vy0) * (y1 - y0); }
};

void draw_axes(Svg& svg, const Frame& f, int y_ticks = 5) {
  svg.line(f.x0, f.y1, f.x1, f.y1, "#333333");
  svg.line(f.x0, f.y0, f.x0, f.y1, "#333333");
  for (int i = 0; i <= y_ticks; ++i) {
    const double v = f.vy0 + (f.vy1 - f.vy0) * i / y_ticks;
    const double y = f.py(v);
    svg.line(f.x0 - 3, y, f.x0, y, "#333333");
    svg.line(f.x0, y, f.x1, y, "#eeeeee");
    svg.text(f.x0 - 6, y + 4, num(v), 10, "end");
  }
}

}  // namespace

ReportArtifact render_evolution(const std::vector<MaapeSeries>& series,
                                const ConditionSpec& conditions) {
  if (series.empty()) throw DataError("render_evolution: no series");

  double vmax = 0.0;
  Date dmin = series[0].dates.front();
  Date dmax = series[0].dates.back();
  for (const auto& s : series) {
    dmin = std::min(dmin, s.dates.front());
    dmax = std::max(dmax, s.dates.back());
    for (double v : s.rolling7) {
      if (!std::isnan(v)) vmax = std::max(vmax, v);
    }
  }
  if (vmax <= 0) vmax = 1.0;

  Svg svg(900, 420);
  Frame f{60, 30, 870, 360, static_cast<double>(dmin.serial()),
          static_cast<double>(dmax.serial()), 0.0, vmax * 1.08};

  auto shade = [&](const std::optional<DateRange>& r, const char* color) {
    if (!r) return;
    const double a = f.px(std::max(r->first, dmin).serial());
    const double b = f.px(std::min(r->last, dmax).serial());
    if (b > a) svg.rect(a, f.y0, b - a, f.y1 - f.y0, color, 0.15);
  };
  shade(conditions.covid, "#d1495b");
  shade(conditions.protest, "#c98a2b");

  draw_axes(svg, f);
  // x labels: first, middle, last date
  for (double frac : {0.0, 0.5, 1.0}) {
    const int serial =
        static_cast<int>(dmin.serial() + frac * (dmax.serial() - dmin.serial()));
    svg.text(f.px(serial), f.y1 + 16, Date(serial).to_iso(), 10, "middle");
  }
  svg.text(18, (f.y0 + f.y1) / 2, "rolling 7-day MAAPE", 11, "middle");

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < s.dates.size(); ++i) {
      if (std::isnan(s.rolling7[i])) continue;
      pts.emplace_back(f.px(s.dates[i].serial()), f.py(s.rolling7[i]));
    }
    const char* color = kPalette[k % kPaletteSize];
    svg.polyline(pts, color);
    svg.text(f.x1 - 200, f.y0 + 14 + 14 * static_cast<double>(k), s.experiment,
             11, "start", color);
    svg.line(f.x1 - 224, f.y0 + 10 + 14 * static_cast<double>(k), f.x1 - 204,
             f.y0 + 10 + 14 * static_cast<double>(k), color, 2.0);
  }

  std::ostringstream csv;
  csv << "experiment,date,rolling7\n";
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.dates.size(); ++i) {
      if (std::isnan(s.rolling7[i])) continue;
      csv << s.experiment << ',' << s.dates[i].to_iso() << ','
          << format_double(s.rolling7[i]) << '\n';
    }
  }
  return {svg.finish(), csv.str()};
}

ReportArtifact render_condition_bars(
    const std::vector<ConditionRegression>& fits,
    const std::string& coefficient, const std::string& title) {
  if (fits.empty()) throw DataError("render_condition_bars: no fits");

  struct Bar {
    std::string name;
    double est, se;
  };
  std::vector<Bar> bars;
  for (const auto& fit : fits) {
    const int idx = fit.index_of(coefficient);
    if (idx < 0) {
      throw ModelError("render_condition_bars: coefficient '" + coefficient +
                       "' missing from " + fit.experiment);
    }
    bars.push_back({fit.experiment, fit.coef[idx], fit.se[idx]});
  }

  double vmin = 0.0, vmax = 0.0;
  for (const auto& b : bars) {
    vmin = std::min(vmin, b.est - 1.96 * b.se);
    vmax = std::max(vmax, b.est + 1.96 * b.se);
  }
  if (vmax == vmin) vmax = vmin + 1.0;
  const double pad = 0.08 * (vmax - vmin);

  Svg svg(900, 420);
  Frame f{60, 40, 880, 330, 0.0, static_cast<double>(bars.size()), vmin,
          vmax + pad};
  draw_axes(svg, f);
  svg.text(60, 22, title, 13);

  const double zero_y = f.py(std::max(0.0, f.vy0));
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto& b = bars[i];
    const double cx = f.px(static_cast<double>(i) + 0.5);
    const double bw = (f.x1 - f.x0) / bars.size() * 0.55;
    const double top = f.py(std::max(b.est, 0.0));
    const double bottom = f.py(std::min(b.est, 0.0));
    svg.rect(cx - bw / 2, top, bw, std::max(1.0, bottom - top),
             kPalette[i % kPaletteSize], 0.85);
    const double lo = f.py(b.est - 1.96 * b.se);
    const double hi = f.py(b.est + 1.96 * b.se);
    svg.line(cx, hi, cx, lo, "#222222", 1.2);
    svg.line(cx - 5, hi, cx + 5, hi, "#222222", 1.2);
    svg.line(cx - 5, lo, cx + 5, lo, "#222222", 1.2);
    svg.text(cx, f.y1 + 14 + 12 * static_cast<double>(i % 2), b.name, 9,
             "middle");
    (void)zero_y;
  }

  std::ostringstream csv;
  csv << "experiment,term,estimate,se,ci_lo,ci_hi\n";
  for (const auto& b : bars) {
    csv << b.name << ',' << coefficient << ',' << format_double(b.est) << ','
        << format_double(b.se) << ',' << format_double(b.est - 1.96 * b.se)
        << ',' << format_double(b.est + 1.96 * b.se) << '\n';
  }
  return {svg.finish(), csv.str()};
}

ReportArtifact render_timing(const std::vector<TimingReport>& timings) {
  if (timings.empty()) throw DataError("render_timing: no timings");

  double tmax = 0.0;
  for (const auto& t : timings) {
    tmax = std::max(tmax, t.baseline_train_seconds_per_model);
    tmax = std::max(tmax, t.mean_simulate_seconds);
  }
  if (tmax <= 0) tmax = 1.0;

  Svg svg(900, 420);
  Frame f{60, 40, 880, 330, 0.0, static_cast<double>(timings.size()),
          0.0, tmax * 1.1};
  draw_axes(svg, f);
  svg.text(60, 22, "baseline training (filled) and per-step simulation "
                   "(outline) seconds, per model", 12);

  for (std::size_t i = 0; i < timings.size(); ++i) {
    const auto& t = timings[i];
    const double cx = f.px(static_cast<double>(i) + 0.5);
    const double bw = (f.x1 - f.x0) / timings.size() * 0.36;
    svg.rect(cx - bw, f.py(t.baseline_train_seconds_per_model), bw,
             f.y1 - f.py(t.baseline_train_seconds_per_model),
             kPalette[i % kPaletteSize], 0.9);
    svg.rect(cx + 2, f.py(t.mean_simulate_seconds), bw,
             f.y1 - f.py(t.mean_simulate_seconds),
             kPalette[i % kPaletteSize], 0.35);
    svg.text(cx, f.y1 + 14 + 12 * static_cast<double>(i % 2), t.experiment, 9,
             "middle");
  }

  std::ostringstream csv;
  csv << "experiment,n_models,baseline_train_seconds_per_model,"
         "baseline_train_seconds,mean_update_seconds,mean_simulate_seconds\n";
  for (const auto& t : timings) {
    csv << t.experiment << ',' << t.n_models << ','
        << format_double(t.baseline_train_seconds_per_model) << ','
        << format_double(t.baseline_train_seconds) << ','
        << format_double(t.mean_update_seconds) << ','
        << format_double(t.mean_simulate_seconds) << '\n';
  }
  return {svg.finish(), csv.str()};
}

SummaryTable render_summary(const std::vector<ConditionRegression>& fits,
                            const std::vector<TimingReport>& timings) {
  SummaryTable table;
  if (fits.empty()) return table;

  auto train_time = [&](const std::string& experiment) {
    for (const auto& t : timings) {
      if (t.experiment == experiment) return t.baseline_train_seconds_per_model;
    }
    return 0.0;
  };

  const std::vector<std::pair<std::string, std::string>> conditions = {
      {"stable", "Intercept"},
      {"covid", "covid"},
      {"protest", "protest"},
      {"holidays", "holidays"},
  };

  for (const auto& [cond, term] : conditions) {
    int best = -1;
    double best_est = 0.0;
    std::vector<std::pair<double, double>> cis;  // lo, hi per fit
    for (std::size_t i = 0; i < fits.size(); ++i) {
      const int idx = fits[i].index_of(term);
      if (idx < 0) continue;
      const double est = fits[i].coef[idx];
      const double hw = 1.96 * fits[i].se[idx];
      cis.emplace_back(est - hw, est + hw);
      if (best < 0 || est < best_est) {
        best = static_cast<int>(i);
        best_est = est;
      }
    }
    if (best < 0) continue;

    SummaryRow row;
    row.condition = cond;
    row.experiment = fits[best].experiment;
    const int bidx = fits[best].index_of(term);
    row.estimate = fits[best].coef[bidx];
    row.ci_halfwidth = 1.96 * fits[best].se[bidx];
    row.train_seconds = train_time(row.experiment);
    const auto [blo, bhi] = cis[best];
    for (std::size_t i = 0; i < fits.size(); ++i) {
      if (static_cast<int>(i) == best) continue;
      const auto [lo, hi] = cis[i];
      if (lo <= bhi && blo <= hi) {
        row.indistinguishable.push_back(fits[i].experiment);
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string SummaryTable::to_text() const {
  std::ostringstream out;
  auto pad = [](const std::string& s, std::size_t w) {
    return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
  };
  out << pad("condition", 10) << pad("best cell", 22) << pad("estimate", 20)
      << pad("train s/model", 15) << "ties (overlapping CI)\n";
  for (const auto& r : rows) {
    char est[48];
    std::snprintf(est, sizeof(est), "%.3f (+-%.3f)", r.estimate,
                  r.ci_halfwidth);
    char tt[24];
    std::snprintf(tt, sizeof(tt), "%.2f", r.train_seconds);
    std::string ties;
    for (std::size_t i = 0; i < r.indistinguishable.size(); ++i) {
      if (i) ties += ", ";
      ties += r.indistinguishable[i];
    }
    out << pad(r.condition, 10) << pad(r.experiment, 22) << pad(est, 20)
        << pad(tt, 15) << ties << '\n';
  }
  return out.str();
}

std::string SummaryTable::to_csv() const {
  std::ostringstream out;
  out << "condition,experiment,estimate,ci_halfwidth,train_seconds,ties\n";
  for (const auto& r : rows) {
    std::string ties;
    for (std::size_t i = 0; i < r.indistinguishable.size(); ++i) {
      if (i) ties += ';';
      ties += r.indistinguishable[i];
    }
    out << r.condition << ',' << r.experiment << ','
        << format_double(r.estimate) << ',' << format_double(r.ci_halfwidth)
        << ',' << format_double(r.train_seconds) << ',' << ties << '\n';
  }
  return out.str();
}

ReportArtifact render_closed_stations(const ClosedStationReport& report) {
  // Group the cells by station; each station gets one panel.
  std::vector<std::string> stations;
  for (const auto& c : report.cells) {
    if (std::find(stations.begin(), stations.end(), c.station) ==
        stations.end()) {
      stations.push_back(c.station);
    }
  }

  const int panels = std::max<std::size_t>(1, stations.size());
  const double panel_h = 130.0;
  Svg svg(700, 40 + panels * panel_h);
  svg.text(20, 22,
           "predictions on zero-truth station-days (closure diagnostic)", 12);

  double vmax = 1.0;
  for (const auto& c : report.cells) vmax = std::max(vmax, c.max_prediction);

  for (std::size_t p = 0; p < stations.size(); ++p) {
    std::vector<const ClosedStationCell*> cells;
    for (const auto& c : report.cells) {
      if (c.station == stations[p]) cells.push_back(&c);
    }
    const double top = 40 + p * panel_h;
    Frame f{60, top + 10, 680, top + panel_h - 24, 0.0,
            static_cast<double>(cells.size()), 0.0, vmax * 1.1};
    svg.line(f.x0, f.y1, f.x1, f.y1, "#333333");
    svg.text(f.x0, top + 8, stations[p] + " (truth = 0)", 10);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const double cx = f.px(static_cast<double>(i) + 0.5);
      const double bw = (f.x1 - f.x0) / cells.size() * 0.6;
      svg.rect(cx - bw / 2, f.py(cells[i]->mean_prediction), bw,
               f.y1 - f.py(cells[i]->mean_prediction), "#5a6570", 0.8);
      svg.text(cx, f.y1 + 10, cells[i]->day.to_iso(), 7, "middle");
    }
  }

  return {svg.finish(), report.to_csv()};
}

}  // namespace ridebench
