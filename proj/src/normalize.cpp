#include "ridebench/normalize.hpp"

#include "ridebench/errors.hpp"

namespace ridebench {

NormalizationState::NormalizationState(std::vector<double> scale,
                                       std::vector<int> flagged)
    : scale_(std::move(scale)), flagged_(std::move(flagged)) {}

NormalizationState fit_normalization(const RidershipPanel& panel,
                                     const DateRange& training_range) {
  if (training_range.empty()) {
    throw DataError("empty normalization training range");
  }
  if (!panel.covers(training_range)) {
    throw DataError("training range " + training_range.first.to_iso() + ".." +
                    training_range.last.to_iso() + " outside panel " +
                    panel.start_date().to_iso() + ".." +
                    panel.end_date().to_iso());
  }
  const int d0 = panel.day_index(training_range.first);
  const int d1 = panel.day_index(training_range.last);
  std::vector<double> scale(panel.n_stations(), 1.0);
  std::vector<int> flagged;
  for (int s = 0; s < panel.n_stations(); ++s) {
    std::int64_t mx = 0;
    for (int d = d0; d <= d1; ++d) mx = std::max(mx, panel.count(s, d));
    if (mx == 0) {
      flagged.push_back(s);
    } else {
      scale[s] = static_cast<double>(mx);
    }
  }
  return NormalizationState(std::move(scale), std::move(flagged));
}

}  // namespace ridebench
