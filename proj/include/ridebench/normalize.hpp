#pragma once

#include <vector>

#include "ridebench/panel.hpp"

namespace ridebench {

// Per-station divide-by-max scaling fitted on the training range. The floor
// is fixed at zero so a zero count stays zero after scaling. Test-period
// values above the training max are not clipped; normalized values may
// exceed 1.
class NormalizationState {
public:
  NormalizationState() = default;
  NormalizationState(std::vector<double> scale, std::vector<int> flagged);

  double normalize(double x, int station) const { return x / scale_[station]; }
  double denormalize(double x, int station) const { return x * scale_[station]; }

  double scale(int station) const { return scale_[station]; }
  int n_stations() const { return static_cast<int>(scale_.size()); }

  // Stations whose training window was all zeros (scale forced to 1).
  const std::vector<int>& flagged_stations() const { return flagged_; }

private:
  std::vector<double> scale_;
  std::vector<int> flagged_;
};

// scale[s] = max count of station s over the training days. All-zero
// stations get scale 1 and are flagged.
NormalizationState fit_normalization(const RidershipPanel& panel,
                                     const DateRange& training_range);

}  // namespace ridebench
