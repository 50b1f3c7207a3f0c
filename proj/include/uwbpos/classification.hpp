#pragma once

#include <span>
#include <vector>

#include "uwbpos/channel.hpp"
#include "uwbpos/geometry.hpp"

namespace uwbpos {

// First-path power decision thresholds. Defaults are the campaign values.
struct Thresholds {
  double los_floor_dbm = -78.5;
  double nlos_floor_dbm = -85.0;

  void validate() const;
};

struct LabeledPowerSample {
  double power_dbm = 0.0;
  PropagationClass true_class = PropagationClass::los;
};

struct RangingSample {
  Point2 tag_position;
  int anchor_id = 0;
  double toa_ns = 0.0;
  PropagationClass true_class = PropagationClass::los;
};

struct CalibrationResult {
  Thresholds thresholds;
  double success_rate = 0.0;
};

// power > los_floor -> LOS; power > nlos_floor -> NLOS; otherwise SNLOS.
// Boundary values fall to the lower class.
PropagationClass classify_power(double power_dbm, const Thresholds& t);

// Candidate threshold values: 0.1 dB steps over
// [min sample - 1 dB, max sample + 1 dB].
std::vector<double> threshold_grid(std::span<const LabeledPowerSample> samples);

// Exhaustive search over all grid pairs for the thresholds maximizing the
// fraction of correctly classified samples. Ties prefer the pair with the
// best minimum per-class recall, then the numerically smallest thresholds.
// Requires at least one sample of each class.
CalibrationResult calibrate_thresholds(
    std::span<const LabeledPowerSample> samples);

// Single-threaded reference for the search above; same result bit for bit.
CalibrationResult calibrate_thresholds_serial(
    std::span<const LabeledPowerSample> samples);

// Per-class mean and unbiased standard deviation of (measured TOA -
// geometric TOA). LOS stays at zero by convention and the returned
// toa_noise_std_ns keeps its default. Every non-LOS class needs at least
// two samples; fewer is an error.
NlosStats estimate_bias_stats(std::span<const RangingSample> samples,
                              const AnchorMap& anchors);

}  // namespace uwbpos
