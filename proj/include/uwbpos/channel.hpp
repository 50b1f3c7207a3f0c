#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "uwbpos/geometry.hpp"
#include "uwbpos/rng.hpp"

namespace uwbpos {

// Per-class TOA bias statistics plus the common time-measurement noise.
// LOS carries no bias by convention, so only the NLOS and SNLOS entries
// are meaningful. Defaults are the measurement-campaign values.
struct NlosStats {
  double toa_noise_std_ns = 0.2;
  std::array<double, kNumClasses> bias_mean_ns{0.0, 0.49, 1.92};
  std::array<double, kNumClasses> bias_std_ns{0.0, 1.39, 2.02};

  double bias_mean(PropagationClass c) const {
    return bias_mean_ns[static_cast<std::size_t>(c)];
  }
  double bias_std(PropagationClass c) const {
    return bias_std_ns[static_cast<std::size_t>(c)];
  }

  void validate() const;
};

// Class-conditional first-path power distributions used by the simulator.
struct PowerModel {
  std::array<double, kNumClasses> power_mean_dbm{-75.0, -81.75, -88.0};
  std::array<double, kNumClasses> power_std_db{1.5, 1.5, 1.5};

  double mean(PropagationClass c) const {
    return power_mean_dbm[static_cast<std::size_t>(c)];
  }
  double std_dev(PropagationClass c) const {
    return power_std_db[static_cast<std::size_t>(c)];
  }

  void validate() const;
};

// One anchor's reading for one epoch.
struct ToaMeasurement {
  int anchor_id = 0;
  double toa_ns = 0.0;
  double first_path_power_dbm = 0.0;
};

struct SimulatedMeasurement {
  ToaMeasurement meas;
  PropagationClass true_class = PropagationClass::los;
};

// Measured TOA = geometric TOA + measurement noise + class bias mean +
// class bias noise. Realized biases can come out negative.
double synthesize_toa(const Point2& tag, const Anchor& anchor,
                      PropagationClass cls, const NlosStats& stats, Rng& rng);

double synthesize_first_path_power(PropagationClass cls,
                                   const PowerModel& model, Rng& rng);

// One measurement per anchor, link classes taken from the floorplan
// geometry. The true class rides along for calibration labeling.
// Throws if the map has fewer than 3 anchors.
std::vector<SimulatedMeasurement> simulate_epoch(const Point2& tag,
                                                 const AnchorMap& anchors,
                                                 const Floorplan& plan,
                                                 const NlosStats& stats,
                                                 const PowerModel& model,
                                                 Rng& rng);

}  // namespace uwbpos
