#pragma once

#include <string>
#include <vector>

#include "uwbpos/classification.hpp"
#include "uwbpos/scenario.hpp"

namespace uwbpos {

struct FloorplanFile {
  Floorplan plan;
  AnchorMap anchors;
};

// JSON site file: bounds [x0,y0,x1,y1], walls [[x1,y1,x2,y2],...],
// anchors [{id,x,y},...].
FloorplanFile load_floorplan(const std::string& path);

// JSON scenario config; the floorplan path inside is resolved relative to
// the config file's directory. Missing fields take the documented
// defaults; the result is validated.
ScenarioConfig load_scenario(const std::string& path);

// Delimited text, one sample per row: "power_dbm,class".
std::vector<LabeledPowerSample> load_power_samples(const std::string& path);

// Ranging log plus the anchor map reconstructed from its coordinates.
struct RangingData {
  std::vector<RangingSample> samples;
  AnchorMap anchors;
};

// Delimited text, one sample per row:
// "tag_x,tag_y,anchor_id,anchor_x,anchor_y,toa_ns,class". Repeated anchor
// ids must repeat the same coordinates.
RangingData load_ranging_samples(const std::string& path);

// One value per line; blank lines and '#' comments skipped.
std::vector<double> load_error_list(const std::string& path);

void write_calibration(const std::string& path, const CalibrationResult& cal,
                       const NlosStats& stats);

}  // namespace uwbpos
