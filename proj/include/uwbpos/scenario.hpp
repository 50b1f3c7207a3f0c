#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uwbpos/channel.hpp"
#include "uwbpos/classification.hpp"
#include "uwbpos/ekf.hpp"
#include "uwbpos/mitigation.hpp"

namespace uwbpos {

enum class MitigationMode { off, on, on_diagonal_r };

std::string to_string(MitigationMode m);
MitigationMode mitigation_mode_from_string(const std::string& s);

struct EkfParams {
  double dt_s = 0.1;
  double sigma_a_mps2 = 0.5;
  bool joseph_update = false;
};

struct ReferenceConfig {
  ReferencePolicy policy = ReferencePolicy::lowest_id;
  int fixed_id = 0;
};

// Everything one experiment needs. Loaded from a config file by
// load_scenario(); defaults match the shipped default scenario.
struct ScenarioConfig {
  Floorplan plan;
  AnchorMap anchors;
  std::vector<Point2> test_points;
  int epochs_per_point = 500;
  std::uint64_t master_seed = 1;
  int replications = 1;
  NlosStats stats;
  PowerModel power;
  Thresholds thresholds;
  EkfParams ekf;
  ReferenceConfig reference;
  bool run_unmitigated = true;
  bool run_mitigated = true;
  RMode mitigated_r_mode = RMode::full;

  std::vector<MitigationMode> modes() const;
  void validate() const;
};

struct UnitResult {
  int point_index = 0;
  int replication = 0;
  Point2 final_estimate;
  double converged_error_m = 0.0;
  bool diverged = false;
  std::vector<double> epoch_errors_m;
};

struct ModeResult {
  MitigationMode mode = MitigationMode::off;
  std::vector<UnitResult> units;  // index = point * replications + rep
  std::vector<double> pooled_converged_errors_m;  // same order as units
  std::vector<double> point_errors_m;  // per point, mean over replications
  int diverged_count = 0;
};

struct RunResult {
  int num_points = 0;
  int replications = 0;
  int epochs_per_point = 0;
  std::uint64_t master_seed = 0;
  std::vector<ModeResult> modes;
  std::vector<std::string> trace_lines;  // JSONL, only when collected

  const ModeResult* find_mode(MitigationMode m) const;
};

// Per-epoch TOA preparation: raw TOAs with measurement-noise variance when
// unmitigated, bias-corrected and variance-inflated TOAs otherwise.
std::vector<CorrectedToa> prepare_epoch_toas(
    std::span<const ToaMeasurement> epoch, MitigationMode mode,
    const Thresholds& t, const NlosStats& stats);

// Reference selection for one epoch. The unmitigated baseline never
// classifies, so prefer_los degrades to lowest_id there.
int pick_reference(std::span<const ToaMeasurement> epoch, const Thresholds& t,
                   const ReferenceConfig& ref, MitigationMode mode);

// Runs every (test point, replication) work unit: simulate an epoch, feed
// the same measurements to each requested mode's filter, record position
// errors. Units are independent and parallelized with OpenMP; results are
// identical to run_scenario_serial bit for bit.
RunResult run_scenario(const ScenarioConfig& cfg, bool collect_trace = false);

// Single-threaded reference implementation.
RunResult run_scenario_serial(const ScenarioConfig& cfg,
                              bool collect_trace = false);

// Right-continuous empirical CDF over distinct values; last fraction 1.
std::vector<std::pair<double, double>> empirical_cdf(
    std::span<const double> errors_m);

struct ModeSummary {
  MitigationMode mode = MitigationMode::off;
  double median_m = 0.0;
  double p90_m = 0.0;
  int diverged = 0;
};

struct ModeComparison {
  int improved = 0;
  int equal = 0;
  int worse = 0;
  double tolerance_m = 1e-3;
};

struct Summary {
  std::vector<ModeSummary> modes;
  // Present when both the unmitigated and a mitigated mode ran; compares
  // per-point errors with a 1 mm equality tolerance.
  std::optional<ModeComparison> comparison;
};

Summary summarize(const RunResult& r);

double median(std::span<const double> values);
double quantile_nearest_rank(std::span<const double> values, double q);

// Writes cdf_<mode>.csv per mode, summary.json, and trace.jsonl when the
// result carries trace lines. Output is byte-stable for a given result.
void write_outputs(const RunResult& r, const std::string& out_dir);

}  // namespace uwbpos
