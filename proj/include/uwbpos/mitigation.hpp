#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "uwbpos/channel.hpp"
#include "uwbpos/classification.hpp"

namespace uwbpos {

// A TOA after bias correction, with the variance the filter should assign
// to it. LOS links keep the bare measurement-noise variance.
struct CorrectedToa {
  int anchor_id = 0;
  double toa_ns = 0.0;
  double variance_ns2 = 0.0;
};

enum class RMode { full, diagonal };

// Star-topology TDOA measurement: every entry is (anchor i TOA - reference
// TOA). All entries share the reference TOA noise, which the full R mode
// carries as off-diagonal covariance.
struct TdoaVector {
  int reference_anchor_id = 0;
  std::vector<int> anchor_ids;
  Eigen::VectorXd values_ns;
  Eigen::MatrixXd covariance_ns2;
};

// Classifies from the epoch's first-path power, subtracts the class bias
// mean and inflates the variance by the class bias variance.
CorrectedToa correct_toa(const ToaMeasurement& m, const Thresholds& t,
                         const NlosStats& stats);

// Unmitigated baseline: raw TOA, measurement-noise variance only.
CorrectedToa passthrough_toa(const ToaMeasurement& m, const NlosStats& stats);

// Builds the star TDOA vector against the given reference. R_ii is the sum
// of both link variances, R_ij (full mode) the shared reference variance.
// Throws if the reference is missing or fewer than 2 entries remain.
TdoaVector build_tdoa_vector(std::span<const CorrectedToa> corrected,
                             int reference_anchor_id,
                             RMode mode = RMode::full);

enum class ReferencePolicy { lowest_id, fixed_id, prefer_los };

// Picks the reference anchor for one epoch. prefer_los takes the anchor
// with the best power-classified class, lowest id breaking ties.
int select_reference(std::span<const ToaMeasurement> epoch,
                     const Thresholds& t, ReferencePolicy policy,
                     int fixed_id = 0);

}  // namespace uwbpos
