#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "uwbpos/geometry.hpp"
#include "uwbpos/mitigation.hpp"

namespace uwbpos {

// Tag belief: [px, py, vx, vy] in meters and m/s with covariance P.
struct EkfState {
  Eigen::Vector4d x = Eigen::Vector4d::Zero();
  Eigen::Matrix4d P = Eigen::Matrix4d::Zero();

  Point2 position() const { return {x(0), x(1)}; }
};

// Constant-velocity motion with discrete white noise acceleration. dt and
// the acceleration intensity are configuration, the anchors define the
// TDOA measurement geometry. Innovations are handled in ns so R from the
// mitigation stage plugs in unscaled.
struct EkfModel {
  double dt_s = 0.1;
  double sigma_a_mps2 = 0.5;
  AnchorMap anchors;
  int reference_anchor_id = 0;
  bool joseph_update = false;
};

Eigen::Matrix4d make_f(double dt_s);

Eigen::Matrix4d make_q(double dt_s, double sigma_a_mps2);

EkfState predict(const EkfState& s, const EkfModel& m);

// Predicted TDOAs (ns) for the given entry ordering.
Eigen::VectorXd predict_tdoa(const Point2& pos, const AnchorMap& anchors,
                             int reference_anchor_id,
                             std::span<const int> anchor_ids);

// Rows follow anchor_ids; velocity columns are zero. Throws
// std::domain_error when pos is within 1e-9 m of any involved anchor.
Eigen::MatrixXd tdoa_jacobian(const Point2& pos, const AnchorMap& anchors,
                              int reference_anchor_id,
                              std::span<const int> anchor_ids);

// Entry ordering of the two functions above with all non-reference anchors
// in map order.
std::vector<int> non_reference_ids(const AnchorMap& anchors,
                                   int reference_anchor_id);

Eigen::VectorXd measurement_function(const Point2& pos, const EkfModel& m);
Eigen::MatrixXd jacobian(const Point2& pos, const EkfModel& m);

// Measurement update against the TDOA vector's own reference and entry
// order. Throws std::runtime_error when the innovation covariance is not
// numerically positive definite; the caller's state is left as is.
EkfState update(const EkfState& s, const TdoaVector& z, const EkfModel& m);

// Belief at startup: center of the floorplan, not moving, position sigma
// half the bounds diagonal, velocity sigma 1 m/s.
EkfState init_state(const Floorplan& plan);

}  // namespace uwbpos
