#include "uwbpos/ekf.hpp"

#include <cmath>
#include <stdexcept>

namespace uwbpos {

namespace {

constexpr double kMinAnchorDistance = 1e-9;  // m

Eigen::Vector2d unit_from_anchor(const Point2& pos, const Anchor& a,
                                 bool& too_close) {
  const double dx = pos.x - a.position.x;
  const double dy = pos.y - a.position.y;
  const double r = std::hypot(dx, dy);
  if (r <= kMinAnchorDistance) {
    too_close = true;
    return Eigen::Vector2d::Zero();
  }
  return {dx / r, dy / r};
}

}  // namespace

Eigen::Matrix4d make_f(double dt_s) {
  Eigen::Matrix4d f = Eigen::Matrix4d::Identity();
  f(0, 2) = dt_s;
  f(1, 3) = dt_s;
  return f;
}

Eigen::Matrix4d make_q(double dt_s, double sigma_a_mps2) {
  const double q = sigma_a_mps2 * sigma_a_mps2;
  const double dt2 = dt_s * dt_s;
  const double dt3 = dt2 * dt_s;
  const double dt4 = dt2 * dt2;
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(0, 0) = m(1, 1) = q * dt4 / 4.0;
  m(2, 2) = m(3, 3) = q * dt2;
  m(0, 2) = m(2, 0) = q * dt3 / 2.0;
  m(1, 3) = m(3, 1) = q * dt3 / 2.0;
  return m;
}

EkfState predict(const EkfState& s, const EkfModel& m) {
  const Eigen::Matrix4d f = make_f(m.dt_s);
  EkfState out;
  out.x = f * s.x;
  out.P = f * s.P * f.transpose() + make_q(m.dt_s, m.sigma_a_mps2);
  out.P = 0.5 * (out.P + out.P.transpose());
  return out;
}

std::vector<int> non_reference_ids(const AnchorMap& anchors,
                                   int reference_anchor_id) {
  std::vector<int> ids;
  ids.reserve(anchors.size());
  for (const auto& a : anchors.anchors())
    if (a.id != reference_anchor_id) ids.push_back(a.id);
  return ids;
}

Eigen::VectorXd predict_tdoa(const Point2& pos, const AnchorMap& anchors,
                             int reference_anchor_id,
                             std::span<const int> anchor_ids) {
  const Anchor& ref = anchors.at(reference_anchor_id);
  const double d_ref = distance(pos, ref.position);
  Eigen::VectorXd h(static_cast<Eigen::Index>(anchor_ids.size()));
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    const Anchor& a = anchors.at(anchor_ids[i]);
    h(i) = (distance(pos, a.position) - d_ref) / kSpeedOfLightMPerNs;
  }
  return h;
}

Eigen::MatrixXd tdoa_jacobian(const Point2& pos, const AnchorMap& anchors,
                              int reference_anchor_id,
                              std::span<const int> anchor_ids) {
  bool too_close = false;
  const Eigen::Vector2d u_ref =
      unit_from_anchor(pos, anchors.at(reference_anchor_id), too_close);
  Eigen::MatrixXd jac =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(anchor_ids.size()), 4);
  for (Eigen::Index i = 0; i < jac.rows(); ++i) {
    const Eigen::Vector2d u_i =
        unit_from_anchor(pos, anchors.at(anchor_ids[i]), too_close);
    jac(i, 0) = (u_i.x() - u_ref.x()) / kSpeedOfLightMPerNs;
    jac(i, 1) = (u_i.y() - u_ref.y()) / kSpeedOfLightMPerNs;
  }
  if (too_close)
    throw std::domain_error(
        "TDOA gradient singular: position coincides with an anchor");
  return jac;
}

Eigen::VectorXd measurement_function(const Point2& pos, const EkfModel& m) {
  const auto ids = non_reference_ids(m.anchors, m.reference_anchor_id);
  return predict_tdoa(pos, m.anchors, m.reference_anchor_id, ids);
}

Eigen::MatrixXd jacobian(const Point2& pos, const EkfModel& m) {
  const auto ids = non_reference_ids(m.anchors, m.reference_anchor_id);
  return tdoa_jacobian(pos, m.anchors, m.reference_anchor_id, ids);
}

EkfState update(const EkfState& s, const TdoaVector& z, const EkfModel& m) {
  const auto n = z.values_ns.size();
  if (n < 2) throw std::invalid_argument("need at least 2 TDOA entries");
  if (static_cast<Eigen::Index>(z.anchor_ids.size()) != n ||
      z.covariance_ns2.rows() != n || z.covariance_ns2.cols() != n)
    throw std::invalid_argument("inconsistent TDOA vector dimensions");

  const Point2 pos = s.position();
  const Eigen::MatrixXd jac =
      tdoa_jacobian(pos, m.anchors, z.reference_anchor_id, z.anchor_ids);
  const Eigen::VectorXd h =
      predict_tdoa(pos, m.anchors, z.reference_anchor_id, z.anchor_ids);

  Eigen::MatrixXd innov_cov =
      jac * s.P * jac.transpose() + z.covariance_ns2;
  innov_cov = 0.5 * (innov_cov + innov_cov.transpose());
  const Eigen::LLT<Eigen::MatrixXd> llt(innov_cov);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("innovation covariance is numerically singular");

  const Eigen::MatrixXd pht = s.P * jac.transpose();
  const Eigen::MatrixXd gain = llt.solve(pht.transpose()).transpose();

  EkfState out;
  out.x = s.x + gain * (z.values_ns - h);
  if (m.joseph_update) {
    const Eigen::Matrix4d a = Eigen::Matrix4d::Identity() - gain * jac;
    out.P = a * s.P * a.transpose() +
            gain * z.covariance_ns2 * gain.transpose();
  } else {
    out.P = (Eigen::Matrix4d::Identity() - gain * jac) * s.P;
  }
  out.P = 0.5 * (out.P + out.P.transpose());
  return out;
}

EkfState init_state(const Floorplan& plan) {
  plan.validate();
  const Point2 c = plan.bounds.center();
  const double sigma_p = 0.5 * plan.bounds.diagonal();
  const double sigma_v = 1.0;
  EkfState s;
  s.x << c.x, c.y, 0.0, 0.0;
  s.P.diagonal() << sigma_p * sigma_p, sigma_p * sigma_p, sigma_v * sigma_v,
      sigma_v * sigma_v;
  return s;
}

}  // namespace uwbpos
