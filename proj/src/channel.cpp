#include "uwbpos/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace uwbpos {

void NlosStats::validate() const {
  if (!(toa_noise_std_ns >= 0.0) || !std::isfinite(toa_noise_std_ns))
    throw std::invalid_argument("toa_noise_std_ns must be non-negative");
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    if (!(bias_std_ns[i] >= 0.0) || !std::isfinite(bias_std_ns[i]))
      throw std::invalid_argument("bias_std_ns must be non-negative");
    if (!std::isfinite(bias_mean_ns[i]))
      throw std::invalid_argument("bias_mean_ns must be finite");
  }
  const auto los = static_cast<std::size_t>(PropagationClass::los);
  if (bias_mean_ns[los] != 0.0 || bias_std_ns[los] != 0.0)
    throw std::invalid_argument("LOS bias is fixed at zero");
}

void PowerModel::validate() const {
  if (!(mean(PropagationClass::los) > mean(PropagationClass::nlos)) ||
      !(mean(PropagationClass::nlos) > mean(PropagationClass::snlos)))
    throw std::invalid_argument(
        "power means must decrease from LOS to NLOS to SNLOS");
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    if (!(power_std_db[i] >= 0.0) || !std::isfinite(power_std_db[i]))
      throw std::invalid_argument("power_std_db must be non-negative");
    if (!std::isfinite(power_mean_dbm[i]))
      throw std::invalid_argument("power_mean_dbm must be finite");
  }
}

double synthesize_toa(const Point2& tag, const Anchor& anchor,
                      PropagationClass cls, const NlosStats& stats, Rng& rng) {
  const double toa = geometric_toa(tag, anchor);
  const double n_toa = draw_normal(rng, 0.0, stats.toa_noise_std_ns);
  const double n_bias = draw_normal(rng, 0.0, stats.bias_std(cls));
  return toa + n_toa + stats.bias_mean(cls) + n_bias;
}

double synthesize_first_path_power(PropagationClass cls,
                                   const PowerModel& model, Rng& rng) {
  return draw_normal(rng, model.mean(cls), model.std_dev(cls));
}

std::vector<SimulatedMeasurement> simulate_epoch(const Point2& tag,
                                                 const AnchorMap& anchors,
                                                 const Floorplan& plan,
                                                 const NlosStats& stats,
                                                 const PowerModel& model,
                                                 Rng& rng) {
  if (anchors.size() < 3)
    throw std::invalid_argument("at least 3 anchors required");
  std::vector<SimulatedMeasurement> out;
  out.reserve(anchors.size());
  for (const auto& anchor : anchors.anchors()) {
    const PropagationClass cls = classify_link_geometric(tag, anchor, plan);
    SimulatedMeasurement sm;
    sm.true_class = cls;
    sm.meas.anchor_id = anchor.id;
    sm.meas.first_path_power_dbm = synthesize_first_path_power(cls, model, rng);
    sm.meas.toa_ns = synthesize_toa(tag, anchor, cls, stats, rng);
    out.push_back(sm);
  }
  return out;
}

}  // namespace uwbpos
