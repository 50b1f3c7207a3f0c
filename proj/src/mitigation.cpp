#include "uwbpos/mitigation.hpp"

#include <algorithm>
#include <stdexcept>

namespace uwbpos {

CorrectedToa correct_toa(const ToaMeasurement& m, const Thresholds& t,
                         const NlosStats& stats) {
  const PropagationClass cls = classify_power(m.first_path_power_dbm, t);
  const double sigma_t = stats.toa_noise_std_ns;
  const double sigma_b = stats.bias_std(cls);
  CorrectedToa out;
  out.anchor_id = m.anchor_id;
  out.toa_ns = m.toa_ns - stats.bias_mean(cls);
  out.variance_ns2 = sigma_t * sigma_t + sigma_b * sigma_b;
  return out;
}

CorrectedToa passthrough_toa(const ToaMeasurement& m, const NlosStats& stats) {
  const double sigma_t = stats.toa_noise_std_ns;
  return {m.anchor_id, m.toa_ns, sigma_t * sigma_t};
}

TdoaVector build_tdoa_vector(std::span<const CorrectedToa> corrected,
                             int reference_anchor_id, RMode mode) {
  const CorrectedToa* ref = nullptr;
  for (const auto& c : corrected)
    if (c.anchor_id == reference_anchor_id) ref = &c;
  if (!ref)
    throw std::invalid_argument("reference anchor " +
                                std::to_string(reference_anchor_id) +
                                " not among corrected TOAs");
  const auto n = static_cast<Eigen::Index>(corrected.size()) - 1;
  if (n < 2)
    throw std::invalid_argument("need at least 2 TDOA entries");

  TdoaVector z;
  z.reference_anchor_id = reference_anchor_id;
  z.anchor_ids.reserve(n);
  z.values_ns.resize(n);
  z.covariance_ns2.resize(n, n);

  Eigen::Index i = 0;
  std::vector<double> variances(n);
  for (const auto& c : corrected) {
    if (c.anchor_id == reference_anchor_id) continue;
    z.anchor_ids.push_back(c.anchor_id);
    z.values_ns(i) = c.toa_ns - ref->toa_ns;
    variances[i] = c.variance_ns2;
    ++i;
  }

  if (mode == RMode::full)
    z.covariance_ns2.setConstant(ref->variance_ns2);
  else
    z.covariance_ns2.setZero();
  for (Eigen::Index k = 0; k < n; ++k)
    z.covariance_ns2(k, k) = variances[k] + ref->variance_ns2;

  // All-zero variances (noiseless configs) would make R singular; a tiny
  // ridge keeps it positive definite without disturbing regular inputs.
  Eigen::LLT<Eigen::MatrixXd> llt(z.covariance_ns2);
  if (llt.info() != Eigen::Success)
    z.covariance_ns2 += 1e-12 * Eigen::MatrixXd::Identity(n, n);

  return z;
}

int select_reference(std::span<const ToaMeasurement> epoch,
                     const Thresholds& t, ReferencePolicy policy,
                     int fixed_id) {
  if (epoch.empty()) throw std::invalid_argument("empty epoch");
  switch (policy) {
    case ReferencePolicy::fixed_id: {
      for (const auto& m : epoch)
        if (m.anchor_id == fixed_id) return fixed_id;
      throw std::invalid_argument("fixed reference anchor " +
                                  std::to_string(fixed_id) + " not in epoch");
    }
    case ReferencePolicy::lowest_id: {
      int best = epoch[0].anchor_id;
      for (const auto& m : epoch) best = std::min(best, m.anchor_id);
      return best;
    }
    case ReferencePolicy::prefer_los: {
      int best_id = epoch[0].anchor_id;
      int best_rank = static_cast<int>(
          classify_power(epoch[0].first_path_power_dbm, t));
      for (const auto& m : epoch) {
        const int rank =
            static_cast<int>(classify_power(m.first_path_power_dbm, t));
        if (rank < best_rank ||
            (rank == best_rank && m.anchor_id < best_id)) {
          best_rank = rank;
          best_id = m.anchor_id;
        }
      }
      return best_id;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace uwbpos
