#include "uwbpos/classification.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace uwbpos {

void Thresholds::validate() const {
  if (!std::isfinite(los_floor_dbm) || !std::isfinite(nlos_floor_dbm))
    throw std::invalid_argument("thresholds must be finite");
  if (!(los_floor_dbm > nlos_floor_dbm))
    throw std::invalid_argument("los_floor must exceed nlos_floor");
}

PropagationClass classify_power(double power_dbm, const Thresholds& t) {
  if (power_dbm > t.los_floor_dbm) return PropagationClass::los;
  if (power_dbm > t.nlos_floor_dbm) return PropagationClass::nlos;
  return PropagationClass::snlos;
}

std::vector<double> threshold_grid(
    std::span<const LabeledPowerSample> samples) {
  if (samples.empty()) throw std::invalid_argument("no samples");
  double lo = samples[0].power_dbm;
  double hi = samples[0].power_dbm;
  for (const auto& s : samples) {
    lo = std::min(lo, s.power_dbm);
    hi = std::max(hi, s.power_dbm);
  }
  lo -= 1.0;
  hi += 1.0;
  const double step = 0.1;
  const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (int k = 0; k < count; ++k) grid[k] = lo + k * step;
  return grid;
}

namespace {

struct ScanData {
  std::vector<double> grid;
  // cnt_le[c][k]: samples of class c with power <= grid[k]
  std::array<std::vector<long>, kNumClasses> cnt_le;
  std::array<long, kNumClasses> n_class{};
  long n_total = 0;
};

struct Candidate {
  long correct = -1;
  double min_recall = -1.0;
  int los_idx = 0;
  int nlos_idx = 0;
};

// Strict total order over candidates, so merging thread-local winners is
// order-independent.
bool better(const Candidate& a, const Candidate& b) {
  if (a.correct != b.correct) return a.correct > b.correct;
  if (a.min_recall != b.min_recall) return a.min_recall > b.min_recall;
  if (a.los_idx != b.los_idx) return a.los_idx < b.los_idx;
  return a.nlos_idx < b.nlos_idx;
}

ScanData prepare_scan(std::span<const LabeledPowerSample> samples) {
  ScanData d;
  d.grid = threshold_grid(samples);
  d.n_total = static_cast<long>(samples.size());

  std::array<std::vector<double>, kNumClasses> powers;
  for (const auto& s : samples) {
    const auto c = static_cast<std::size_t>(s.true_class);
    powers[c].push_back(s.power_dbm);
  }
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    d.n_class[c] = static_cast<long>(powers[c].size());
    if (d.n_class[c] == 0)
      throw std::invalid_argument(
          "calibration needs at least one sample of each class");
    std::sort(powers[c].begin(), powers[c].end());
    d.cnt_le[c].resize(d.grid.size());
    for (std::size_t k = 0; k < d.grid.size(); ++k) {
      d.cnt_le[c][k] = std::upper_bound(powers[c].begin(), powers[c].end(),
                                        d.grid[k]) -
                       powers[c].begin();
    }
  }
  return d;
}

Candidate evaluate_pair(const ScanData& d, int nlos_idx, int los_idx) {
  const auto los = static_cast<std::size_t>(PropagationClass::los);
  const auto nlos = static_cast<std::size_t>(PropagationClass::nlos);
  const auto snlos = static_cast<std::size_t>(PropagationClass::snlos);

  const long c_los = d.n_class[los] - d.cnt_le[los][los_idx];
  const long c_nlos = d.cnt_le[nlos][los_idx] - d.cnt_le[nlos][nlos_idx];
  const long c_snlos = d.cnt_le[snlos][nlos_idx];

  Candidate cand;
  cand.correct = c_los + c_nlos + c_snlos;
  cand.min_recall = std::min({static_cast<double>(c_los) / d.n_class[los],
                              static_cast<double>(c_nlos) / d.n_class[nlos],
                              static_cast<double>(c_snlos) / d.n_class[snlos]});
  cand.los_idx = los_idx;
  cand.nlos_idx = nlos_idx;
  return cand;
}

CalibrationResult to_result(const ScanData& d, const Candidate& best) {
  CalibrationResult r;
  r.thresholds.los_floor_dbm = d.grid[best.los_idx];
  r.thresholds.nlos_floor_dbm = d.grid[best.nlos_idx];
  r.success_rate = static_cast<double>(best.correct) / d.n_total;
  return r;
}

}  // namespace

CalibrationResult calibrate_thresholds_serial(
    std::span<const LabeledPowerSample> samples) {
  const ScanData d = prepare_scan(samples);
  const int g = static_cast<int>(d.grid.size());
  Candidate best;
  for (int j = 1; j < g; ++j) {
    for (int i = 0; i < j; ++i) {
      const Candidate cand = evaluate_pair(d, i, j);
      if (better(cand, best)) best = cand;
    }
  }
  return to_result(d, best);
}

CalibrationResult calibrate_thresholds(
    std::span<const LabeledPowerSample> samples) {
  const ScanData d = prepare_scan(samples);
  const int g = static_cast<int>(d.grid.size());
  Candidate best;
#pragma omp parallel
  {
    Candidate local;
#pragma omp for schedule(static) nowait
    for (int j = 1; j < g; ++j) {
      for (int i = 0; i < j; ++i) {
        const Candidate cand = evaluate_pair(d, i, j);
        if (better(cand, local)) local = cand;
      }
    }
#pragma omp critical
    {
      if (better(local, best)) best = local;
    }
  }
  return to_result(d, best);
}

NlosStats estimate_bias_stats(std::span<const RangingSample> samples,
                              const AnchorMap& anchors) {
  std::array<std::vector<double>, kNumClasses> residuals;
  for (const auto& s : samples) {
    const Anchor& anchor = anchors.at(s.anchor_id);
    const double bias = s.toa_ns - geometric_toa(s.tag_position, anchor);
    residuals[static_cast<std::size_t>(s.true_class)].push_back(bias);
  }

  NlosStats stats;
  for (const PropagationClass cls :
       {PropagationClass::nlos, PropagationClass::snlos}) {
    const auto& r = residuals[static_cast<std::size_t>(cls)];
    if (r.size() < 2)
      throw std::invalid_argument("need at least 2 samples of class " +
                                  to_string(cls) + ", got " +
                                  std::to_string(r.size()));
    double mean = 0.0;
    for (double v : r) mean += v;
    mean /= static_cast<double>(r.size());
    double ss = 0.0;
    for (double v : r) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(r.size() - 1));
    stats.bias_mean_ns[static_cast<std::size_t>(cls)] = mean;
    stats.bias_std_ns[static_cast<std::size_t>(cls)] = sd;
  }
  return stats;
}

}  // namespace uwbpos
