// Independent brute-force reference implementations the tests compare
// against. Deliberately written with different algorithms than the library
// (parametric line intersection, O(G^2 N) threshold scan, O(n^2) CDF,
// finite differences) so agreement is meaningful.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "uwbpos/classification.hpp"
#include "uwbpos/ekf.hpp"
#include "uwbpos/geometry.hpp"

namespace oracle {

inline double cross(const uwbpos::Point2& o, const uwbpos::Point2& a,
                    const uwbpos::Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Parametric segment intersection: solve a1 + t*d1 = a2 + u*d2 and accept
// t, u in [0, 1]; parallel segments fall back to collinear overlap checks.
inline bool segments_intersect(const uwbpos::Segment& s,
                               const uwbpos::Segment& t) {
  const double d1x = s.b.x - s.a.x, d1y = s.b.y - s.a.y;
  const double d2x = t.b.x - t.a.x, d2y = t.b.y - t.a.y;
  const double denom = d1x * d2y - d1y * d2x;
  const double rx = t.a.x - s.a.x, ry = t.a.y - s.a.y;
  if (denom != 0.0) {
    const double tp = (rx * d2y - ry * d2x) / denom;
    const double up = (rx * d1y - ry * d1x) / denom;
    return tp >= 0.0 && tp <= 1.0 && up >= 0.0 && up <= 1.0;
  }
  if (rx * d1y - ry * d1x != 0.0) return false;  // parallel, not collinear
  // Collinear: project endpoints on the dominant axis and compare spans.
  auto key = [&](const uwbpos::Point2& p) {
    return std::abs(d1x) >= std::abs(d1y) ? p.x : p.y;
  };
  double s0 = key(s.a), s1 = key(s.b), t0 = key(t.a), t1 = key(t.b);
  if (s0 > s1) std::swap(s0, s1);
  if (t0 > t1) std::swap(t0, t1);
  if (s0 == s1 && t0 == t1)  // both degenerate to points on one axis
    return s.a.x == t.a.x && s.a.y == t.a.y;
  return std::max(s0, t0) <= std::min(s1, t1);
}

inline int count_crossings(const uwbpos::Point2& a, const uwbpos::Point2& b,
                           const uwbpos::Floorplan& plan) {
  int n = 0;
  for (const auto& w : plan.walls)
    if (oracle::segments_intersect({a, b}, w)) ++n;
  return n;
}

// Exhaustive threshold search over all (nlos, los) grid pairs, classifying
// every sample per pair. Shares the candidate grid with the library (the
// grid construction has its own tests); the search is independent.
inline uwbpos::CalibrationResult calibrate(
    std::span<const uwbpos::LabeledPowerSample> samples,
    std::span<const double> grid) {
  using uwbpos::PropagationClass;
  const double n = static_cast<double>(samples.size());
  bool have_best = false;
  std::size_t best_correct = 0;
  double best_min_recall = -1.0;
  std::size_t best_lo = 0, best_hi = 0;

  std::size_t class_totals[3] = {0, 0, 0};
  for (const auto& s : samples)
    ++class_totals[static_cast<int>(s.true_class)];

  for (std::size_t hi = 0; hi < grid.size(); ++hi) {
    for (std::size_t lo = 0; lo < hi; ++lo) {
      uwbpos::Thresholds t{grid[hi], grid[lo]};
      std::size_t correct_per_class[3] = {0, 0, 0};
      for (const auto& s : samples)
        if (uwbpos::classify_power(s.power_dbm, t) == s.true_class)
          ++correct_per_class[static_cast<int>(s.true_class)];
      const std::size_t correct =
          correct_per_class[0] + correct_per_class[1] + correct_per_class[2];
      double min_recall = 1.0;
      for (int c = 0; c < 3; ++c)
        if (class_totals[c] > 0)
          min_recall = std::min(min_recall,
                                static_cast<double>(correct_per_class[c]) /
                                    static_cast<double>(class_totals[c]));
      const bool better =
          !have_best || correct > best_correct ||
          (correct == best_correct &&
           (min_recall > best_min_recall ||
            (min_recall == best_min_recall &&
             (hi < best_hi || (hi == best_hi && lo < best_lo)))));
      if (better) {
        have_best = true;
        best_correct = correct;
        best_min_recall = min_recall;
        best_lo = lo;
        best_hi = hi;
      }
    }
  }
  return {{grid[best_hi], grid[best_lo]},
          static_cast<double>(best_correct) / n};
}

// O(n^2) counting CDF over distinct values.
inline std::vector<std::pair<double, double>> cdf(
    std::span<const double> errors) {
  std::vector<double> vals(errors.begin(), errors.end());
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  std::vector<std::pair<double, double>> out;
  for (double v : vals) {
    std::size_t le = 0;
    for (double e : errors)
      if (e <= v) ++le;
    out.emplace_back(v, static_cast<double>(le) /
                            static_cast<double>(errors.size()));
  }
  return out;
}

// Central finite differences of the TDOA measurement function over the
// position components; velocity columns are exactly zero.
inline Eigen::MatrixXd fd_jacobian(const uwbpos::Point2& pos,
                                   const uwbpos::AnchorMap& anchors,
                                   int reference_id,
                                   std::span<const int> ids,
                                   double h = 1e-5) {
  Eigen::MatrixXd H =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ids.size()), 4);
  for (int c = 0; c < 2; ++c) {
    uwbpos::Point2 plus = pos, minus = pos;
    (c == 0 ? plus.x : plus.y) += h;
    (c == 0 ? minus.x : minus.y) -= h;
    Eigen::VectorXd hp =
        uwbpos::predict_tdoa(plus, anchors, reference_id, ids);
    Eigen::VectorXd hm =
        uwbpos::predict_tdoa(minus, anchors, reference_id, ids);
    H.col(c) = (hp - hm) / (2.0 * h);
  }
  return H;
}

inline double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_std(std::span<const double> v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace oracle
