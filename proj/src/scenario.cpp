#include "uwbpos/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "uwbpos/rng.hpp"

namespace uwbpos {

namespace {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

nlohmann::ordered_json tdoa_to_json(const TdoaVector& z) {
  nlohmann::ordered_json j;
  j["ref"] = z.reference_anchor_id;
  j["ids"] = z.anchor_ids;
  std::vector<double> values(z.values_ns.begin(), z.values_ns.end());
  j["values_ns"] = values;
  std::vector<std::vector<double>> r(z.covariance_ns2.rows());
  for (Eigen::Index i = 0; i < z.covariance_ns2.rows(); ++i)
    r[i].assign(z.covariance_ns2.row(i).begin(), z.covariance_ns2.row(i).end());
  j["r_ns2"] = r;
  return j;
}

struct UnitOutput {
  std::vector<UnitResult> per_mode;  // parallel to cfg.modes()
  std::string trace;
};

UnitOutput run_unit(const ScenarioConfig& cfg,
                    const std::vector<MitigationMode>& modes, int point_index,
                    int rep, bool collect_trace) {
  const Point2 tag = cfg.test_points[static_cast<std::size_t>(point_index)];
  Rng rng = make_stream(cfg.master_seed, static_cast<uint64_t>(point_index),
                        static_cast<uint64_t>(rep));

  EkfModel model;
  model.dt_s = cfg.ekf.dt_s;
  model.sigma_a_mps2 = cfg.ekf.sigma_a_mps2;
  model.joseph_update = cfg.ekf.joseph_update;
  model.anchors = cfg.anchors;

  const double diverge_threshold = 10.0 * cfg.plan.bounds.diagonal();
  const int epochs = cfg.epochs_per_point;

  UnitOutput out;
  out.per_mode.resize(modes.size());
  std::vector<EkfState> states(modes.size());
  std::vector<bool> frozen(modes.size(), false);
  for (std::size_t m = 0; m < modes.size(); ++m) {
    states[m] = init_state(cfg.plan);
    auto& u = out.per_mode[m];
    u.point_index = point_index;
    u.replication = rep;
    u.epoch_errors_m.reserve(static_cast<std::size_t>(epochs));
  }

  std::vector<ToaMeasurement> raw;
  raw.reserve(cfg.anchors.size());
  for (int epoch = 0; epoch < epochs; ++epoch) {
    const auto sim = simulate_epoch(tag, cfg.anchors, cfg.plan, cfg.stats,
                                    cfg.power, rng);
    raw.clear();
    for (const auto& s : sim) raw.push_back(s.meas);

    for (std::size_t m = 0; m < modes.size(); ++m) {
      const MitigationMode mode = modes[m];
      auto& unit = out.per_mode[m];
      if (!frozen[m]) {
        const auto corrected =
            prepare_epoch_toas(raw, mode, cfg.thresholds, cfg.stats);
        const int ref = pick_reference(raw, cfg.thresholds, cfg.reference, mode);
        const RMode r_mode = mode == MitigationMode::on_diagonal_r
                                 ? RMode::diagonal
                                 : RMode::full;
        const TdoaVector z = build_tdoa_vector(corrected, ref, r_mode);
        try {
          states[m] = predict(states[m], model);
          states[m] = update(states[m], z, model);
        } catch (const std::domain_error&) {
          // estimate landed on an anchor; keep the last state
          frozen[m] = true;
          unit.diverged = true;
        } catch (const std::runtime_error&) {
          frozen[m] = true;
          unit.diverged = true;
        }
        if (collect_trace) {
          nlohmann::ordered_json line;
          line["point"] = point_index;
          line["rep"] = rep;
          line["epoch"] = epoch;
          line["mode"] = to_string(mode);
          line["est"] = {states[m].x(0), states[m].x(1)};
          line["error_m"] = distance(states[m].position(), tag);
          line["tdoa"] = tdoa_to_json(z);
          out.trace += line.dump();
          out.trace += '\n';
        }
      }
      const double err = distance(states[m].position(), tag);
      unit.epoch_errors_m.push_back(err);
      if (err > diverge_threshold) unit.diverged = true;
    }
  }

  const int tail = epochs - static_cast<int>(std::floor(0.8 * epochs));
  for (std::size_t m = 0; m < modes.size(); ++m) {
    auto& unit = out.per_mode[m];
    double sum = 0.0;
    for (int e = epochs - tail; e < epochs; ++e)
      sum += unit.epoch_errors_m[static_cast<std::size_t>(e)];
    unit.converged_error_m = sum / tail;
    unit.final_estimate = states[m].position();
  }
  return out;
}

RunResult assemble(const ScenarioConfig& cfg,
                   const std::vector<MitigationMode>& modes,
                   std::vector<UnitOutput>& units, bool collect_trace) {
  const int points = static_cast<int>(cfg.test_points.size());
  const int reps = cfg.replications;

  RunResult r;
  r.num_points = points;
  r.replications = reps;
  r.epochs_per_point = cfg.epochs_per_point;
  r.master_seed = cfg.master_seed;
  r.modes.resize(modes.size());
  for (std::size_t m = 0; m < modes.size(); ++m) {
    auto& mode_result = r.modes[m];
    mode_result.mode = modes[m];
    mode_result.units.reserve(units.size());
    mode_result.pooled_converged_errors_m.reserve(units.size());
    mode_result.point_errors_m.assign(static_cast<std::size_t>(points), 0.0);
    for (auto& u : units) {
      auto& unit = u.per_mode[m];
      mode_result.pooled_converged_errors_m.push_back(unit.converged_error_m);
      mode_result.point_errors_m[static_cast<std::size_t>(unit.point_index)] +=
          unit.converged_error_m / reps;
      if (unit.diverged) ++mode_result.diverged_count;
      mode_result.units.push_back(std::move(unit));
    }
  }
  if (collect_trace) {
    r.trace_lines.reserve(units.size());
    for (auto& u : units) r.trace_lines.push_back(std::move(u.trace));
  }
  return r;
}

}  // namespace

std::string to_string(MitigationMode m) {
  switch (m) {
    case MitigationMode::off: return "off";
    case MitigationMode::on: return "on";
    case MitigationMode::on_diagonal_r: return "on-diagonal-r";
  }
  return "?";
}

MitigationMode mitigation_mode_from_string(const std::string& s) {
  if (s == "off") return MitigationMode::off;
  if (s == "on") return MitigationMode::on;
  if (s == "on-diagonal-r" || s == "on-diagonal-R")
    return MitigationMode::on_diagonal_r;
  throw std::invalid_argument("unknown mitigation mode '" + s + "'");
}

std::vector<MitigationMode> ScenarioConfig::modes() const {
  std::vector<MitigationMode> m;
  if (run_unmitigated) m.push_back(MitigationMode::off);
  if (run_mitigated)
    m.push_back(mitigated_r_mode == RMode::full ? MitigationMode::on
                                                : MitigationMode::on_diagonal_r);
  return m;
}

void ScenarioConfig::validate() const {
  plan.validate();
  if (anchors.size() < 3)
    throw std::invalid_argument("scenario needs at least 3 anchors");
  if (test_points.empty())
    throw std::invalid_argument("scenario needs at least one test point");
  for (const auto& p : test_points)
    if (!plan.bounds.contains(p))
      throw std::invalid_argument("test point outside floorplan bounds");
  if (epochs_per_point < 1)
    throw std::invalid_argument("epochs_per_point must be >= 1");
  if (replications < 1)
    throw std::invalid_argument("replications must be >= 1");
  if (!(ekf.dt_s > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(ekf.sigma_a_mps2 >= 0.0))
    throw std::invalid_argument("sigma_a must be non-negative");
  stats.validate();
  power.validate();
  thresholds.validate();
  if (reference.policy == ReferencePolicy::fixed_id &&
      !anchors.find(reference.fixed_id))
    throw std::invalid_argument("fixed reference anchor not in anchor map");
  if (!run_unmitigated && !run_mitigated)
    throw std::invalid_argument("no mitigation mode selected");
}

std::vector<CorrectedToa> prepare_epoch_toas(
    std::span<const ToaMeasurement> epoch, MitigationMode mode,
    const Thresholds& t, const NlosStats& stats) {
  std::vector<CorrectedToa> out;
  out.reserve(epoch.size());
  for (const auto& m : epoch)
    out.push_back(mode == MitigationMode::off ? passthrough_toa(m, stats)
                                              : correct_toa(m, t, stats));
  return out;
}

int pick_reference(std::span<const ToaMeasurement> epoch, const Thresholds& t,
                   const ReferenceConfig& ref, MitigationMode mode) {
  ReferencePolicy policy = ref.policy;
  if (mode == MitigationMode::off && policy == ReferencePolicy::prefer_los)
    policy = ReferencePolicy::lowest_id;
  return select_reference(epoch, t, policy, ref.fixed_id);
}

RunResult run_scenario(const ScenarioConfig& cfg, bool collect_trace) {
  cfg.validate();
  const auto modes = cfg.modes();
  const int points = static_cast<int>(cfg.test_points.size());
  const int reps = cfg.replications;
  const int n_units = points * reps;

  std::vector<UnitOutput> units(static_cast<std::size_t>(n_units));
#pragma omp parallel for schedule(dynamic)
  for (int u = 0; u < n_units; ++u) {
    units[static_cast<std::size_t>(u)] =
        run_unit(cfg, modes, u / reps, u % reps, collect_trace);
  }
  return assemble(cfg, modes, units, collect_trace);
}

RunResult run_scenario_serial(const ScenarioConfig& cfg, bool collect_trace) {
  cfg.validate();
  const auto modes = cfg.modes();
  const int points = static_cast<int>(cfg.test_points.size());
  const int reps = cfg.replications;
  const int n_units = points * reps;

  std::vector<UnitOutput> units(static_cast<std::size_t>(n_units));
  for (int u = 0; u < n_units; ++u) {
    units[static_cast<std::size_t>(u)] =
        run_unit(cfg, modes, u / reps, u % reps, collect_trace);
  }
  return assemble(cfg, modes, units, collect_trace);
}

const ModeResult* RunResult::find_mode(MitigationMode m) const {
  for (const auto& mr : modes)
    if (mr.mode == m) return &mr;
  return nullptr;
}

std::vector<std::pair<double, double>> empirical_cdf(
    std::span<const double> errors_m) {
  if (errors_m.empty())
    throw std::invalid_argument("empirical_cdf needs at least one value");
  std::vector<double> sorted(errors_m.begin(), errors_m.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = sorted.size();
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 == n || sorted[i + 1] != sorted[i])
      out.emplace_back(sorted[i],
                       static_cast<double>(i + 1) / static_cast<double>(n));
  }
  return out;
}

double median(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty list");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

double quantile_nearest_rank(std::span<const double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of empty list");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = sorted.size();
  const auto rank = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(n)));
  return sorted[std::clamp<std::size_t>(rank, 1, n) - 1];
}

Summary summarize(const RunResult& r) {
  Summary s;
  for (const auto& mode : r.modes) {
    ModeSummary ms;
    ms.mode = mode.mode;
    ms.median_m = median(mode.pooled_converged_errors_m);
    ms.p90_m = quantile_nearest_rank(mode.pooled_converged_errors_m, 0.9);
    ms.diverged = mode.diverged_count;
    s.modes.push_back(ms);
  }

  const ModeResult* off = r.find_mode(MitigationMode::off);
  const ModeResult* on = r.find_mode(MitigationMode::on);
  if (!on) on = r.find_mode(MitigationMode::on_diagonal_r);
  if (off && on) {
    ModeComparison cmp;
    for (int p = 0; p < r.num_points; ++p) {
      const double e_off = off->point_errors_m[static_cast<std::size_t>(p)];
      const double e_on = on->point_errors_m[static_cast<std::size_t>(p)];
      if (std::abs(e_on - e_off) <= cmp.tolerance_m)
        ++cmp.equal;
      else if (e_on < e_off)
        ++cmp.improved;
      else
        ++cmp.worse;
    }
    s.comparison = cmp;
  }
  return s;
}

void write_outputs(const RunResult& r, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  for (const auto& mode : r.modes) {
    std::string name = to_string(mode.mode);
    std::replace(name.begin(), name.end(), '-', '_');
    std::ofstream csv(fs::path(out_dir) / ("cdf_" + name + ".csv"),
                      std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write CDF file in " + out_dir);
    csv << "error_m,cumulative_fraction\n";
    for (const auto& [err, frac] : empirical_cdf(mode.pooled_converged_errors_m))
      csv << format_double(err) << ',' << format_double(frac) << '\n';
  }

  const Summary s = summarize(r);
  nlohmann::ordered_json j;
  j["config"] = {{"points", r.num_points},
                 {"replications", r.replications},
                 {"epochs_per_point", r.epochs_per_point},
                 {"seed", r.master_seed}};
  nlohmann::ordered_json modes_json;
  for (const auto& ms : s.modes) {
    modes_json[to_string(ms.mode)] = {{"median_m", ms.median_m},
                                      {"p90_m", ms.p90_m},
                                      {"diverged", ms.diverged}};
  }
  j["modes"] = modes_json;
  if (s.comparison) {
    j["comparison"] = {{"improved", s.comparison->improved},
                       {"equal", s.comparison->equal},
                       {"worse", s.comparison->worse},
                       {"tolerance_m", s.comparison->tolerance_m}};
  }
  nlohmann::ordered_json per_point = nlohmann::ordered_json::array();
  for (int p = 0; p < r.num_points; ++p) {
    nlohmann::ordered_json row;
    row["index"] = p;
    for (const auto& mode : r.modes) {
      row["error_m_" + to_string(mode.mode)] =
          mode.point_errors_m[static_cast<std::size_t>(p)];
    }
    per_point.push_back(row);
  }
  j["per_point"] = per_point;

  std::ofstream summary(fs::path(out_dir) / "summary.json", std::ios::binary);
  if (!summary)
    throw std::runtime_error("cannot write summary.json in " + out_dir);
  summary << j.dump(2) << '\n';

  if (!r.trace_lines.empty()) {
    std::ofstream trace(fs::path(out_dir) / "trace.jsonl", std::ios::binary);
    if (!trace)
      throw std::runtime_error("cannot write trace.jsonl in " + out_dir);
    for (const auto& line : r.trace_lines) trace << line;
  }
}

}  // namespace uwbpos
