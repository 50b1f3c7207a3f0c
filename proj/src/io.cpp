#include "uwbpos/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace uwbpos {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error(path + ": " + what);
}

// Typo protection: configs with unrecognized keys are rejected rather
// than silently half-applied.
void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& path, const std::string& ctx) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) known = true;
    if (!known) fail(path, ctx + ": unknown key \"" + item.key() + "\"");
  }
}

double num_at(const json& j, std::size_t i, const std::string& path,
              const std::string& ctx) {
  if (i >= j.size() || !j[i].is_number())
    fail(path, ctx + ": expected a number at index " + std::to_string(i));
  return j[i].get<double>();
}

double num_field(const json& j, const char* key, const std::string& path,
                 const std::string& ctx) {
  if (!j.contains(key) || !j.at(key).is_number())
    fail(path, ctx + ": missing numeric \"" + std::string(key) + "\"");
  return j.at(key).get<double>();
}

ReferencePolicy policy_from_string(const std::string& s,
                                   const std::string& path) {
  if (s == "lowest_id") return ReferencePolicy::lowest_id;
  if (s == "fixed_id") return ReferencePolicy::fixed_id;
  if (s == "prefer_los") return ReferencePolicy::prefer_los;
  fail(path, "unknown reference policy \"" + s + "\"");
}

FloorplanFile floorplan_from_json(const json& j, const std::string& path) {
  check_keys(j, {"bounds", "walls", "anchors"}, path, "floorplan");
  if (!j.contains("bounds") || !j.at("bounds").is_array() ||
      j.at("bounds").size() != 4)
    fail(path, "bounds must be [x0, y0, x1, y1]");
  const json& b = j.at("bounds");

  FloorplanFile f;
  f.plan.bounds = {num_at(b, 0, path, "bounds"), num_at(b, 1, path, "bounds"),
                   num_at(b, 2, path, "bounds"), num_at(b, 3, path, "bounds")};

  if (j.contains("walls")) {
    if (!j.at("walls").is_array()) fail(path, "walls must be an array");
    for (const json& w : j.at("walls")) {
      if (!w.is_array() || w.size() != 4)
        fail(path, "each wall must be [x1, y1, x2, y2]");
      f.plan.walls.push_back({{num_at(w, 0, path, "wall"),
                               num_at(w, 1, path, "wall")},
                              {num_at(w, 2, path, "wall"),
                               num_at(w, 3, path, "wall")}});
    }
  }
  f.plan.validate();

  if (!j.contains("anchors") || !j.at("anchors").is_array())
    fail(path, "anchors must be an array");
  std::vector<Anchor> anchors;
  for (const json& a : j.at("anchors")) {
    if (!a.is_object()) fail(path, "each anchor must be {id, x, y}");
    check_keys(a, {"id", "x", "y"}, path, "anchor");
    Anchor an;
    an.id = static_cast<int>(num_field(a, "id", path, "anchor"));
    an.position = {num_field(a, "x", path, "anchor"),
                   num_field(a, "y", path, "anchor")};
    anchors.push_back(an);
  }
  try {
    f.anchors = AnchorMap(std::move(anchors));
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return f;
}

void load_class_pair(const json& j, const char* key, PropagationClass cls,
                     NlosStats& stats, const std::string& path) {
  if (!j.contains(key)) return;
  const json& c = j.at(key);
  check_keys(c, {"bias_mean_ns", "bias_std_ns"}, path, key);
  auto idx = static_cast<std::size_t>(cls);
  if (c.contains("bias_mean_ns"))
    stats.bias_mean_ns[idx] = num_field(c, "bias_mean_ns", path, key);
  if (c.contains("bias_std_ns"))
    stats.bias_std_ns[idx] = num_field(c, "bias_std_ns", path, key);
}

void load_power_entry(const json& j, const char* key, PropagationClass cls,
                      PowerModel& model, const std::string& path) {
  if (!j.contains(key)) return;
  const json& c = j.at(key);
  check_keys(c, {"mean_dbm", "std_db"}, path, key);
  auto idx = static_cast<std::size_t>(cls);
  if (c.contains("mean_dbm"))
    model.power_mean_dbm[idx] = num_field(c, "mean_dbm", path, key);
  if (c.contains("std_db"))
    model.power_std_db[idx] = num_field(c, "std_db", path, key);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    auto b = field.find_first_not_of(" \t\r");
    auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string()
                                         : field.substr(b, e - b + 1));
  }
  return out;
}

double parse_double(const std::string& s, const std::string& path, int line) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    fail(path, "line " + std::to_string(line) + ": bad number \"" + s + "\"");
  return v;
}

// Calls fn(fields, line_number) for every non-blank, non-comment row.
template <typename Fn>
void for_each_row(const std::string& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    fn(split_csv(line), lineno);
  }
}

}  // namespace

FloorplanFile load_floorplan(const std::string& path) {
  return floorplan_from_json(parse_json_file(path), path);
}

ScenarioConfig load_scenario(const std::string& path) {
  const json j = parse_json_file(path);
  if (!j.is_object()) fail(path, "config must be a JSON object");
  check_keys(j,
             {"floorplan", "test_points", "epochs_per_point", "seed",
              "replications", "mitigation", "reference_anchor", "nlos_stats",
              "power_model", "thresholds", "ekf"},
             path, "config");

  if (!j.contains("floorplan") || !j.at("floorplan").is_string())
    fail(path, "missing \"floorplan\" path");
  std::filesystem::path fp(j.at("floorplan").get<std::string>());
  if (fp.is_relative())
    fp = std::filesystem::path(path).parent_path() / fp;

  ScenarioConfig cfg;
  FloorplanFile site = load_floorplan(fp.string());
  cfg.plan = std::move(site.plan);
  cfg.anchors = std::move(site.anchors);

  if (!j.contains("test_points") || !j.at("test_points").is_array() ||
      j.at("test_points").empty())
    fail(path, "test_points must be a non-empty array of [x, y]");
  for (const json& p : j.at("test_points")) {
    if (!p.is_array() || p.size() != 2)
      fail(path, "each test point must be [x, y]");
    cfg.test_points.push_back(
        {num_at(p, 0, path, "test_point"), num_at(p, 1, path, "test_point")});
  }

  if (j.contains("epochs_per_point"))
    cfg.epochs_per_point = j.at("epochs_per_point").get<int>();
  if (j.contains("seed")) cfg.master_seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("replications"))
    cfg.replications = j.at("replications").get<int>();

  if (j.contains("mitigation")) {
    const std::string m = j.at("mitigation").get<std::string>();
    if (m == "both") {
      cfg.run_unmitigated = cfg.run_mitigated = true;
    } else if (m == "off" || m == "on" || m == "on-diagonal-r") {
      MitigationMode mode = mitigation_mode_from_string(m);
      cfg.run_unmitigated = mode == MitigationMode::off;
      cfg.run_mitigated = !cfg.run_unmitigated;
      if (mode == MitigationMode::on_diagonal_r)
        cfg.mitigated_r_mode = RMode::diagonal;
    } else {
      fail(path, "mitigation must be off, on, on-diagonal-r or both, got \"" +
                     m + "\"");
    }
  }

  if (j.contains("reference_anchor")) {
    const json& r = j.at("reference_anchor");
    check_keys(r, {"policy", "id"}, path, "reference_anchor");
    if (r.contains("policy"))
      cfg.reference.policy =
          policy_from_string(r.at("policy").get<std::string>(), path);
    if (r.contains("id")) cfg.reference.fixed_id = r.at("id").get<int>();
  }

  if (j.contains("nlos_stats")) {
    const json& s = j.at("nlos_stats");
    check_keys(s, {"toa_noise_std_ns", "nlos", "snlos"}, path, "nlos_stats");
    if (s.contains("toa_noise_std_ns"))
      cfg.stats.toa_noise_std_ns =
          num_field(s, "toa_noise_std_ns", path, "nlos_stats");
    load_class_pair(s, "nlos", PropagationClass::nlos, cfg.stats, path);
    load_class_pair(s, "snlos", PropagationClass::snlos, cfg.stats, path);
  }

  if (j.contains("power_model")) {
    const json& p = j.at("power_model");
    check_keys(p, {"los", "nlos", "snlos"}, path, "power_model");
    load_power_entry(p, "los", PropagationClass::los, cfg.power, path);
    load_power_entry(p, "nlos", PropagationClass::nlos, cfg.power, path);
    load_power_entry(p, "snlos", PropagationClass::snlos, cfg.power, path);
  }

  if (j.contains("thresholds")) {
    const json& t = j.at("thresholds");
    check_keys(t, {"los_floor_dbm", "nlos_floor_dbm"}, path, "thresholds");
    if (t.contains("los_floor_dbm"))
      cfg.thresholds.los_floor_dbm =
          num_field(t, "los_floor_dbm", path, "thresholds");
    if (t.contains("nlos_floor_dbm"))
      cfg.thresholds.nlos_floor_dbm =
          num_field(t, "nlos_floor_dbm", path, "thresholds");
  }

  if (j.contains("ekf")) {
    const json& e = j.at("ekf");
    check_keys(e, {"dt_s", "sigma_a_mps2", "joseph_update"}, path, "ekf");
    if (e.contains("dt_s")) cfg.ekf.dt_s = num_field(e, "dt_s", path, "ekf");
    if (e.contains("sigma_a_mps2"))
      cfg.ekf.sigma_a_mps2 = num_field(e, "sigma_a_mps2", path, "ekf");
    if (e.contains("joseph_update"))
      cfg.ekf.joseph_update = e.at("joseph_update").get<bool>();
  }

  try {
    cfg.validate();
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return cfg;
}

std::vector<LabeledPowerSample> load_power_samples(const std::string& path) {
  std::vector<LabeledPowerSample> out;
  for_each_row(path, [&](const std::vector<std::string>& f, int line) {
    if (f.size() != 2)
      fail(path, "line " + std::to_string(line) + ": expected power, class");
    LabeledPowerSample s;
    s.power_dbm = parse_double(f[0], path, line);
    s.true_class = propagation_class_from_string(f[1]);
    out.push_back(s);
  });
  if (out.empty()) fail(path, "no samples");
  return out;
}

RangingData load_ranging_samples(const std::string& path) {
  std::vector<RangingSample> samples;
  std::map<int, Point2> anchor_pos;
  for_each_row(path, [&](const std::vector<std::string>& f, int line) {
    if (f.size() != 7)
      fail(path, "line " + std::to_string(line) +
                     ": expected tag_x, tag_y, anchor_id, anchor_x, "
                     "anchor_y, toa, class");
    RangingSample s;
    s.tag_position = {parse_double(f[0], path, line),
                      parse_double(f[1], path, line)};
    s.anchor_id = static_cast<int>(parse_double(f[2], path, line));
    const Point2 pos{parse_double(f[3], path, line),
                     parse_double(f[4], path, line)};
    s.toa_ns = parse_double(f[5], path, line);
    s.true_class = propagation_class_from_string(f[6]);
    auto [it, inserted] = anchor_pos.emplace(s.anchor_id, pos);
    if (!inserted && (it->second.x != pos.x || it->second.y != pos.y))
      fail(path, "line " + std::to_string(line) + ": anchor " +
                     std::to_string(s.anchor_id) +
                     " repeats with different coordinates");
    samples.push_back(s);
  });
  if (samples.empty()) fail(path, "no samples");
  std::vector<Anchor> anchors;
  for (const auto& [id, pos] : anchor_pos) anchors.push_back({id, pos});
  return {std::move(samples), AnchorMap(std::move(anchors))};
}

std::vector<double> load_error_list(const std::string& path) {
  std::vector<double> out;
  for_each_row(path, [&](const std::vector<std::string>& f, int line) {
    if (f.size() != 1)
      fail(path, "line " + std::to_string(line) + ": expected one value");
    out.push_back(parse_double(f[0], path, line));
  });
  if (out.empty()) fail(path, "no values");
  return out;
}

void write_calibration(const std::string& path, const CalibrationResult& cal,
                       const NlosStats& stats) {
  ordered_json j;
  j["thresholds"] = {{"los_floor_dbm", cal.thresholds.los_floor_dbm},
                     {"nlos_floor_dbm", cal.thresholds.nlos_floor_dbm}};
  j["success_rate"] = cal.success_rate;
  j["nlos_stats"] = {
      {"toa_noise_std_ns", stats.toa_noise_std_ns},
      {"nlos",
       {{"bias_mean_ns", stats.bias_mean(PropagationClass::nlos)},
        {"bias_std_ns", stats.bias_std(PropagationClass::nlos)}}},
      {"snlos",
       {{"bias_mean_ns", stats.bias_mean(PropagationClass::snlos)},
        {"bias_std_ns", stats.bias_std(PropagationClass::snlos)}}}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << j.dump(2) << '\n';
}

}  // namespace uwbpos
