// uwbpos CLI: scenario runner, calibration pipeline, CDF utility.

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "uwbpos/io.hpp"
#include "uwbpos/scenario.hpp"

namespace {

using namespace uwbpos;

void print_summary(const RunResult& result) {
  Summary s = summarize(result);
  std::printf("%-16s %12s %12s %10s\n", "mode", "median [m]", "p90 [m]",
              "diverged");
  for (const auto& m : s.modes)
    std::printf("%-16s %12.4f %12.4f %10d\n", to_string(m.mode).c_str(),
                m.median_m, m.p90_m, m.diverged);
  if (s.comparison) {
    const auto& c = *s.comparison;
    std::printf("mitigated vs off: improved %d, equal %d, worse %d of %d "
                "points\n",
                c.improved, c.equal, c.worse, c.improved + c.equal + c.worse);
  }
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::string& mode, std::uint64_t seed, bool seed_set,
            bool trace) {
  ScenarioConfig cfg = load_scenario(config_path);
  if (!mode.empty()) {
    if (mode == "both") {
      cfg.run_unmitigated = cfg.run_mitigated = true;
    } else {
      MitigationMode m = mitigation_mode_from_string(mode);
      cfg.run_unmitigated = m == MitigationMode::off;
      cfg.run_mitigated = !cfg.run_unmitigated;
      cfg.mitigated_r_mode =
          m == MitigationMode::on_diagonal_r ? RMode::diagonal : RMode::full;
    }
  }
  if (seed_set) cfg.master_seed = seed;

  RunResult result = run_scenario(cfg, trace);
  write_outputs(result, out_dir);
  print_summary(result);
  std::printf("outputs written to %s\n", out_dir.c_str());
  return 0;
}

int cmd_calibrate(const std::string& powers_path,
                  const std::string& ranging_path,
                  const std::string& out_path) {
  auto powers = load_power_samples(powers_path);
  RangingData ranging = load_ranging_samples(ranging_path);

  CalibrationResult cal = calibrate_thresholds(powers);
  NlosStats stats = estimate_bias_stats(ranging.samples, ranging.anchors);
  write_calibration(out_path, cal, stats);

  std::printf("thresholds: los_floor %.1f dBm, nlos_floor %.1f dBm "
              "(success rate %.4f on %zu samples)\n",
              cal.thresholds.los_floor_dbm, cal.thresholds.nlos_floor_dbm,
              cal.success_rate, powers.size());
  std::printf("bias stats: nlos (%.4f, %.4f) ns, snlos (%.4f, %.4f) ns "
              "from %zu rangings\n",
              stats.bias_mean(PropagationClass::nlos),
              stats.bias_std(PropagationClass::nlos),
              stats.bias_mean(PropagationClass::snlos),
              stats.bias_std(PropagationClass::snlos),
              ranging.samples.size());
  std::printf("written to %s\n", out_path.c_str());
  return 0;
}

int cmd_cdf(const std::string& errors_path) {
  auto errors = load_error_list(errors_path);
  std::printf("error_m,cumulative_fraction\n");
  for (const auto& [e, f] : empirical_cdf(errors))
    std::printf("%.17g,%.17g\n", e, f);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UWB TDOA positioning harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir, mode;
  std::uint64_t seed = 0;
  bool trace = false;
  CLI::App* run = app.add_subcommand("run", "run a scenario config");
  run->add_option("--config", config_path, "scenario config file")
      ->required();
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--mode", mode, "on | off | both | on-diagonal-r");
  CLI::Option* seed_opt =
      run->add_option("--seed", seed, "override the master seed");
  run->add_flag("--trace", trace, "write per-epoch trace.jsonl");

  std::string powers_path, ranging_path, cal_out;
  CLI::App* cal = app.add_subcommand(
      "calibrate", "derive thresholds and bias statistics from samples");
  cal->add_option("--powers", powers_path, "labeled power samples CSV")
      ->required();
  cal->add_option("--ranging", ranging_path, "labeled ranging samples CSV")
      ->required();
  cal->add_option("--out", cal_out, "output JSON file")->required();

  std::string errors_path;
  CLI::App* cdf = app.add_subcommand("cdf", "print the empirical CDF of an "
                                            "error list as CSV");
  cdf->add_option("--errors", errors_path, "file with one error per line")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(config_path, out_dir, mode, seed, seed_opt->count() > 0,
                     trace);
    if (cal->parsed()) return cmd_calibrate(powers_path, ranging_path, cal_out);
    if (cdf->parsed()) return cmd_cdf(errors_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
