// Times the OpenMP kernels against their serial reference implementations
// and checks that both produce identical results.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uwbpos/classification.hpp"
#include "uwbpos/rng.hpp"
#include "uwbpos/scenario.hpp"

namespace {

using namespace uwbpos;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

ScenarioConfig bench_config(int points, int epochs, int replications) {
  ScenarioConfig cfg;
  cfg.plan.bounds = {0, 0, 10, 6};
  cfg.plan.walls = {{{4.0, 0.0}, {4.0, 2.2}}, {{4.0, 3.0}, {4.0, 6.0}},
                    {{0.0, 3.0}, {1.6, 3.0}}, {{2.4, 3.0}, {4.0, 3.0}},
                    {{6.5, 3.0}, {10.0, 3.0}}};
  cfg.anchors = AnchorMap({{0, {0.3, 0.3}}, {1, {9.7, 0.3}}, {2, {9.7, 5.7}},
                           {3, {0.3, 5.7}}, {4, {5.0, 0.2}}, {5, {5.0, 5.8}}});
  Rng rng = make_stream(99);
  std::uniform_real_distribution<double> ux(0.7, 9.3), uy(0.7, 5.3);
  for (int i = 0; i < points; ++i) cfg.test_points.push_back({ux(rng), uy(rng)});
  cfg.epochs_per_point = epochs;
  cfg.replications = replications;
  cfg.master_seed = 42;
  return cfg;
}

bool same_runs(const RunResult& a, const RunResult& b) {
  if (a.modes.size() != b.modes.size()) return false;
  for (std::size_t m = 0; m < a.modes.size(); ++m) {
    const auto& x = a.modes[m].pooled_converged_errors_m;
    const auto& y = b.modes[m].pooled_converged_errors_m;
    if (x != y) return false;  // bitwise: any mismatch is a bug
  }
  return true;
}

std::vector<LabeledPowerSample> bench_samples(int n) {
  PowerModel pm;
  Rng rng = make_stream(7);
  std::vector<LabeledPowerSample> out;
  for (int i = 0; i < n; ++i) {
    auto c = static_cast<PropagationClass>(i % 3);
    out.push_back({synthesize_first_path_power(c, pm, rng), c});
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs OpenMP benchmark"};
  int points = 16, epochs = 300, replications = 4, samples = 20000;
  app.add_option("--points", points, "scenario test points");
  app.add_option("--epochs", epochs, "epochs per point");
  app.add_option("--replications", replications, "replications per point");
  app.add_option("--samples", samples, "calibration samples");
  CLI11_PARSE(app, argc, argv);

  std::printf("%-24s %12s %12s %9s %6s\n", "kernel", "serial [ms]",
              "openmp [ms]", "speedup", "equal");

  ScenarioConfig cfg = bench_config(points, epochs, replications);
  auto t0 = Clock::now();
  RunResult serial = run_scenario_serial(cfg);
  double t_serial = ms_since(t0);
  t0 = Clock::now();
  RunResult parallel = run_scenario(cfg);
  double t_parallel = ms_since(t0);
  bool run_equal = same_runs(serial, parallel);
  std::printf("%-24s %12.1f %12.1f %8.2fx %6s\n", "run_scenario", t_serial,
              t_parallel, t_serial / t_parallel, run_equal ? "yes" : "NO");

  auto data = bench_samples(samples);
  t0 = Clock::now();
  CalibrationResult cal_serial = calibrate_thresholds_serial(data);
  double c_serial = ms_since(t0);
  t0 = Clock::now();
  CalibrationResult cal_parallel = calibrate_thresholds(data);
  double c_parallel = ms_since(t0);
  bool cal_equal =
      cal_serial.thresholds.los_floor_dbm ==
          cal_parallel.thresholds.los_floor_dbm &&
      cal_serial.thresholds.nlos_floor_dbm ==
          cal_parallel.thresholds.nlos_floor_dbm &&
      cal_serial.success_rate == cal_parallel.success_rate;
  std::printf("%-24s %12.1f %12.1f %8.2fx %6s\n", "calibrate_thresholds",
              c_serial, c_parallel, c_serial / c_parallel,
              cal_equal ? "yes" : "NO");

  return run_equal && cal_equal ? 0 : 1;
}
