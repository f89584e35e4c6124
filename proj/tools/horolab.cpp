// Experiment runner: horolab <experiment-id> --config <path> [--out <dir>]
// [--seed <int>] [--jobs <int>]. Exit status 0 iff every pass/fail column
// passes; 1 for a failed check or partial run; 2 for invalid input.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "horolab/lab/calibration.hpp"
#include "horolab/lab/config.hpp"
#include "horolab/lab/experiments.hpp"
#include "horolab/lab/output.hpp"

namespace {

constexpr std::uint64_t kDefaultSeed = 1;
constexpr std::uint64_t kDefaultCalibrationSeed = 9001;

}  // namespace

int main(int argc, char** argv) {
  using namespace horolab::lab;
  CLI::App app{"horolab: horocycle-flow experiment runner"};
  std::string id;
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  app.add_option("experiment", id, "Experiment id")
      ->required()
      ->check(CLI::IsMember(experiment_ids()));
  app.add_option("--config", config_path, "key=value parameter file")->required();
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", seed, "Run seed (default 1; 9001 for calibrate)");
  app.add_option("--jobs", jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  ExperimentConfig cfg;
  std::optional<horolab::Calibration> cal;
  const auto cal_path = calibration_path();
  try {
    const ParamMap overrides = read_key_value_file(config_path);
    const std::uint64_t run_seed =
        seed.value_or(id == "calibrate" ? kDefaultCalibrationSeed : kDefaultSeed);
    cfg = make_config(id, overrides, run_seed, out_dir, jobs);
    if (id == "returns") cal = load_calibration(cal_path);
  } catch (const ConfigError& e) {
    std::cerr << "horolab: invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "horolab: invalid argument: " << e.what() << "\n";
    return 2;
  }

  ExperimentResult result;
  try {
    result = run_experiment(cfg, cal);
  } catch (const std::invalid_argument& e) {
    std::cerr << "horolab: invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "horolab: " << id << " failed: " << e.what() << "\n";
    return 1;
  }

  const WrittenOutput written = write_result(result, cfg, cal_path);
  std::cout << "experiment " << id << " (config " << cfg.hash() << ", seed " << cfg.seed << ")\n";
  for (const auto& table : result.tables) {
    std::cout << "  " << table.name << ": " << table.rows.size() << " rows, "
              << (table.all_pass() ? "pass" : "FAIL") << "\n";
  }
  for (const auto& m : result.messages) std::cout << "  note: " << m << "\n";
  if (result.partial) std::cout << "  partial run: results are incomplete\n";
  std::cout << "  manifest: " << written.manifest.string() << "\n";
  std::cout << (result.pass() ? "PASS" : "FAIL") << "\n";
  return result.pass() ? 0 : 1;
}
