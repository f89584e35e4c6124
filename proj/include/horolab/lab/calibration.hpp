#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "horolab/close_returns.hpp"

namespace horolab::lab {

// HOROLAB_CALIBRATION if set, else the file frozen in the source tree.
std::filesystem::path calibration_path();

// key=value with C_Gamma, C_Gamma_prime, calibration-seed, date, commit.
// Throws ConfigError on missing keys or C_Gamma outside (0, 1).
Calibration parse_calibration(std::string_view text);
Calibration load_calibration(const std::filesystem::path& path);
std::string format_calibration(const Calibration& cal);

struct CalibrationPlan {
  int box_points = 20;
  double thick_height = 1.0;  // accept points with d_M <= thick_height
  int u_samples = 256;
  int return_points = 40;
  double scale = 1.0;
  std::vector<double> horizons{10.0, 30.0};
  std::uint64_t seed = 9001;
  std::string date;
  std::string commit;
  int jobs = 1;
};

struct BoxSample {
  std::uint64_t seed = 0;
  double height = 0.0;  // d_M(x)
  double scale = 0.0;   // fund_box_scale(x)
  double normalized = 0.0;  // scale * e^{d_M(x)}
};

struct DegenerateSample {
  std::uint64_t seed = 0;
  double T = 0.0;
  int beta = 0;
  int degenerate = 0;
  double unit_bound = 0.0;  // 1 + e^{-beta} S^{1/3} T
};

struct CalibrationRun {
  Calibration cal;
  std::vector<BoxSample> box;
  std::vector<DegenerateSample> degenerate;
};

// C_Gamma = 0.9 min over thick points of fund_box_scale(x) e^{d_M(x)};
// C_Gamma_prime = max over the sweep of degenerate count / unit bound.
// Box points use seeds seed, seed + 1, ...; return points seed + 100000 + i.
CalibrationRun calibrate(const CalibrationPlan& plan);

}  // namespace horolab::lab
