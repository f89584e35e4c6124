#include "horolab/lab/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "horolab/errors.hpp"
#include "horolab/lab/config.hpp"
#include "horolab/lab/output.hpp"
#include "horolab/lab/parallel.hpp"

#ifndef HOROLAB_DEFAULT_CALIBRATION
#define HOROLAB_DEFAULT_CALIBRATION "data/calibration.txt"
#endif

namespace horolab::lab {

namespace {

constexpr double kBoxSafety = 0.9;
constexpr std::uint64_t kReturnSeedOffset = 100000;
// Rejection sampling for thick points stops here.
constexpr int kMaxThickDraws = 100000;

const std::string& require(const ParamMap& map, const std::string& key) {
  const auto it = map.find(key);
  if (it == map.end()) throw ConfigError("calibration: missing key '" + key + "'");
  return it->second;
}

}  // namespace

std::filesystem::path calibration_path() {
  if (const char* env = std::getenv("HOROLAB_CALIBRATION"); env != nullptr && *env != '\0') {
    return env;
  }
  return HOROLAB_DEFAULT_CALIBRATION;
}

Calibration parse_calibration(std::string_view text) {
  const ParamMap map = parse_key_value(text);
  for (const auto& [key, value] : map) {
    if (key != "C_Gamma" && key != "C_Gamma_prime" && key != "calibration-seed" &&
        key != "date" && key != "commit") {
      throw ConfigError("calibration: unknown key '" + key + "'");
    }
  }
  Calibration cal;
  cal.C_Gamma = parse_real(require(map, "C_Gamma"));
  cal.C_Gamma_prime = parse_real(require(map, "C_Gamma_prime"));
  cal.seed = static_cast<std::uint64_t>(parse_int(require(map, "calibration-seed")));
  cal.date = require(map, "date");
  if (const auto it = map.find("commit"); it != map.end()) cal.commit = it->second;
  if (!(cal.C_Gamma > 0.0 && cal.C_Gamma < 1.0)) {
    throw ConfigError("calibration: C_Gamma must lie in (0, 1)");
  }
  if (!(cal.C_Gamma_prime >= 0.0) || !std::isfinite(cal.C_Gamma_prime)) {
    throw ConfigError("calibration: C_Gamma_prime must be finite and >= 0");
  }
  return cal;
}

Calibration load_calibration(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open calibration file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_calibration(buf.str());
}

std::string format_calibration(const Calibration& cal) {
  std::string out = "# Frozen constants for the close-return checks; regenerate with\n"
                    "# `horolab calibrate`.\n";
  out += "C_Gamma=" + format_real(cal.C_Gamma) + "\n";
  out += "C_Gamma_prime=" + format_real(cal.C_Gamma_prime) + "\n";
  out += "calibration-seed=" + std::to_string(cal.seed) + "\n";
  out += "date=" + cal.date + "\n";
  out += "commit=" + cal.commit + "\n";
  return out;
}

CalibrationRun calibrate(const CalibrationPlan& plan) {
  if (plan.box_points < 1 || plan.return_points < 0 || plan.u_samples < 8) {
    throw std::invalid_argument("calibrate: invalid sample counts");
  }
  CalibrationRun run;
  run.cal.seed = plan.seed;
  run.cal.date = plan.date;
  run.cal.commit = plan.commit;

  std::vector<std::uint64_t> thick;
  for (int draw = 0; static_cast<int>(thick.size()) < plan.box_points; ++draw) {
    if (draw >= kMaxThickDraws) throw ResourceLimit("calibrate: too few thick points");
    const std::uint64_t s = plan.seed + static_cast<std::uint64_t>(draw);
    if (height_distance(sample_point(s)) <= plan.thick_height) thick.push_back(s);
  }
  run.box = parallel_map<BoxSample>(thick.size(), plan.jobs, [&](std::size_t i) {
    const SurfacePoint x = sample_point(thick[i]);
    BoxSample b;
    b.seed = thick[i];
    b.height = height_distance(x);
    b.scale = fund_box_scale(x, plan.u_samples);
    b.normalized = b.scale * std::exp(b.height);
    return b;
  });
  double min_normalized = std::numeric_limits<double>::infinity();
  for (const auto& b : run.box) min_normalized = std::min(min_normalized, b.normalized);
  run.cal.C_Gamma = kBoxSafety * min_normalized;

  Calibration unit = run.cal;
  unit.C_Gamma_prime = 1.0;
  const auto per_point = parallel_map<std::vector<DegenerateSample>>(
      static_cast<std::size_t>(plan.return_points), plan.jobs, [&](std::size_t i) {
        const std::uint64_t s = plan.seed + kReturnSeedOffset + i;
        const SurfacePoint x = sample_point(s);
        std::vector<DegenerateSample> out;
        for (double T : plan.horizons) {
          const InjectivityEstimate est = injectivity_search(x, plan.scale * T);
          if (est.unbounded) throw OutOfRegime("calibrate: unbounded injectivity estimate");
          const double dt = max_return_spacing(plan.scale, est.c);
          const auto events = find_beta_returns(x, plan.scale, T, dt, est.c);
          for (const CountRow& row : count_bound_check(events, plan.scale, T, unit)) {
            out.push_back({s, T, row.beta, row.degenerate, row.degenerate_bound});
          }
        }
        return out;
      });
  double ratio = 0.0;
  for (const auto& rows : per_point) {
    for (const auto& d : rows) {
      run.degenerate.push_back(d);
      ratio = std::max(ratio, d.degenerate / d.unit_bound);
    }
  }
  run.cal.C_Gamma_prime = ratio;
  return run;
}

}  // namespace horolab::lab
