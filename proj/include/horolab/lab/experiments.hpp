#pragma once

#include <filesystem>
#include <optional>

#include "horolab/close_returns.hpp"
#include "horolab/lab/config.hpp"
#include "horolab/lab/output.hpp"

namespace horolab::lab {

// Runs one experiment. `cal` is required by "returns" only. Resource and
// precision limits end the run with the rows gathered so far and
// result.partial set; other errors propagate.
//
// The "calibrate" experiment also writes the calibration file to the
// `output` parameter, or to <out_dir>/calibration.txt when it is empty.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::optional<Calibration>& cal = std::nullopt);

// Where "calibrate" writes its file for this config.
std::filesystem::path calibration_output_path(const ExperimentConfig& config);

}  // namespace horolab::lab
