#pragma once

#include <string>
#include <vector>

#include "adatd/harness.hpp"

namespace adatd {

// Strict parse of the experiment config document; unknown keys are errors.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Sweep variant: hyperparameter fields may hold arrays. Expands to one
// single-algorithm config per grid cell, labelled for its output directory.
struct SweepCell {
  std::string label;
  ExperimentConfig config;
};
std::vector<SweepCell> load_sweep(const std::string& path);

}  // namespace adatd
