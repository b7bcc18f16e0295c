#pragma once

#include "homwit/statemodel.hpp"

#include <cstdint>
#include <string>

namespace homwit::config {

struct AnrdConfig {
  bool enabled = true;
  double survival = 0.5;
  bool corrected = true;
};

struct SurfaceConfig {
  double beta_min_deg = -90.0;
  double beta_max_deg = 90.0;
  std::size_t beta_steps = 181;
  double gamma_min_deg = -90.0;
  double gamma_max_deg = 90.0;
  std::size_t gamma_steps = 181;
  double dx_min_um = -400.0;
  double dx_max_um = 400.0;
  std::size_t dx_steps = 41;
};

/// Everything a pipeline run needs. Parsed from a strict JSON document:
/// unknown keys are rejected at every nesting level, as are out-of-range
/// values. See README for the schema.
struct RunConfig {
  statemodel::ExperimentConfig experiment;
  AnrdConfig anrd;
  int bootstrap_resamples = 1000;
  SurfaceConfig surface;

  void validate() const;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

}  // namespace homwit::config
