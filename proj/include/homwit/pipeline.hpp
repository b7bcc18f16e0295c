#pragma once

// End-to-end simulation: state preparation -> interference -> detection ->
// overlap estimation -> witness evaluation.  Each stage is named so failures
// report where the run died, not just why.

#include "homwit/config.hpp"
#include "homwit/estimation.hpp"
#include "homwit/geometry.hpp"
#include "homwit/interference.hpp"
#include "homwit/statemodel.hpp"

#include <array>
#include <cstdint>
#include <string>

namespace homwit::pipeline {

struct SimulationResult {
  // What the optics model says the overlaps should be.
  OverlapTriple predicted{0.0, 0.0, 0.0};

  // Ideal three-photon output distribution and what the detectors kept.
  interference::OutputDistribution ideal;
  estimation::EventCounts detected;
  std::uint64_t generated_events = 0;
  std::uint64_t surviving_events = 0;

  // Overlaps recovered from the detected counts.
  estimation::EstimatedTriple estimate;

  geometry::WitnessReport report;
  double coherence_sigma = 0.0;   // W_c in units of its bootstrap error
  double dimension_sigma = 0.0;   // W_d in units of its bootstrap error

  // Distance between the ideal distribution and the empirical one,
  // with and without the detector-loss reweighting applied.
  double tvd_raw = 0.0;
  double tvd_corrected = 0.0;
};

// Runs the full chain for one configuration.  Deterministic in cfg: all
// randomness is derived from cfg.experiment.seed via purpose-tagged streams.
SimulationResult simulate(const config::RunConfig& cfg);

// Witness evaluation alone, for externally measured overlaps.
struct WitnessResult {
  geometry::WitnessReport report;
  double coherence_sigma = 0.0;
  double dimension_sigma = 0.0;
};

WitnessResult evaluate_witness(const OverlapTriple& t,
                               const std::array<double, 3>& sigma,
                               const geometry::SigmaOptions& opts = {});

}  // namespace homwit::pipeline
