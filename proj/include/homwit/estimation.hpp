#pragma once

#include "homwit/geometry.hpp"
#include "homwit/interference.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace homwit::estimation {

/// Event counts aligned with the 56-pattern enumeration of the distribution
/// they were sampled from.
struct EventCounts {
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
};

/// Multinomial sample of n events from the distribution. Bit-reproducible
/// given (seed, distribution); the seed is consumed as-is, callers derive
/// sub-streams via rng::derive.
EventCounts sample_events(const interference::OutputDistribution& dist, std::uint64_t n,
                          std::uint64_t seed);

/// Uniform per-photon detection efficiency: each event survives with
/// probability eta^3 (all three photons needed for a coincidence).
EventCounts apply_efficiency(const EventCounts& counts, double eta, std::uint64_t seed);

/// Approximate number resolution: a doubly occupied mode resolves both
/// photons on distinct detectors with the given survival probability; a
/// triply occupied mode can never yield three distinct detector clicks.
/// Event-survival probability is survival^(#doubly occupied) and 0 for any
/// triple occupation. Surviving counts are drawn per event.
EventCounts apply_anrd(const EventCounts& counts,
                       std::span<const interference::PatternInfo> patterns, std::uint64_t seed,
                       double survival = 0.5);

struct EstimatorOptions {
  bool anrd_corrected = true;  // weight bunched counts by 1/survival
  double anrd_survival = 0.5;
  int bootstrap_resamples = 1000;
  std::uint64_t seed = 0;
};

struct EstimatedTriple {
  OverlapTriple point{0.0, 0.0, 0.0};
  std::array<double, 3> sigma;    // bootstrap standard errors (ab, bc, ac)
  std::array<bool, 3> clamped;    // point estimate clamped into [0, 1]
  int bootstrap_resamples = 0;
};

/// Per-pair overlap estimates from counts: r = 2 p_b|pair - 1 with bunched
/// counts optionally re-weighted to undo number-resolution attrition.
/// Uncertainties come from Poisson bootstrap resampling of the counts.
/// Throws EstimationError when a pair has no events.
EstimatedTriple estimate_overlaps(const EventCounts& counts,
                                  std::span<const interference::PatternInfo> patterns,
                                  const EstimatorOptions& opts = {});

/// Total variation distance between two probability vectors on the same
/// enumeration.
double tvd(std::span<const double> p, std::span<const double> q);

/// Counts normalized to frequencies, optionally de-attenuated by the pattern
/// survival factors that apply_anrd used (so the result estimates the
/// pre-detection distribution).
std::vector<double> empirical_distribution(const EventCounts& counts,
                                           std::span<const interference::PatternInfo> patterns,
                                           bool anrd_corrected, double survival = 0.5);

/// One dip-scan sample: displacement and coincidence count.
struct DipPoint {
  double dx;
  double count;
};

struct DipFit {
  double a, v, sigma;
  double sigma_a, sigma_v, sigma_sigma;
  int iterations;
  double chi2;
};

/// Weighted Levenberg-Marquardt fit of a * (1 - v * exp(-sigma dx^2)) with
/// Poisson weights 1/max(count, 1). Initial guesses: a from the baseline,
/// v from the relative dip depth, sigma from the dip half width. Throws
/// FitError on non-convergence or v outside [0, 1.05].
DipFit fit_dip(std::span<const DipPoint> points);

}  // namespace homwit::estimation
