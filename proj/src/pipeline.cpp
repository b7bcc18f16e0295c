#include "homwit/pipeline.hpp"

#include "homwit/errors.hpp"
#include "homwit/rng.hpp"

#include <Eigen/Dense>

#include <numeric>
#include <utility>

namespace homwit::pipeline {

namespace {

template <typename F>
auto stage(const char* name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const StageError&) {
    throw;  // already attributed
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

Eigen::Matrix3d diagonal_covariance(const std::array<double, 3>& sigma) {
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (int i = 0; i < 3; ++i) cov(i, i) = sigma[static_cast<std::size_t>(i)] * sigma[static_cast<std::size_t>(i)];
  return cov;
}

}  // namespace

SimulationResult simulate(const config::RunConfig& cfg) {
  cfg.validate();
  const auto& exp = cfg.experiment;

  const OverlapTriple predicted =
      stage("predict", [&] { return statemodel::predict_triple(exp); });

  const auto network = interference::build_network();
  const auto patterns = interference::enumerate_patterns(network);

  const interference::OutputDistribution ideal = stage("interfere", [&] {
    const auto gram = interference::GramMatrix::from_triple(predicted);
    return interference::output_distribution(network, gram);
  });

  estimation::EventCounts detected = stage("detect", [&] {
    estimation::EventCounts counts =
        estimation::sample_events(ideal, exp.events, rng::derive(exp.seed, rng::kTagEvents, 0));
    if (exp.efficiency < 1.0) {
      counts = estimation::apply_efficiency(counts, exp.efficiency,
                                            rng::derive(exp.seed, rng::kTagEfficiency, 0));
    }
    if (cfg.anrd.enabled) {
      counts = estimation::apply_anrd(counts, patterns, rng::derive(exp.seed, rng::kTagAnrd, 0),
                                      cfg.anrd.survival);
    }
    return counts;
  });

  estimation::EstimatorOptions est_opts;
  est_opts.anrd_corrected = cfg.anrd.enabled && cfg.anrd.corrected;
  est_opts.anrd_survival = cfg.anrd.survival;
  est_opts.bootstrap_resamples = cfg.bootstrap_resamples;
  est_opts.seed = exp.seed;

  const estimation::EstimatedTriple estimate =
      stage("estimate", [&] { return estimation::estimate_overlaps(detected, patterns, est_opts); });

  SimulationResult out{
      .predicted = predicted,
      .ideal = ideal,
      .detected = detected,
      .generated_events = exp.events,
      .surviving_events = detected.total,
      .estimate = estimate,
      .report = geometry::witness_report(estimate.point),
      .coherence_sigma = 0.0,
      .dimension_sigma = 0.0,
      .tvd_raw = 0.0,
      .tvd_corrected = 0.0,
  };

  stage("witness", [&] {
    geometry::SigmaOptions sig;
    sig.seed = rng::derive(exp.seed, rng::kTagResample, 0);
    const Eigen::Matrix3d cov = diagonal_covariance(estimate.sigma);
    out.coherence_sigma =
        geometry::witness_sigma(estimate.point, cov, geometry::WitnessKind::Coherence, sig);
    out.dimension_sigma =
        geometry::witness_sigma(estimate.point, cov, geometry::WitnessKind::Dimension, sig);
    return 0;
  });

  stage("compare", [&] {
    const auto raw = estimation::empirical_distribution(detected, patterns, false, cfg.anrd.survival);
    out.tvd_raw = estimation::tvd(ideal.probs(), raw);
    if (cfg.anrd.enabled) {
      const auto corr =
          estimation::empirical_distribution(detected, patterns, true, cfg.anrd.survival);
      out.tvd_corrected = estimation::tvd(ideal.probs(), corr);
    } else {
      out.tvd_corrected = out.tvd_raw;
    }
    return 0;
  });

  return out;
}

WitnessResult evaluate_witness(const OverlapTriple& t,
                               const std::array<double, 3>& sigma,
                               const geometry::SigmaOptions& opts) {
  WitnessResult out{.report = geometry::witness_report(t),
                    .coherence_sigma = 0.0,
                    .dimension_sigma = 0.0};
  const Eigen::Matrix3d cov = diagonal_covariance(sigma);
  out.coherence_sigma = geometry::witness_sigma(t, cov, geometry::WitnessKind::Coherence, opts);
  out.dimension_sigma = geometry::witness_sigma(t, cov, geometry::WitnessKind::Dimension, opts);
  return out;
}

}  // namespace homwit::pipeline
