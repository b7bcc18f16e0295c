// Acceptance gate: every release-blocking requirement as one named check with
// a single PASS/FAIL line.  Run with no arguments for the full gate, or with
// check names as arguments to run a subset.  Exit code = number of failures.

#include "homwit/estimation.hpp"
#include "homwit/geometry.hpp"
#include "homwit/interference.hpp"
#include "homwit/reference.hpp"
#include "homwit/rng.hpp"
#include "homwit/statemodel.hpp"

#include "support/oracles.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace geo = homwit::geometry;
namespace itf = homwit::interference;
namespace est = homwit::estimation;
namespace sm = homwit::statemodel;
namespace ref = homwit::reference;
using homwit::OverlapTriple;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double now_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
  va_list args;
  va_start(args, f);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

Eigen::Matrix3d diag_cov(const std::array<double, 3>& s) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (int i = 0; i < 3; ++i) m(i, i) = s[i] * s[i];
  return m;
}

sm::PairCalibrations reference_calibrations() {
  sm::PairCalibrations cal;
  cal.ab = {0.944, 8.7e-5};
  cal.bc = {0.835, 7.0e-5};
  cal.ac = {0.80, 6.2e-5};
  return cal;
}

// The published coherence rows, recomputed directly from the measured overlaps.
Outcome coherence_rows() {
  const auto& data = ref::bundled();
  const auto t0 = std::chrono::steady_clock::now();
  std::array<double, 4> computed{};
  for (std::size_t i = 0; i < data.overlap_sets.size(); ++i) {
    computed[i] = geo::coherence_witness(data.overlap_sets[i].overlaps);
  }
  const double elapsed = now_seconds(t0);

  bool pass = elapsed < 1e-3;
  std::string detail;
  for (std::size_t i = 0; i < data.overlap_sets.size(); ++i) {
    const auto& set = data.overlap_sets[i];
    const bool ok = std::abs(computed[i] - set.wc) <= data.wc_tolerance;
    pass = pass && ok;
    detail += fmt("%s W_c=%.4f (want %.3f±%.3f) ", set.label.c_str(), computed[i], set.wc,
                  data.wc_tolerance);
  }
  detail += fmt("in %.2e s (limit 1e-3)", elapsed);
  return {pass, detail};
}

// Distance to the two-dimensional body for the delayed run, cross-checked
// against an implementation-independent pure-state sampling oracle.
Outcome dimension_row() {
  const auto& data = ref::bundled();
  const auto t0 = std::chrono::steady_clock::now();
  const double wd = geo::dimension_witness(data.delayed.overlaps);
  const double oracle = oracles::qubit_distance_oracle(data.delayed.overlaps);
  const double elapsed = now_seconds(t0);

  const bool in_band = std::abs(wd - data.delayed.wd) <= data.wd_tolerance;
  const bool agrees = std::abs(wd - oracle) <= 0.005;
  const bool fast = elapsed < 10.0;
  return {in_band && agrees && fast,
          fmt("W_d=%.4f (want %.3f±%.3f), oracle=%.4f (gap %.2e, limit 5e-3), %.2f s (limit 10)",
              wd, data.delayed.wd, data.wd_tolerance, oracle, std::abs(wd - oracle), elapsed)};
}

// Grid maximum of the polarization-angle witness surface: published
// calibration and the ideal-visibility analytic point.
Outcome surface_maximum() {
  const auto beta = sm::linspace(-std::numbers::pi / 2, std::numbers::pi / 2, 181);

  const auto measured = sm::wc_surface(beta, beta, reference_calibrations());
  double max_measured = -1.0;
  for (double v : measured.signed_value.values) max_measured = std::max(max_measured, v);

  sm::PairCalibrations ideal;
  ideal.ab = ideal.bc = ideal.ac = {1.0, 1e-4};
  const auto perfect = sm::wc_surface(beta, beta, ideal);
  double max_ideal = -1.0;
  std::size_t at_i = 0, at_j = 0;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    for (std::size_t j = 0; j < beta.size(); ++j) {
      if (perfect.signed_value.at(i, j) > max_ideal) {
        max_ideal = perfect.signed_value.at(i, j);
        at_i = i;
        at_j = j;
      }
    }
  }
  const double target = 0.25 / std::sqrt(3.0);
  const double b = beta[at_i], g = beta[at_j];
  const bool location_ok = std::abs(std::abs(b) - std::numbers::pi / 6) <= 1e-9 &&
                           std::abs(std::abs(g) - std::numbers::pi / 6) <= 1e-9 && b * g < 0.0;
  const bool pass = std::abs(max_measured - 0.08) <= 0.005 &&
                    std::abs(max_ideal - target) <= 1e-4 && location_ok;
  return {pass, fmt("measured-visibility max=%.4f (want 0.080±0.005); ideal max=%.6f "
                    "(want %.6f±1e-4) at (%+.4f, %+.4f) rad",
                    max_measured, max_ideal, target, b, g)};
}

// Witness values in units of their resampled uncertainty, diagonal covariance.
Outcome significance() {
  const auto& data = ref::bundled();
  const auto& s1 = data.overlap_sets[0];

  const double coh = geo::witness_sigma(s1.overlaps, diag_cov(s1.sigma),
                                        geo::WitnessKind::Coherence, {});
  const bool coh_ok = std::abs(coh - 5.7) <= 0.3;

  const double dim = geo::witness_sigma(data.delayed.overlaps, diag_cov(data.delayed.sigma),
                                        geo::WitnessKind::Dimension, {});
  const bool dim_ok = dim >= 15.0;

  // With independent per-overlap errors the linear propagation gives
  // sqrt(sum sigma_i^2)/sqrt(3) = 0.0152 for S1, hence 5.23 sigma.  The
  // published 5.7 corresponds to the smaller reported witness error (0.014),
  // which encodes correlations between the overlap estimates that a diagonal
  // covariance cannot represent.
  return {coh_ok && dim_ok,
          fmt("S1 coherence %.2f sigma (want 5.7±0.3); delayed dimension %.1f sigma (want >=15)",
              coh, dim)};
}

// The interference engine against first-principles permanent formulas in the
// two exact limits, for random networks.
Outcome oracle_equivalence() {
  const auto base = itf::build_network();
  homwit::rng::Stream rng(0xacce97);
  const auto t0 = std::chrono::steady_clock::now();

  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    itf::Interferometer net = base;
    net.unitary = oracles::random_unitary(rng, itf::kModes);
    const auto dist_q = itf::output_distribution(net, itf::GramMatrix::all_ones());
    const auto dist_c = itf::output_distribution(net, itf::GramMatrix::identity());

    for (std::size_t p = 0; p < dist_q.size(); ++p) {
      const auto& modes = dist_q.patterns()[p].modes;
      Eigen::Matrix3cd m;
      for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) m(j, k) = net.unitary(modes[k], net.input_modes[j]);
      }
      // modes are sorted, so the multiplicity factorial has three cases
      double mult = 1.0;
      if (modes[0] == modes[2]) {
        mult = 6.0;
      } else if (modes[0] == modes[1] || modes[1] == modes[2]) {
        mult = 2.0;
      }
      const double boson = std::norm(oracles::permanent(m)) / mult;
      const double classical =
          oracles::permanent(m.cwiseAbs2().cast<std::complex<double>>()).real() / mult;
      worst = std::max(worst, std::abs(dist_q.prob(p) - boson));
      worst = std::max(worst, std::abs(dist_c.prob(p) - classical));
    }
  }
  const double elapsed = now_seconds(t0);
  return {worst <= 1e-12 && elapsed < 5.0,
          fmt("max |engine - permanent formula| = %.2e over 100 networks x 56 patterns "
              "(limit 1e-12), %.2f s (limit 5)",
              worst, elapsed)};
}

// Generation -> detection -> estimation closes on the generating model.
Outcome roundtrip_estimation() {
  const auto& data = ref::bundled();
  const auto& s1 = data.overlap_sets[0];

  sm::ExperimentConfig exp;
  exp.a = {sm::angle_from_overlap(s1.overlaps.ab, reference_calibrations().ab), 0.0};
  exp.b = {0.0, 0.0};
  exp.c = {-sm::angle_from_overlap(s1.overlaps.bc, reference_calibrations().bc), 0.0};
  exp.cal = reference_calibrations();
  const OverlapTriple truth = sm::predict_triple(exp);

  const auto net = itf::build_network();
  const auto patterns = itf::enumerate_patterns(net);
  const auto dist = itf::output_distribution(net, itf::GramMatrix::from_triple(truth));

  const auto t0 = std::chrono::steady_clock::now();
  int good = 0;
  for (int seed = 0; seed < 100; ++seed) {
    auto counts = est::sample_events(dist, 10000, 1000 + static_cast<std::uint64_t>(seed));
    counts = est::apply_anrd(counts, patterns, 2000 + static_cast<std::uint64_t>(seed));
    est::EstimatorOptions opts;
    opts.anrd_corrected = true;
    opts.seed = 3000 + static_cast<std::uint64_t>(seed);
    const auto e = est::estimate_overlaps(counts, patterns, opts);

    bool ok = geo::coherence_witness(e.point) > 0.0;
    const std::array<double, 3> target{s1.overlaps.ab, s1.overlaps.bc, s1.overlaps.ac};
    const auto point = e.point.as_array();
    for (int k = 0; k < 3; ++k) {
      const double combined = std::hypot(e.sigma[k], s1.sigma[k]);
      ok = ok && std::abs(point[k] - target[k]) <= 3.0 * combined;
    }
    good += ok;
  }
  const double elapsed = now_seconds(t0);
  return {good >= 95 && elapsed < 60.0,
          fmt("%d/100 seeds within 3 combined sigma of (%.3f, %.3f, %.3f) with positive W_c "
              "(need >=95), %.1f s (limit 60)",
              good, s1.overlaps.ab, s1.overlaps.bc, s1.overlaps.ac, elapsed)};
}

// Structural invariants: body nesting, distribution normalization, dip-fit
// identity, bootstrap scaling.
Outcome invariant_suites() {
  homwit::rng::Stream rng(0x1affab1e);

  int nesting_violations = 0;
  for (int i = 0; i < 100000; ++i) {
    const OverlapTriple t(rng.uniform01(), rng.uniform01(), rng.uniform01());
    if (geo::in_classical_polytope(t) && !geo::in_quantum_set(t)) ++nesting_violations;
    if (geo::in_qubit_set(t) && !geo::in_quantum_set(t)) ++nesting_violations;
  }

  const auto base = itf::build_network();
  double worst_norm = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    itf::Interferometer net = base;
    net.unitary = oracles::random_unitary(rng, itf::kModes);
    const auto gram = itf::GramMatrix::from_matrix(oracles::random_gram(rng, 4));
    const auto dist = itf::output_distribution(net, gram);
    double sum = 0.0;
    for (std::size_t p = 0; p < dist.size(); ++p) sum += dist.prob(p);
    worst_norm = std::max(worst_norm, std::abs(sum - 1.0));
  }

  const auto& data = ref::bundled();
  double worst_fit = 0.0;
  for (const auto& dip : data.dips) {
    std::vector<est::DipPoint> pts;
    for (int i = 0; i <= 40; ++i) {
      const double dx = -400.0 + 20.0 * i;
      pts.push_back({dx, itf::dip_curve(dx, 1000.0, dip.v, dip.sigma)});
    }
    const auto fit = est::fit_dip(pts);
    worst_fit = std::max({worst_fit, std::abs(fit.a - 1000.0) / 1000.0,
                          std::abs(fit.v - dip.v) / dip.v,
                          std::abs(fit.sigma - dip.sigma) / dip.sigma});
  }

  const auto patterns = itf::enumerate_patterns(base);
  const auto dist =
      itf::output_distribution(base, itf::GramMatrix::from_triple(data.overlap_sets[0].overlaps));
  std::array<double, 3> sig{};
  const std::array<std::uint64_t, 3> ns{1000, 10000, 100000};
  for (std::size_t i = 0; i < ns.size(); ++i) {
    est::EstimatorOptions opts;
    opts.anrd_corrected = false;
    opts.seed = 60 + i;
    sig[i] = est::estimate_overlaps(est::sample_events(dist, ns[i], 70 + i), patterns, opts)
                 .sigma[0];
  }
  const bool scaling_ok = sig[0] / sig[1] > 2.2 && sig[0] / sig[1] < 4.5 &&
                          sig[1] / sig[2] > 2.2 && sig[1] / sig[2] < 4.5;

  const bool pass =
      nesting_violations == 0 && worst_norm <= 1e-12 && worst_fit <= 1e-6 && scaling_ok;
  return {pass, fmt("nesting violations %d/100000; max |norm-1| %.2e (limit 1e-12); dip-fit "
                    "max rel err %.2e (limit 1e-6); sigma decade ratios %.2f, %.2f (want ~3.16)",
                    nesting_violations, worst_norm, worst_fit, sig[0] / sig[1], sig[1] / sig[2])};
}

// Sampled counts stay close to the exact distribution.  Published hardware
// runs sit at TVD 0.120-0.152 against the ideal model; that gap reflects
// unmodeled imperfections, so the gate here is self-consistency of the
// simulator, not hardware reproduction.  Note the gate is mis-calibrated by
// construction: 56-bin multinomial sampling at N=1e4 has mean TVD 0.026 and
// 95th percentile 0.031 for every published setting, so requiring <0.03 on
// 95% of seeds can only reach ~91/100.  It is kept as stated rather than
// quietly loosened.
Outcome self_tvd() {
  const auto& data = ref::bundled();
  const auto net = itf::build_network();
  const auto patterns = itf::enumerate_patterns(net);
  const auto dist =
      itf::output_distribution(net, itf::GramMatrix::from_triple(data.overlap_sets[0].overlaps));

  int good = 0;
  double worst = 0.0;
  double corrected_sum = 0.0;
  for (int seed = 0; seed < 100; ++seed) {
    const auto counts = est::sample_events(dist, 10000, 7000 + static_cast<std::uint64_t>(seed));
    const auto emp = est::empirical_distribution(counts, patterns, false);
    const double d = est::tvd(dist.probs(), emp);
    worst = std::max(worst, d);
    good += (d < 0.03);

    // Context: the same seeds pushed through detector attrition + correction.
    // The reweighting doubles the variance of bunched bins, so this variant
    // sits ~sqrt(2) higher on part of the mass and is not gated.
    const auto thinned =
        est::apply_anrd(counts, patterns, 8000 + static_cast<std::uint64_t>(seed));
    corrected_sum += est::tvd(dist.probs(), est::empirical_distribution(thinned, patterns, true));
  }
  return {good >= 95, fmt("%d/100 seeds with sampling TVD < 0.03 at N=1e4 (need >=95), worst "
                          "%.4f; detector-corrected mean %.4f for context; hardware-reported "
                          "range 0.120-0.152 is out of model scope",
                          good, worst, corrected_sum / 100.0)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
      {"coherence-rows", coherence_rows},
      {"dimension-row", dimension_row},
      {"surface-maximum", surface_maximum},
      {"significance", significance},
      {"oracle-equivalence", oracle_equivalence},
      {"roundtrip-estimation", roundtrip_estimation},
      {"invariant-suites", invariant_suites},
      {"self-tvd", self_tvd},
  };

  std::vector<std::string> wanted(argv + 1, argv + argc);
  int failures = 0;
  bool ran_any = false;
  for (const auto& [name, run] : checks) {
    if (!wanted.empty() &&
        std::find(wanted.begin(), wanted.end(), name) == wanted.end()) {
      continue;
    }
    ran_any = true;
    Outcome out;
    try {
      out = run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", out.pass ? "PASS" : "FAIL", name.c_str(), out.detail.c_str());
    std::fflush(stdout);
    failures += !out.pass;
  }
  if (!ran_any) {
    std::fprintf(stderr, "no such check; known checks:");
    for (const auto& [name, _] : checks) std::fprintf(stderr, " %s", name.c_str());
    std::fprintf(stderr, "\n");
    return 64;
  }
  return failures;
}
