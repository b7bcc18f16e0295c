#include "homwit/estimation.hpp"

#include "homwit/errors.hpp"
#include "homwit/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace homwit::estimation {

namespace {

using interference::PatternInfo;

double pattern_survival(const PatternInfo& p, double survival) {
  if (p.triply_occupied > 0) return 0.0;
  double s = 1.0;
  for (int i = 0; i < p.doubly_occupied; ++i) s *= survival;
  return s;
}

struct PairSums {
  std::array<double, 3> bunched{};
  std::array<double, 3> antibunched{};
};

PairSums weighted_pair_sums(std::span<const double> counts,
                            std::span<const PatternInfo> patterns, bool anrd_corrected,
                            double survival) {
  PairSums sums;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const PatternInfo& p = patterns[i];
    if (p.tag == interference::PairTag::Insensitive) continue;
    const int pair = static_cast<int>(p.tag);
    double w = counts[i];
    if (anrd_corrected && p.bunched) w /= survival;
    (p.bunched ? sums.bunched[pair] : sums.antibunched[pair]) += w;
  }
  return sums;
}

std::array<double, 3> point_estimate(const PairSums& sums, std::array<bool, 3>* clamped) {
  std::array<double, 3> r{};
  for (int pair = 0; pair < 3; ++pair) {
    const double mass = sums.bunched[pair] + sums.antibunched[pair];
    if (mass <= 0.0) {
      throw EstimationError("overlap undefined: no events for pair " +
                            interference::to_string(static_cast<interference::PairTag>(pair)));
    }
    const double raw = 2.0 * (sums.bunched[pair] / mass) - 1.0;
    if (clamped) (*clamped)[pair] = raw < 0.0 || raw > 1.0;
    r[pair] = std::clamp(raw, 0.0, 1.0);
  }
  return r;
}

}  // namespace

EventCounts sample_events(const interference::OutputDistribution& dist, std::uint64_t n,
                          std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_events: need at least one event");
  rng::Stream stream(seed);
  EventCounts out;
  out.counts = rng::multinomial(stream, n, dist.probs());
  out.total = n;
  return out;
}

EventCounts apply_efficiency(const EventCounts& counts, double eta, std::uint64_t seed) {
  if (!(eta > 0.0) || eta > 1.0) {
    throw std::invalid_argument("apply_efficiency: eta must lie in (0, 1]");
  }
  if (eta == 1.0) return counts;
  const double keep = eta * eta * eta;
  rng::Stream stream(seed);
  EventCounts out;
  out.counts.resize(counts.counts.size(), 0);
  for (std::size_t i = 0; i < counts.counts.size(); ++i) {
    std::uint64_t kept = 0;
    for (std::uint64_t e = 0; e < counts.counts[i]; ++e) kept += stream.bernoulli(keep);
    out.counts[i] = kept;
    out.total += kept;
  }
  return out;
}

EventCounts apply_anrd(const EventCounts& counts, std::span<const PatternInfo> patterns,
                       std::uint64_t seed, double survival) {
  if (counts.counts.size() != patterns.size()) {
    throw std::invalid_argument("apply_anrd: counts/pattern size mismatch");
  }
  if (!(survival > 0.0) || survival > 1.0) {
    throw std::invalid_argument("apply_anrd: survival must lie in (0, 1]");
  }
  rng::Stream stream(seed);
  EventCounts out;
  out.counts.resize(counts.counts.size(), 0);
  for (std::size_t i = 0; i < counts.counts.size(); ++i) {
    const double s = pattern_survival(patterns[i], survival);
    std::uint64_t kept = 0;
    if (s >= 1.0) {
      kept = counts.counts[i];
    } else if (s > 0.0) {
      for (std::uint64_t e = 0; e < counts.counts[i]; ++e) kept += stream.bernoulli(s);
    }
    out.counts[i] = kept;
    out.total += kept;
  }
  return out;
}

EstimatedTriple estimate_overlaps(const EventCounts& counts,
                                  std::span<const PatternInfo> patterns,
                                  const EstimatorOptions& opts) {
  if (counts.counts.size() != patterns.size()) {
    throw std::invalid_argument("estimate_overlaps: counts/pattern size mismatch");
  }
  if (opts.bootstrap_resamples < 2) {
    throw std::invalid_argument("estimate_overlaps: need at least 2 bootstrap resamples");
  }

  std::vector<double> base(counts.counts.begin(), counts.counts.end());
  EstimatedTriple result{OverlapTriple(0, 0, 0), {}, {}, opts.bootstrap_resamples};
  {
    const PairSums sums =
        weighted_pair_sums(base, patterns, opts.anrd_corrected, opts.anrd_survival);
    const auto r = point_estimate(sums, &result.clamped);
    result.point = OverlapTriple(r[0], r[1], r[2]);
  }

  // Poisson bootstrap: each pattern count resampled around its observed
  // value, estimator re-run unchanged.
  std::array<double, 3> mean{};
  std::array<double, 3> m2{};
  int used = 0;
  std::vector<double> resampled(base.size());
  for (int b = 0; b < opts.bootstrap_resamples; ++b) {
    rng::Stream stream(rng::derive(opts.seed, rng::kTagBootstrap, static_cast<std::uint64_t>(b)));
    for (std::size_t i = 0; i < base.size(); ++i) {
      resampled[i] =
          base[i] > 0.0 ? static_cast<double>(stream.poisson(base[i])) : 0.0;
    }
    std::array<double, 3> r{};
    try {
      const PairSums sums =
          weighted_pair_sums(resampled, patterns, opts.anrd_corrected, opts.anrd_survival);
      r = point_estimate(sums, nullptr);
    } catch (const EstimationError&) {
      continue;  // a resample emptied a pair; skip it
    }
    ++used;
    for (int k = 0; k < 3; ++k) {
      const double delta = r[k] - mean[k];
      mean[k] += delta / used;
      m2[k] += delta * (r[k] - mean[k]);
    }
  }
  if (used < opts.bootstrap_resamples / 2 || used < 2) {
    throw EstimationError("bootstrap failed: too many degenerate resamples");
  }
  for (int k = 0; k < 3; ++k) result.sigma[k] = std::sqrt(m2[k] / (used - 1));
  return result;
}

double tvd(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("tvd: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
  return 0.5 * acc;
}

std::vector<double> empirical_distribution(const EventCounts& counts,
                                           std::span<const PatternInfo> patterns,
                                           bool anrd_corrected, double survival) {
  if (counts.counts.size() != patterns.size()) {
    throw std::invalid_argument("empirical_distribution: counts/pattern size mismatch");
  }
  std::vector<double> freq(counts.counts.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < freq.size(); ++i) {
    double w = static_cast<double>(counts.counts[i]);
    if (anrd_corrected) {
      const double s = pattern_survival(patterns[i], survival);
      if (s > 0.0) w /= s;
    }
    freq[i] = w;
    total += w;
  }
  if (total <= 0.0) throw EstimationError("empirical_distribution: no events");
  for (double& f : freq) f /= total;
  return freq;
}

DipFit fit_dip(std::span<const DipPoint> points) {
  if (points.size() < 4) {
    throw FitError("fit_dip: need at least 4 points spanning dip and baseline");
  }
  for (const auto& p : points) {
    if (!std::isfinite(p.dx) || !std::isfinite(p.count) || p.count < 0.0) {
      throw FitError("fit_dip: counts must be finite and non-negative");
    }
  }

  double cmax = -std::numeric_limits<double>::infinity();
  double cmin = std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    cmax = std::max(cmax, p.count);
    cmin = std::min(cmin, p.count);
  }
  if (cmax <= 0.0) throw FitError("fit_dip: all counts are zero");

  // Initial guesses: baseline from the maximum, depth from min/max, width
  // from where the curve first recovers half the dip.
  double a = cmax;
  double v = std::clamp(1.0 - cmin / cmax, 1e-3, 1.0);
  double half_dx = 0.0;
  const double half_level = cmax - 0.5 * v * cmax;
  for (const auto& p : points) {
    if (p.count <= half_level) half_dx = std::max(half_dx, std::abs(p.dx));
  }
  double max_dx = 0.0;
  for (const auto& p : points) max_dx = std::max(max_dx, std::abs(p.dx));
  if (half_dx <= 0.0) half_dx = max_dx > 0.0 ? max_dx / 4.0 : 1.0;
  double sigma = std::log(2.0) / (half_dx * half_dx);

  auto chi2_of = [&](double pa, double pv, double ps) {
    double chi2 = 0.0;
    for (const auto& p : points) {
      const double w = 1.0 / std::max(p.count, 1.0);
      const double r = interference::dip_curve(p.dx, pa, pv, ps) - p.count;
      chi2 += w * r * r;
    }
    return chi2;
  };

  double chi2 = chi2_of(a, v, sigma);
  double mu = 1e-3;
  int it = 0;
  bool converged = false;
  for (; it < 200; ++it) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (const auto& p : points) {
      const double w = 1.0 / std::max(p.count, 1.0);
      const double e = std::exp(-sigma * p.dx * p.dx);
      const double model = a * (1.0 - v * e);
      const double r = model - p.count;
      const Eigen::Vector3d j(1.0 - v * e, -a * e, a * v * p.dx * p.dx * e);
      jtj += w * j * j.transpose();
      jtr += w * j * r;
    }

    bool stepped = false;
    for (int tries = 0; tries < 30; ++tries) {
      Eigen::Matrix3d damped = jtj;
      damped.diagonal() += mu * jtj.diagonal().cwiseMax(1e-12);
      const Eigen::Vector3d delta = damped.ldlt().solve(-jtr);
      const double na = a + delta[0];
      const double nv = v + delta[1];
      const double ns = sigma + delta[2];
      if (na > 0.0 && ns > 0.0 && std::isfinite(na) && std::isfinite(nv) && std::isfinite(ns)) {
        const double nchi2 = chi2_of(na, nv, ns);
        if (nchi2 <= chi2) {
          const double rel = (chi2 - nchi2) / std::max(chi2, 1e-300);
          a = na;
          v = nv;
          sigma = ns;
          chi2 = nchi2;
          mu = std::max(mu * 0.3, 1e-12);
          stepped = true;
          if (rel < 1e-12 || delta.lpNorm<Eigen::Infinity>() < 1e-14) converged = true;
          break;
        }
      }
      mu *= 4.0;
      if (mu > 1e14) break;
    }
    if (converged) break;
    if (!stepped) {
      converged = chi2_of(a, v, sigma) <= chi2 + 1e-12;  // stuck at a flat minimum
      break;
    }
  }
  if (!converged) throw FitError("fit_dip: did not converge");
  if (v < -0.05 || v > 1.05) throw FitError("fit_dip: visibility outside [0, 1.05]");
  // Poisson weights make chi2/dof ~ 1 for data the model describes; an order
  // of magnitude above that means the scan is not a dip at all.
  if (chi2 > 10.0 * (static_cast<double>(points.size()) - 3.0)) {
    throw FitError("fit_dip: converged parameters do not describe the data");
  }

  // Covariance of the weighted fit at the optimum.
  Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const double w = 1.0 / std::max(p.count, 1.0);
    const double e = std::exp(-sigma * p.dx * p.dx);
    const Eigen::Vector3d j(1.0 - v * e, -a * e, a * v * p.dx * p.dx * e);
    jtj += w * j * j.transpose();
  }
  Eigen::Matrix3d cov = jtj.inverse();

  DipFit fit;
  fit.a = a;
  fit.v = v;
  fit.sigma = sigma;
  fit.sigma_a = std::sqrt(std::max(cov(0, 0), 0.0));
  fit.sigma_v = std::sqrt(std::max(cov(1, 1), 0.0));
  fit.sigma_sigma = std::sqrt(std::max(cov(2, 2), 0.0));
  fit.iterations = it + 1;
  fit.chi2 = chi2;
  return fit;
}

}  // namespace homwit::estimation
