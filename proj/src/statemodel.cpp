#include "homwit/statemodel.hpp"

#include "homwit/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace homwit::statemodel {

namespace {
constexpr double kSqrt3 = std::numbers::sqrt3;
}

PhotonPreparation::PhotonPreparation(double theta_rad, double delay)
    : theta(theta_rad), delay_um(delay) {
  if (!std::isfinite(theta) || !std::isfinite(delay_um)) {
    throw std::invalid_argument("PhotonPreparation: angle and delay must be finite");
  }
}

PairCalibration::PairCalibration(double visibility, double sigma_um2)
    : v(visibility), sigma(sigma_um2) {
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
    throw std::invalid_argument("PairCalibration: visibility must lie in [0, 1]");
  }
  if (!std::isfinite(sigma) || sigma <= 0.0) {
    throw std::invalid_argument("PairCalibration: sigma must be positive");
  }
}

void ExperimentConfig::validate() const {
  if (events < 1) throw std::invalid_argument("ExperimentConfig: events must be >= 1");
  if (!std::isfinite(efficiency) || efficiency <= 0.0 || efficiency > 1.0) {
    throw std::invalid_argument("ExperimentConfig: efficiency must lie in (0, 1]");
  }
}

double polarization_overlap(const PhotonPreparation& p1, const PhotonPreparation& p2) {
  const double c = std::cos(p1.theta - p2.theta);
  return c * c;
}

double temporal_overlap(const PhotonPreparation& p1, const PhotonPreparation& p2,
                        const PairCalibration& cal) {
  const double dx = p1.delay_um - p2.delay_um;
  return std::exp(-cal.sigma * dx * dx);
}

double pairwise_overlap(const PhotonPreparation& p1, const PhotonPreparation& p2,
                        const PairCalibration& cal) {
  return cal.v * polarization_overlap(p1, p2) * temporal_overlap(p1, p2, cal);
}

OverlapTriple predict_triple(const ExperimentConfig& cfg) {
  return OverlapTriple(pairwise_overlap(cfg.a, cfg.b, cfg.cal.ab),
                       pairwise_overlap(cfg.b, cfg.c, cfg.cal.bc),
                       pairwise_overlap(cfg.a, cfg.c, cfg.cal.ac));
}

double angle_from_overlap(double r, const PairCalibration& cal) {
  if (!std::isfinite(r) || r < 0.0) {
    throw std::invalid_argument("angle_from_overlap: overlap must be non-negative");
  }
  if (cal.v <= 0.0) {
    throw std::invalid_argument("angle_from_overlap: undefined at zero visibility");
  }
  if (r > cal.v + 1e-12) {
    throw std::invalid_argument("angle_from_overlap: overlap exceeds pair visibility");
  }
  return std::acos(std::sqrt(std::min(r / cal.v, 1.0)));
}

WcSurfaces wc_surface(std::span<const double> beta, std::span<const double> gamma,
                      const PairCalibrations& cal) {
  WcSurfaces s;
  s.signed_value.rows.assign(beta.begin(), beta.end());
  s.signed_value.cols.assign(gamma.begin(), gamma.end());
  s.signed_value.values.resize(beta.size() * gamma.size());
  s.magnitude = s.signed_value;

  std::size_t idx = 0;
  for (double b : beta) {
    const double cb = std::cos(b);
    for (double g : gamma) {
      const double cg = std::cos(g);
      const double cbg = std::cos(b - g);
      const double signed_w =
          (cal.ab.v * cb * cb + cal.bc.v * cg * cg - cal.ac.v * cbg * cbg - 1.0) / kSqrt3;
      s.signed_value.values[idx] = signed_w;
      s.magnitude.values[idx] = std::abs(signed_w);
      ++idx;
    }
  }
  return s;
}

SurfaceGrid wd_surface(std::span<const double> dx1, std::span<const double> dx2,
                       const PairCalibrations& cal, const geometry::ProjectionOptions& opts) {
  SurfaceGrid g;
  g.rows.assign(dx1.begin(), dx1.end());
  g.cols.assign(dx2.begin(), dx2.end());
  g.values.resize(dx1.size() * dx2.size(), 0.0);
  g.failed.resize(g.values.size(), 0);

  ExperimentConfig cfg;
  cfg.cal = cal;
  std::size_t idx = 0;
  for (double x1 : dx1) {
    for (double x2 : dx2) {
      cfg.a = PhotonPreparation(0.0, x1);
      cfg.b = PhotonPreparation(0.0, 0.0);
      cfg.c = PhotonPreparation(0.0, x2);
      try {
        g.values[idx] = geometry::dimension_witness(predict_triple(cfg), opts);
      } catch (const ProjectionError&) {
        g.failed[idx] = 1;
        g.values[idx] = std::numeric_limits<double>::quiet_NaN();
      }
      ++idx;
    }
  }
  return g;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n < 2) throw std::invalid_argument("linspace: need at least 2 points");
  std::vector<double> out(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

}  // namespace homwit::statemodel
