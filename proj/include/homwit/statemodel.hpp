#pragma once

#include "homwit/geometry.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace homwit::statemodel {

/// Single-photon preparation: linear polarization angle (radians) and a
/// temporal delay expressed as a path-length displacement in micrometers.
struct PhotonPreparation {
  double theta = 0.0;
  double delay_um = 0.0;

  PhotonPreparation() = default;
  PhotonPreparation(double theta_rad, double delay);
};

/// Per-pair interferometer calibration: visibility v in [0, 1] and Gaussian
/// dip curvature sigma in um^-2 (strictly positive).
struct PairCalibration {
  double v = 1.0;
  double sigma = 1e-4;

  PairCalibration() = default;
  PairCalibration(double visibility, double sigma_um2);
};

struct PairCalibrations {
  PairCalibration ab;
  PairCalibration bc;
  PairCalibration ac;
};

/// Full three-photon experiment description.
struct ExperimentConfig {
  PhotonPreparation a;
  PhotonPreparation b;
  PhotonPreparation c;
  PairCalibrations cal;
  std::uint64_t events = 10000;
  std::uint64_t seed = 12345;
  double efficiency = 1.0;  // uniform per-photon detection efficiency in (0, 1]

  void validate() const;
};

/// cos^2 of the polarization angle difference.
double polarization_overlap(const PhotonPreparation& p1, const PhotonPreparation& p2);

/// exp(-sigma (dx1 - dx2)^2) wavepacket overlap factor.
double temporal_overlap(const PhotonPreparation& p1, const PhotonPreparation& p2,
                        const PairCalibration& cal);

/// v * polarization_overlap * temporal_overlap.
double pairwise_overlap(const PhotonPreparation& p1, const PhotonPreparation& p2,
                        const PairCalibration& cal);

/// Model overlaps for all three pairs.
OverlapTriple predict_triple(const ExperimentConfig& cfg);

/// Polarization angle magnitude that produces overlap r at visibility cal.v
/// and zero delay: acos(sqrt(r / v)). Throws for r > v.
double angle_from_overlap(double r, const PairCalibration& cal);

/// Rectangular sweep result. values is row-major: values[i * cols.size() + j]
/// belongs to (rows[i], cols[j]).
struct SurfaceGrid {
  std::vector<double> rows;
  std::vector<double> cols;
  std::vector<double> values;
  std::vector<std::uint8_t> failed;  // per-cell flag, only populated by wd_surface

  double at(std::size_t i, std::size_t j) const { return values[i * cols.size() + j]; }
};

struct WcSurfaces {
  SurfaceGrid magnitude;      // |1 - v_ab cos^2 b - v_bc cos^2 g + v_ac cos^2(b-g)| / sqrt(3)
  SurfaceGrid signed_value;   // (v_ab cos^2 b + v_bc cos^2 g - v_ac cos^2(b-g) - 1) / sqrt(3)
};

/// Coherence-witness surface over polarization angles beta (photon A) and
/// gamma (photon C), photon B fixed at zero, all delays zero. The signed
/// variant is positive exactly where the model triple violates the classical
/// face; the magnitude variant is its absolute value.
WcSurfaces wc_surface(std::span<const double> beta, std::span<const double> gamma,
                      const PairCalibrations& cal);

/// Dimension-witness surface over delays dx1 (photon A) and dx2 (photon C),
/// photon B undelayed, all polarizations equal. Cells where the projection
/// fails are flagged instead of aborting the sweep.
SurfaceGrid wd_surface(std::span<const double> dx1, std::span<const double> dx2,
                       const PairCalibrations& cal,
                       const geometry::ProjectionOptions& opts = {});

/// Uniformly spaced grid helper, n >= 2 points from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace homwit::statemodel
