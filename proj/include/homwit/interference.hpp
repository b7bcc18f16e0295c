#pragma once

#include "homwit/geometry.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace homwit::interference {

inline constexpr int kModes = 6;
inline constexpr int kPhotons = 3;
inline constexpr int kPatterns = 56;  // multisets of 3 out of 6 modes

using Matrix6cd = Eigen::Matrix<std::complex<double>, kModes, kModes>;

enum class PairTag { AB, BC, AC, Insensitive };

std::string to_string(PairTag tag);

/// Three-photon output pattern: sorted mode indices plus its classification
/// against the pair output map. A pattern is tagged with a pair when exactly
/// two of the three photons exit that pair's two modes; `bunched` marks any
/// multiply occupied mode.
struct PatternInfo {
  std::array<int, 3> modes;
  PairTag tag;
  bool bunched;
  int doubly_occupied;  // number of modes holding exactly 2 photons
  int triply_occupied;  // number of modes holding 3 photons
};

/// Six-mode linear network with three marked input modes (photons A, B, C)
/// and three disjoint pairs of output modes, one per photon pair.
struct Interferometer {
  Matrix6cd unitary;  // transfer matrix, out = U * in
  std::array<int, 3> input_modes;
  std::array<std::array<int, 2>, 3> pair_outputs;  // AB, BC, AC

  void validate() const;
};

/// The pairwise-comparison network: each photon is split on a balanced
/// splitter, one arm routed to each of the two pair splitters it takes part
/// in, and each pair's two arms recombine on a final balanced splitter.
/// Photons A, B, C enter modes 0, 2, 4; pair outputs are AB = {0,1},
/// BC = {2,3}, AC = {4,5}.
Interferometer build_network();

/// Hermitian unit-diagonal positive-semidefinite matrix of pairwise state
/// amplitudes S_ij = <phi_i|phi_j>, so |S_ij|^2 is the overlap r_ij.
class GramMatrix {
 public:
  /// Real non-negative convention S_ij = +sqrt(r_ij). Triples at the
  /// realizability boundary get a PSD repair (eigenvalue clip at zero,
  /// diagonal renormalization); anything further outside is rejected.
  static GramMatrix from_triple(const OverlapTriple& t);

  /// Validates hermiticity, unit diagonal and positive semidefiniteness.
  static GramMatrix from_matrix(const Eigen::Matrix3cd& s);

  static GramMatrix identity();
  static GramMatrix all_ones();

  const Eigen::Matrix3cd& matrix() const { return s_; }
  OverlapTriple overlaps() const;

  /// Off-diagonal entries scaled by lambda in [0, 1]; lambda = 0 is the
  /// fully distinguishable limit, lambda = 1 returns *this.
  GramMatrix scaled(double lambda) const;

 private:
  explicit GramMatrix(Eigen::Matrix3cd s) : s_(std::move(s)) {}
  Eigen::Matrix3cd s_;
};

/// Probability distribution over the 56 output patterns, tied to the pair
/// classification of the interferometer it was computed for.
class OutputDistribution {
 public:
  OutputDistribution(std::vector<double> probs, std::vector<PatternInfo> info);

  double prob(std::size_t idx) const { return probs_[idx]; }
  const std::vector<double>& probs() const { return probs_; }
  const std::vector<PatternInfo>& patterns() const { return info_; }
  std::size_t size() const { return probs_.size(); }

 private:
  std::vector<double> probs_;
  std::vector<PatternInfo> info_;
};

/// Fixed lexicographic enumeration of the 56 sorted patterns, classified
/// against the given network's pair output map.
std::vector<PatternInfo> enumerate_patterns(const Interferometer& net);

/// Three-photon output distribution for partially distinguishable photons:
///   P(d) = 1/prod_m mult_m! * sum_{sigma,rho in S3} prod_k
///          S[sigma(k)][rho(k)] * M[sigma(k)][k] * conj(M[rho(k)][k])
/// with M[j][k] = U(d_k, input_mode_j). Reduces to the permanent formulas in
/// the indistinguishable and fully distinguishable limits.
OutputDistribution output_distribution(const Interferometer& net, const GramMatrix& gram);

/// Two-photon bunching probability at a balanced splitter: (1 + r) / 2.
double hom_bunching_probability(double overlap);

struct PairConditional {
  double bunched;      // probability mass, both photons in one pair mode
  double antibunched;  // probability mass, one photon in each pair mode
};

/// Per-pair bunched/antibunched mass among patterns tagged with that pair.
std::array<PairConditional, 3> pair_conditionals(const OutputDistribution& dist);

struct RecoveredOverlaps {
  OverlapTriple triple{0.0, 0.0, 0.0};
  std::array<bool, 3> clamped;  // true where 2 p_b - 1 fell outside [0, 1]
};

/// Inverts the bunching law per pair: r = 2 p_b|pair - 1, clamped to [0, 1].
/// Throws EstimationError when a pair has no conditional mass.
RecoveredOverlaps overlaps_from_distribution(const OutputDistribution& dist);

/// Two-photon coincidence dip model: a * (1 - v * exp(-sigma * dx^2)).
double dip_curve(double dx, double a, double v, double sigma);

}  // namespace homwit::interference
