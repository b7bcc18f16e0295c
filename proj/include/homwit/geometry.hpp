#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <vector>

namespace homwit {

/// Pairwise state overlaps r = |<psi_i|psi_j>|^2 for a triple of states
/// labelled A, B, C. Components are (r_ab, r_bc, r_ac), each in [0, 1].
struct OverlapTriple {
  double ab;
  double bc;
  double ac;

  OverlapTriple(double r_ab, double r_bc, double r_ac);

  std::array<double, 3> as_array() const { return {ab, bc, ac}; }
  Eigen::Vector3d as_vector() const { return {ab, bc, ac}; }
  static OverlapTriple from_vector(const Eigen::Vector3d& v);
};

/// The three nested overlap bodies, ordered Qb subset of Q, C subset of Q.
///  Classical: convex hull of the five triples reachable when every pairwise
///             comparison has a deterministic outcome.
///  Quantum:   triples realizable by arbitrary quantum states.
///  Qubit:     triples realizable by states confined to two dimensions.
enum class Body { Classical, Quantum, Qubit };

namespace geometry {

/// Membership slack below which a boundary point still counts as a member.
inline constexpr double kMembershipTol = 1e-12;

/// Halfspace test against the five-vertex classical polytope:
/// unit box plus the three faces  r_ij + r_jk - r_ik <= 1.
bool in_classical_polytope(const OverlapTriple& t, double tol = kMembershipTol);

/// Lower bound that two overlaps r1, r2 sharing a state put on the third
/// overlap for qubit (two-dimensional) state triples.
double qubit_bound(double r1, double r2);

/// Quantum body: the qubit_bound inequality applies only when the two
/// adjacent overlaps sum above 1; all three index assignments are checked.
bool in_quantum_set(const OverlapTriple& t, double tol = kMembershipTol);

/// Qubit body: all three qubit_bound inequalities hold unconditionally.
bool in_qubit_set(const OverlapTriple& t, double tol = kMembershipTol);

/// Signed distance past the classical face r_ab + r_bc - r_ac <= 1,
/// positive outside the polytope: (r_ab + r_bc - 1 - r_ac) / sqrt(3).
double coherence_witness(const OverlapTriple& t);

/// Signed slacks for all three nontrivial polytope faces, ordered so that
/// index 0 bounds r_ac, index 1 bounds r_ab, index 2 bounds r_bc.
std::array<double, 3> face_slacks(const OverlapTriple& t);

struct ProjectionOptions {
  int multistarts = 16;
  double objective_tol = 1e-8;
  double feasibility_tol = 1e-10;
  int max_outer = 60;
  int max_inner = 400;
  /// Additional start points, tried before the built-in ones.
  std::vector<std::array<double, 3>> extra_starts;
};

struct Projection {
  OverlapTriple nearest{0.0, 0.0, 0.0};
  double distance;
};

/// Euclidean projection onto one of the bodies. The classical polytope is
/// projected exactly via enumeration of its vertex-hull faces; the curved
/// bodies by multistart constrained local minimization. The returned point
/// is always a member of the target body. Throws ProjectionError if no
/// start converges.
Projection project_to_body(const OverlapTriple& t, Body body,
                           const ProjectionOptions& opts = {});

/// Distance to the qubit body; positive value certifies that no triple of
/// two-dimensional states can produce these overlaps.
double dimension_witness(const OverlapTriple& t, const ProjectionOptions& opts = {});

struct WitnessReport {
  OverlapTriple triple{0.0, 0.0, 0.0};
  std::array<double, 3> slacks;  // face_slacks(t)
  double wc = 0.0;               // coherence_witness(t)
  double wd = 0.0;               // dimension_witness(t)
  bool in_classical = false;
  bool in_quantum = false;
  bool in_qubit = false;
  bool unphysical = false;  // outside the quantum body
  OverlapTriple nearest_qubit{0.0, 0.0, 0.0};
};

WitnessReport witness_report(const OverlapTriple& t, const ProjectionOptions& opts = {});

enum class WitnessKind { Coherence, Dimension };

struct SigmaOptions {
  int resamples = 10000;
  std::uint64_t seed = 0x5eed5eed5eed5eedull;
  ProjectionOptions projection;
};

/// Witness value divided by its 1-sigma uncertainty, the latter propagated by
/// Monte Carlo resampling of the triple under the given covariance (samples
/// are clamped to the unit box). A zero covariance yields an infinite
/// sentinel with the sign of the witness. The covariance must be symmetric
/// positive semidefinite.
double witness_sigma(const OverlapTriple& t, const Eigen::Matrix3d& covariance,
                     WitnessKind kind, const SigmaOptions& opts = {});

}  // namespace geometry
}  // namespace homwit
