#include "homwit/interference.hpp"

#include "homwit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace homwit::interference {

namespace {

using std::complex;

const std::array<std::array<int, 3>, 6> kPermutations = {{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
}};

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

std::string to_string(PairTag tag) {
  switch (tag) {
    case PairTag::AB: return "AB";
    case PairTag::BC: return "BC";
    case PairTag::AC: return "AC";
    case PairTag::Insensitive: return "insensitive";
  }
  return "?";
}

void Interferometer::validate() const {
  const Matrix6cd defect = unitary.adjoint() * unitary - Matrix6cd::Identity();
  if (defect.cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("Interferometer: transfer matrix is not unitary");
  }
  std::array<bool, kModes> seen_input{};
  for (int m : input_modes) {
    if (m < 0 || m >= kModes) throw std::invalid_argument("Interferometer: bad input mode");
    if (seen_input[m]) throw std::invalid_argument("Interferometer: duplicate input mode");
    seen_input[m] = true;
  }
  std::array<bool, kModes> seen_output{};
  for (const auto& pair : pair_outputs) {
    for (int m : pair) {
      if (m < 0 || m >= kModes) throw std::invalid_argument("Interferometer: bad output mode");
      if (seen_output[m]) {
        throw std::invalid_argument("Interferometer: pair output sets must be disjoint");
      }
      seen_output[m] = true;
    }
  }
}

Interferometer build_network() {
  const double s = 1.0 / std::sqrt(2.0);

  Matrix6cd layer = Matrix6cd::Zero();
  for (int b = 0; b < 3; ++b) {
    layer(2 * b, 2 * b) = s;
    layer(2 * b, 2 * b + 1) = s;
    layer(2 * b + 1, 2 * b) = s;
    layer(2 * b + 1, 2 * b + 1) = -s;
  }

  // Arm routing between the splitter layers, source -> target:
  //   A: 0 -> 0 (AB), 1 -> 4 (AC)
  //   B: 2 -> 1 (AB), 3 -> 2 (BC)
  //   C: 4 -> 3 (BC), 5 -> 5 (AC)
  Matrix6cd perm = Matrix6cd::Zero();
  const std::array<int, 6> target = {0, 4, 1, 2, 3, 5};
  for (int src = 0; src < kModes; ++src) perm(target[src], src) = 1.0;

  Interferometer net;
  net.unitary = layer * perm * layer;
  net.input_modes = {0, 2, 4};
  net.pair_outputs = {{{0, 1}, {2, 3}, {4, 5}}};
  net.validate();
  return net;
}

GramMatrix GramMatrix::from_triple(const OverlapTriple& t) {
  Eigen::Matrix3cd s;
  const double s_ab = std::sqrt(t.ab);
  const double s_bc = std::sqrt(t.bc);
  const double s_ac = std::sqrt(t.ac);
  s << 1.0, s_ab, s_ac,
       s_ab, 1.0, s_bc,
       s_ac, s_bc, 1.0;
  return from_matrix(s);
}

GramMatrix GramMatrix::from_matrix(const Eigen::Matrix3cd& s) {
  if ((s - s.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("GramMatrix: matrix must be hermitian");
  }
  for (int i = 0; i < 3; ++i) {
    if (std::abs(s(i, i) - 1.0) > 1e-12) {
      throw std::invalid_argument("GramMatrix: diagonal must be 1");
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> eig(s);
  const double min_eig = eig.eigenvalues().minCoeff();
  if (min_eig < -1e-6) {
    throw std::invalid_argument(
        "GramMatrix: not positive semidefinite (overlaps not realizable)");
  }
  if (min_eig >= 0.0) return GramMatrix(s);

  // Boundary repair: clip the slightly negative eigenvalue and restore the
  // unit diagonal.
  Eigen::Vector3d clipped = eig.eigenvalues().cwiseMax(0.0);
  Eigen::Matrix3cd repaired =
      eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().adjoint();
  Eigen::Vector3d d = repaired.diagonal().real().cwiseMax(1e-30).cwiseInverse().cwiseSqrt();
  repaired = d.asDiagonal() * repaired * d.asDiagonal();
  for (int i = 0; i < 3; ++i) repaired(i, i) = 1.0;
  return GramMatrix(repaired);
}

GramMatrix GramMatrix::identity() { return GramMatrix(Eigen::Matrix3cd::Identity()); }

GramMatrix GramMatrix::all_ones() { return GramMatrix(Eigen::Matrix3cd::Ones()); }

OverlapTriple GramMatrix::overlaps() const {
  return OverlapTriple(std::norm(s_(0, 1)), std::norm(s_(1, 2)), std::norm(s_(0, 2)));
}

GramMatrix GramMatrix::scaled(double lambda) const {
  if (lambda < 0.0 || lambda > 1.0) {
    throw std::invalid_argument("GramMatrix::scaled: lambda must lie in [0, 1]");
  }
  Eigen::Matrix3cd s = s_ * lambda;
  for (int i = 0; i < 3; ++i) s(i, i) = 1.0;
  return GramMatrix(s);
}

OutputDistribution::OutputDistribution(std::vector<double> probs, std::vector<PatternInfo> info)
    : probs_(std::move(probs)), info_(std::move(info)) {
  if (probs_.size() != info_.size() || probs_.size() != kPatterns) {
    throw std::logic_error("OutputDistribution: pattern table size mismatch");
  }
  double total = 0.0;
  for (double& p : probs_) {
    if (p < -1e-12) throw std::logic_error("OutputDistribution: negative probability");
    p = std::max(p, 0.0);
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::logic_error("OutputDistribution: probabilities do not sum to 1");
  }
}

std::vector<PatternInfo> enumerate_patterns(const Interferometer& net) {
  std::vector<PatternInfo> out;
  out.reserve(kPatterns);
  for (int i = 0; i < kModes; ++i) {
    for (int j = i; j < kModes; ++j) {
      for (int k = j; k < kModes; ++k) {
        PatternInfo p;
        p.modes = {i, j, k};

        std::array<int, kModes> occ{};
        ++occ[i];
        ++occ[j];
        ++occ[k];
        p.doubly_occupied = 0;
        p.triply_occupied = 0;
        p.bunched = false;
        for (int m = 0; m < kModes; ++m) {
          if (occ[m] == 2) ++p.doubly_occupied;
          if (occ[m] == 3) ++p.triply_occupied;
          if (occ[m] >= 2) p.bunched = true;
        }

        p.tag = PairTag::Insensitive;
        for (int pair = 0; pair < 3; ++pair) {
          const int at_pair = occ[net.pair_outputs[pair][0]] + occ[net.pair_outputs[pair][1]];
          if (at_pair == 2) {
            p.tag = static_cast<PairTag>(pair);
            break;  // at most one pair can hold exactly two of three photons
          }
        }
        out.push_back(p);
      }
    }
  }
  return out;
}

OutputDistribution output_distribution(const Interferometer& net, const GramMatrix& gram) {
  net.validate();
  const Eigen::Matrix3cd& s = gram.matrix();
  std::vector<PatternInfo> info = enumerate_patterns(net);

  std::vector<double> probs(info.size());
  for (std::size_t idx = 0; idx < info.size(); ++idx) {
    const auto& d = info[idx].modes;

    // M[j][k]: amplitude for photon j to reach the k-th detected mode.
    Eigen::Matrix3cd m;
    for (int j = 0; j < kPhotons; ++j) {
      for (int k = 0; k < kPhotons; ++k) {
        m(j, k) = net.unitary(d[k], net.input_modes[j]);
      }
    }

    complex<double> acc = 0.0;
    for (const auto& sigma : kPermutations) {
      for (const auto& rho : kPermutations) {
        complex<double> term = 1.0;
        for (int k = 0; k < kPhotons; ++k) {
          // photon sigma(k) interferes with photon rho(k) at detector k; the
          // internal-state inner product enters as <chi_rho|chi_sigma>
          term *= s(rho[k], sigma[k]) * m(sigma[k], k) * std::conj(m(rho[k], k));
        }
        acc += term;
      }
    }

    double norm = 1.0;
    for (int c = 0; c < kModes; ++c) {
      int mult = 0;
      for (int x : d) mult += (x == c);
      if (mult > 1) norm *= factorial(mult);
    }
    probs[idx] = acc.real() / norm;
  }
  return OutputDistribution(std::move(probs), std::move(info));
}

double hom_bunching_probability(double overlap) {
  if (overlap < 0.0 || overlap > 1.0) {
    throw std::invalid_argument("hom_bunching_probability: overlap must lie in [0, 1]");
  }
  return 0.5 * (1.0 + overlap);
}

std::array<PairConditional, 3> pair_conditionals(const OutputDistribution& dist) {
  std::array<PairConditional, 3> out{};
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const PatternInfo& p = dist.patterns()[i];
    if (p.tag == PairTag::Insensitive) continue;
    auto& c = out[static_cast<int>(p.tag)];
    (p.bunched ? c.bunched : c.antibunched) += dist.prob(i);
  }
  return out;
}

RecoveredOverlaps overlaps_from_distribution(const OutputDistribution& dist) {
  const auto cond = pair_conditionals(dist);
  std::array<double, 3> r{};
  std::array<bool, 3> clamped{};
  for (int pair = 0; pair < 3; ++pair) {
    const double mass = cond[pair].bunched + cond[pair].antibunched;
    if (mass <= 1e-300) {
      throw EstimationError("overlap undefined: no conditional mass for pair " +
                            to_string(static_cast<PairTag>(pair)));
    }
    const double pb = cond[pair].bunched / mass;
    const double raw = 2.0 * pb - 1.0;
    clamped[pair] = raw < 0.0 || raw > 1.0;
    r[pair] = std::clamp(raw, 0.0, 1.0);
  }
  return {OverlapTriple(r[0], r[1], r[2]), clamped};
}

double dip_curve(double dx, double a, double v, double sigma) {
  return a * (1.0 - v * std::exp(-sigma * dx * dx));
}

}  // namespace homwit::interference
