#include "homwit/geometry.hpp"

#include "homwit/errors.hpp"
#include "homwit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace homwit {

namespace {

constexpr double kSqrt3 = std::numbers::sqrt3;

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

OverlapTriple::OverlapTriple(double r_ab, double r_bc, double r_ac)
    : ab(r_ab), bc(r_bc), ac(r_ac) {
  constexpr double slack = 1e-12;
  for (double* r : {&ab, &bc, &ac}) {
    if (!std::isfinite(*r) || *r < -slack || *r > 1.0 + slack) {
      throw std::invalid_argument("OverlapTriple: components must lie in [0, 1]");
    }
    *r = clamp01(*r);
  }
}

OverlapTriple OverlapTriple::from_vector(const Eigen::Vector3d& v) {
  return OverlapTriple(v[0], v[1], v[2]);
}

namespace geometry {

namespace {

using Eigen::Vector3d;

// Vertices of the classical polytope: deterministic outcome patterns
// (all distinct, one pair equal in the three ways, all equal).
constexpr std::array<std::array<double, 3>, 5> kClassicalVertices = {{
    {0.0, 0.0, 0.0},
    {0.0, 0.0, 1.0},
    {0.0, 1.0, 0.0},
    {1.0, 0.0, 0.0},
    {1.0, 1.0, 1.0},
}};

// Determinant of the correlation matrix with off-diagonals g_i = 2 r_i - 1.
// Within the unit box this is >= 0 exactly on the qubit body.
double qubit_det(const Vector3d& r) {
  const double g_ab = 2.0 * r[0] - 1.0;
  const double g_bc = 2.0 * r[1] - 1.0;
  const double g_ac = 2.0 * r[2] - 1.0;
  return 1.0 + 2.0 * g_ab * g_bc * g_ac - g_ab * g_ab - g_bc * g_bc - g_ac * g_ac;
}

Vector3d qubit_det_grad(const Vector3d& r) {
  const double g_ab = 2.0 * r[0] - 1.0;
  const double g_bc = 2.0 * r[1] - 1.0;
  const double g_ac = 2.0 * r[2] - 1.0;
  return {4.0 * (g_bc * g_ac - g_ab), 4.0 * (g_ab * g_ac - g_bc),
          4.0 * (g_ab * g_bc - g_ac)};
}

// Squared-hinge form of the guarded qubit bound: equals qubit_bound(r1, r2)
// when r1 + r2 > 1 and vanishes (with vanishing gradient) otherwise.
double hinge_bound(double r1, double r2) {
  const double u = std::sqrt(r1 * r2);
  const double v = std::sqrt((1.0 - r1) * (1.0 - r2));
  const double w = u - v;
  return w > 0.0 ? w * w : 0.0;
}

// d/d(r1) and d/d(r2) of hinge_bound.
std::array<double, 2> hinge_bound_grad(double r1, double r2) {
  const double u = std::max(std::sqrt(r1 * r2), 1e-12);
  const double v = std::max(std::sqrt((1.0 - r1) * (1.0 - r2)), 1e-12);
  const double w = std::sqrt(r1 * r2) - std::sqrt((1.0 - r1) * (1.0 - r2));
  if (w <= 0.0) return {0.0, 0.0};
  return {w * (r2 / u + (1.0 - r2) / v), w * (r1 / u + (1.0 - r1) / v)};
}

struct Constraint {
  double value;    // h(x), feasible when <= 0
  Vector3d grad;
};

// Constraint set h_k(x) <= 0 describing a curved body inside the unit box.
using ConstraintEval = std::function<void(const Vector3d&, std::vector<Constraint>&)>;

void quantum_constraints(const Vector3d& x, std::vector<Constraint>& out) {
  out.resize(3);
  // bound on r_ac from (r_ab, r_bc)
  {
    auto g = hinge_bound_grad(x[0], x[1]);
    out[0].value = hinge_bound(x[0], x[1]) - x[2];
    out[0].grad = {g[0], g[1], -1.0};
  }
  // bound on r_bc from (r_ab, r_ac)
  {
    auto g = hinge_bound_grad(x[0], x[2]);
    out[1].value = hinge_bound(x[0], x[2]) - x[1];
    out[1].grad = {g[0], -1.0, g[1]};
  }
  // bound on r_ab from (r_bc, r_ac)
  {
    auto g = hinge_bound_grad(x[1], x[2]);
    out[2].value = hinge_bound(x[1], x[2]) - x[0];
    out[2].grad = {-1.0, g[0], g[1]};
  }
}

void qubit_constraints(const Vector3d& x, std::vector<Constraint>& out) {
  // Single polynomial constraint equivalent to the three unconditional
  // bounds: the correlation determinant must be non-negative.
  out.resize(1);
  out[0].value = -qubit_det(x);
  out[0].grad = -qubit_det_grad(x);
}

Vector3d clamp_box(Vector3d x) {
  for (int i = 0; i < 3; ++i) x[i] = clamp01(x[i]);
  return x;
}

// Augmented-Lagrangian value and gradient for the box-constrained subproblem.
struct AlEval {
  double value;
  Vector3d grad;
};

AlEval eval_al(const Vector3d& x, const Vector3d& target, const ConstraintEval& cons,
               const std::vector<double>& lambda, double rho,
               std::vector<Constraint>& scratch) {
  cons(x, scratch);
  AlEval e;
  const Vector3d d = x - target;
  e.value = d.squaredNorm();
  e.grad = 2.0 * d;
  for (std::size_t k = 0; k < scratch.size(); ++k) {
    const double m = lambda[k] + rho * scratch[k].value;
    if (m > 0.0) {
      e.value += (m * m - lambda[k] * lambda[k]) / (2.0 * rho);
      e.grad += m * scratch[k].grad;
    } else {
      e.value -= lambda[k] * lambda[k] / (2.0 * rho);
    }
  }
  return e;
}

struct LocalResult {
  Vector3d x;
  bool converged = false;
};

// Projected-gradient inner loop with Barzilai-Borwein steps and backtracking,
// wrapped in an augmented-Lagrangian outer loop.
LocalResult minimize_from(const Vector3d& start, const Vector3d& target,
                          const ConstraintEval& cons, std::size_t n_cons,
                          const ProjectionOptions& opts) {
  std::vector<Constraint> scratch;
  std::vector<double> lambda(n_cons, 0.0);
  double rho = 10.0;

  Vector3d x = clamp_box(start);
  double prev_objective = std::numeric_limits<double>::infinity();
  double prev_viol = std::numeric_limits<double>::infinity();

  for (int outer = 0; outer < opts.max_outer; ++outer) {
    AlEval cur = eval_al(x, target, cons, lambda, rho, scratch);
    double step = 1.0 / (2.0 + rho);
    for (int inner = 0; inner < opts.max_inner; ++inner) {
      Vector3d x_new = clamp_box(x - step * cur.grad);
      Vector3d s = x_new - x;
      if (s.lpNorm<Eigen::Infinity>() < 1e-13) break;
      AlEval nxt = eval_al(x_new, target, cons, lambda, rho, scratch);
      if (nxt.value <= cur.value - 1e-4 * cur.grad.dot(-s)) {
        Vector3d y = nxt.grad - cur.grad;
        const double sy = s.dot(y);
        step = sy > 1e-16 ? std::clamp(s.squaredNorm() / sy, 1e-9, 1e3) : step * 2.0;
        x = x_new;
        cur = nxt;
      } else {
        step *= 0.5;
        if (step < 1e-15) break;
      }
    }

    cons(x, scratch);
    double viol = 0.0;
    for (const auto& c : scratch) viol = std::max(viol, c.value);
    const double objective = (x - target).squaredNorm();

    if (viol <= opts.feasibility_tol &&
        std::abs(objective - prev_objective) <= opts.objective_tol * std::max(1.0, objective)) {
      return {x, true};
    }
    prev_objective = objective;

    for (std::size_t k = 0; k < scratch.size(); ++k) {
      lambda[k] = std::max(0.0, lambda[k] + rho * scratch[k].value);
    }
    if (viol > 0.25 * prev_viol) rho = std::min(rho * 4.0, 1e12);
    prev_viol = viol;
  }
  return {x, false};
}

// Pull a nearly feasible point exactly inside the body along the segment
// toward a strictly interior anchor.
Vector3d nudge_feasible(const Vector3d& x, const ConstraintEval& cons) {
  std::vector<Constraint> scratch;
  auto max_viol = [&](const Vector3d& p) {
    cons(p, scratch);
    double v = -std::numeric_limits<double>::infinity();
    for (const auto& c : scratch) v = std::max(v, c.value);
    return v;
  };
  if (max_viol(x) <= 0.0) return x;

  const Vector3d anchor(0.5, 0.5, 0.5);  // strictly interior to both curved bodies
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    const Vector3d p = x + mid * (anchor - x);
    (max_viol(p) <= 0.0 ? hi : lo) = mid;
  }
  return x + hi * (anchor - x);
}

Projection project_curved(const OverlapTriple& t, Body body, const ProjectionOptions& opts) {
  const bool member = body == Body::Qubit ? in_qubit_set(t) : in_quantum_set(t);
  if (member) return {t, 0.0};

  const ConstraintEval cons = body == Body::Qubit ? ConstraintEval(qubit_constraints)
                                                  : ConstraintEval(quantum_constraints);
  const std::size_t n_cons = body == Body::Qubit ? 1 : 3;
  const Vector3d target = t.as_vector();

  std::vector<Vector3d> starts;
  for (const auto& s : opts.extra_starts) starts.emplace_back(s[0], s[1], s[2]);
  const std::array<Vector3d, 10> fixed = {{
      clamp_box(target),
      {0.5, 0.5, 0.5},
      {0.25, 0.25, 0.25},
      {1.0, 1.0, 1.0},
      {1.0, 0.5, 0.5},
      {0.5, 1.0, 0.5},
      {0.5, 0.5, 1.0},
      {0.0, 0.5, 0.5},
      {0.5, 0.0, 0.5},
      {0.5, 0.5, 0.0},
  }};
  for (const auto& s : fixed) starts.push_back(s);
  rng::Stream extra(0xc0ffee);
  while (starts.size() < static_cast<std::size_t>(opts.multistarts) + opts.extra_starts.size()) {
    starts.emplace_back(extra.uniform01(), extra.uniform01(), extra.uniform01());
  }
  if (starts.size() > static_cast<std::size_t>(opts.multistarts) + opts.extra_starts.size()) {
    starts.resize(static_cast<std::size_t>(opts.multistarts) + opts.extra_starts.size());
  }

  bool any = false;
  Vector3d best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& s : starts) {
    LocalResult lr = minimize_from(s, target, cons, n_cons, opts);
    if (!lr.converged) continue;
    const Vector3d feas = nudge_feasible(lr.x, cons);
    const double dist = (feas - target).norm();
    // Deterministic reduction: strictly better distance wins, earlier start
    // breaks ties.
    if (!any || dist < best_dist - 1e-15) {
      any = true;
      best = feas;
      best_dist = dist;
    }
  }
  if (!any) {
    throw ProjectionError("projection onto curved body did not converge from any start");
  }
  return {OverlapTriple::from_vector(best), best_dist};
}

// Exact projection onto the classical polytope by enumerating the affine
// hulls of all vertex subsets of size <= 3.
Projection project_classical(const OverlapTriple& t) {
  if (in_classical_polytope(t)) return {t, 0.0};

  const Vector3d p = t.as_vector();
  double best_dist = std::numeric_limits<double>::infinity();
  Vector3d best = Vector3d::Zero();

  const int n = static_cast<int>(kClassicalVertices.size());
  auto consider = [&](const Vector3d& cand) {
    const double d = (cand - p).norm();
    if (d < best_dist) {
      best_dist = d;
      best = cand;
    }
  };

  for (int i = 0; i < n; ++i) {
    const Vector3d v0(kClassicalVertices[i][0], kClassicalVertices[i][1],
                      kClassicalVertices[i][2]);
    consider(v0);
    for (int j = i + 1; j < n; ++j) {
      const Vector3d v1(kClassicalVertices[j][0], kClassicalVertices[j][1],
                        kClassicalVertices[j][2]);
      const Vector3d d1 = v1 - v0;
      const double c = d1.dot(p - v0) / d1.squaredNorm();
      if (c >= 0.0 && c <= 1.0) consider(v0 + c * d1);
      for (int k = j + 1; k < n; ++k) {
        const Vector3d v2(kClassicalVertices[k][0], kClassicalVertices[k][1],
                          kClassicalVertices[k][2]);
        const Vector3d d2 = v2 - v0;
        Eigen::Matrix2d gram;
        gram << d1.squaredNorm(), d1.dot(d2), d1.dot(d2), d2.squaredNorm();
        const double det = gram.determinant();
        if (det < 1e-14) continue;  // degenerate triangle
        const Eigen::Vector2d rhs(d1.dot(p - v0), d2.dot(p - v0));
        const Eigen::Vector2d c2 = gram.inverse() * rhs;
        const double c0 = 1.0 - c2[0] - c2[1];
        if (c2[0] >= -1e-12 && c2[1] >= -1e-12 && c0 >= -1e-12) {
          consider(v0 + c2[0] * d1 + c2[1] * d2);
        }
      }
    }
  }
  return {OverlapTriple::from_vector(clamp_box(best)), best_dist};
}

}  // namespace

bool in_classical_polytope(const OverlapTriple& t, double tol) {
  const auto s = face_slacks(t);
  return s[0] <= tol && s[1] <= tol && s[2] <= tol;
}

double qubit_bound(double r1, double r2) {
  const double u = std::sqrt(r1 * r2);
  const double v = std::sqrt((1.0 - r1) * (1.0 - r2));
  const double w = u - v;
  return w * w;
}

bool in_quantum_set(const OverlapTriple& t, double tol) {
  if (t.ab + t.bc > 1.0 && t.ac < qubit_bound(t.ab, t.bc) - tol) return false;
  if (t.ab + t.ac > 1.0 && t.bc < qubit_bound(t.ab, t.ac) - tol) return false;
  if (t.bc + t.ac > 1.0 && t.ab < qubit_bound(t.bc, t.ac) - tol) return false;
  return true;
}

bool in_qubit_set(const OverlapTriple& t, double tol) {
  return t.ac >= qubit_bound(t.ab, t.bc) - tol && t.bc >= qubit_bound(t.ab, t.ac) - tol &&
         t.ab >= qubit_bound(t.bc, t.ac) - tol;
}

double coherence_witness(const OverlapTriple& t) {
  return (t.ab + t.bc - 1.0 - t.ac) / kSqrt3;
}

std::array<double, 3> face_slacks(const OverlapTriple& t) {
  return {
      (t.ab + t.bc - 1.0 - t.ac) / kSqrt3,
      (t.bc + t.ac - 1.0 - t.ab) / kSqrt3,
      (t.ab + t.ac - 1.0 - t.bc) / kSqrt3,
  };
}

Projection project_to_body(const OverlapTriple& t, Body body, const ProjectionOptions& opts) {
  switch (body) {
    case Body::Classical:
      return project_classical(t);
    case Body::Quantum:
    case Body::Qubit:
      return project_curved(t, body, opts);
  }
  throw std::logic_error("project_to_body: unknown body");
}

double dimension_witness(const OverlapTriple& t, const ProjectionOptions& opts) {
  return project_to_body(t, Body::Qubit, opts).distance;
}

WitnessReport witness_report(const OverlapTriple& t, const ProjectionOptions& opts) {
  const Projection qb = project_to_body(t, Body::Qubit, opts);
  WitnessReport r{.triple = t,
                  .slacks = face_slacks(t),
                  .wc = coherence_witness(t),
                  .wd = qb.distance,
                  .in_classical = in_classical_polytope(t),
                  .in_quantum = in_quantum_set(t),
                  .in_qubit = in_qubit_set(t),
                  .unphysical = !in_quantum_set(t),
                  .nearest_qubit = qb.nearest};
  return r;
}

double witness_sigma(const OverlapTriple& t, const Eigen::Matrix3d& covariance,
                     WitnessKind kind, const SigmaOptions& opts) {
  if ((covariance - covariance.transpose()).lpNorm<Eigen::Infinity>() > 1e-12) {
    throw std::invalid_argument("witness_sigma: covariance must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(covariance);
  if (eig.eigenvalues().minCoeff() < -1e-12) {
    throw std::invalid_argument("witness_sigma: covariance must be positive semidefinite");
  }
  if (opts.resamples < 2) {
    throw std::invalid_argument("witness_sigma: need at least 2 resamples");
  }

  Eigen::Vector3d sqrt_eig = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::Matrix3d factor = eig.eigenvectors() * sqrt_eig.asDiagonal();

  ProjectionOptions warm = opts.projection;
  double value = 0.0;
  if (kind == WitnessKind::Coherence) {
    value = coherence_witness(t);
  } else {
    const Projection base = project_to_body(t, Body::Qubit, opts.projection);
    value = base.distance;
    warm.multistarts = std::min(warm.multistarts, 4);
    warm.extra_starts.push_back(base.nearest.as_array());
  }

  // A degenerate covariance admits no spread: the significance is a sign.
  if (covariance.lpNorm<Eigen::Infinity>() < 1e-300) {
    if (value == 0.0) return 0.0;
    return std::copysign(std::numeric_limits<double>::infinity(), value);
  }

  rng::Stream stream(rng::derive(opts.seed, rng::kTagResample, 0));
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(opts.resamples));
  for (int i = 0; i < opts.resamples; ++i) {
    const Eigen::Vector3d z(stream.normal(), stream.normal(), stream.normal());
    Eigen::Vector3d x = t.as_vector() + factor * z;
    for (int k = 0; k < 3; ++k) x[k] = clamp01(x[k]);
    const OverlapTriple rt = OverlapTriple::from_vector(x);
    samples.push_back(kind == WitnessKind::Coherence ? coherence_witness(rt)
                                                     : project_to_body(rt, Body::Qubit, warm).distance);
  }

  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  var /= static_cast<double>(samples.size() - 1);
  const double sigma = std::sqrt(var);

  if (sigma < 1e-300) {
    if (value == 0.0) return 0.0;
    return std::copysign(std::numeric_limits<double>::infinity(), value);
  }
  return value / sigma;
}

}  // namespace geometry
}  // namespace homwit
