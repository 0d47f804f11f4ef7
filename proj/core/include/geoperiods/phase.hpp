#pragma once

// The two-point phase φ_α(t,s) = ε(t − s) + d(γ̃(t), α γ̃(s)) on the universal
// cover, its derivatives, critical points, direction cones and the geometric
// bounds used by the stationary phase argument.

#include <iosfwd>
#include <memory>
#include <utility>
#include <vector>

#include "geoperiods/curve.hpp"
#include "geoperiods/surface.hpp"

namespace geoperiods {

/// Smallest distance d(γ̃(t), αγ̃(s)) accepted by the phase routines.
inline constexpr double kPhaseMinDistance = 0.1;

struct PhaseGradient {
  double dt = 0.0;
  double ds = 0.0;
};

struct PhaseHessian {
  double tt = 0.0;
  double ts = 0.0;
  double ss = 0.0;
  double det() const { return tt * ss - ts * ts; }
};

double phase_distance(const Curve& c, const DeckTransform& alpha, double t, double s);
double phase(const Curve& c, const DeckTransform& alpha, double eps, double t, double s);
/// First variation: ∂_t r = −⟨σ′(0), γ̃′(t)⟩, ∂_s r = ⟨σ′(r), (αγ̃)′(s)⟩.
PhaseGradient phase_gradient(const Curve& c, const DeckTransform& alpha, double eps, double t,
                             double s);
/// Pure entries from the circle-curvature formulas; mixed entry by a
/// Richardson-extrapolated central difference of ∂_sφ (h = 1e−3).
PhaseHessian phase_hessian(const Curve& c, const DeckTransform& alpha, double eps, double t,
                           double s);
/// All three entries from second differences of φ (h = 3e−3, one Richardson step).
PhaseHessian phase_hessian_fd(const Curve& c, const DeckTransform& alpha, double eps, double t,
                              double s);

/// Pieces of the ∂²_s formula at one node.
struct SecondVariation {
  double cos_theta = 0.0;     // transversal part of (αγ̃)′(s) against σ′(r)
  int sign = 1;               // sign of ⟨σ′(r), D/ds αγ̃(s)⟩
  double kappa_curve = 0.0;   // |geodesic curvature| of γ̃ at s
  double kappa_circle = 0.0;  // circle about γ̃(t) through αγ̃(s)
  double value() const { return cos_theta * (sign * kappa_curve + cos_theta * kappa_circle); }
};
SecondVariation second_variation_s(const Curve& c, const DeckTransform& alpha, double t, double s);

struct PhaseNode {
  double t, s, r, phi, dt, ds, tt, ts, ss, fd_tt, fd_ts, fd_ss;
};

struct PhaseGrid {
  std::shared_ptr<const Curve> curve;
  DeckTransform alpha = DeckTransform::translation(0, 0);
  double eps = 0.0;
  std::vector<double> t, s;
  std::vector<PhaseNode> nodes;  // row-major, t outer

  const PhaseNode& at(std::size_t i, std::size_t j) const { return nodes[i * s.size() + j]; }
  /// `t,s,r,phi,dphi_t,dphi_s,d2phi_tt,d2phi_ts,d2phi_ss,fd_tt,fd_ts,fd_ss`
  void write_csv(std::ostream& os) const;
};

/// Rejects the identity deck transform and comparison-only surfaces.
PhaseGrid build_phase_grid(std::shared_ptr<const Curve> c, const DeckTransform& alpha, double eps,
                           std::vector<double> t, std::vector<double> s, unsigned jobs = 0);
/// n evenly spaced points of [a, b] (endpoints included).
std::vector<double> linspace(double a, double b, std::size_t n);

struct CriticalPoint {
  double t = 0.0, s = 0.0;
  double cos_t = 0.0;  // ∂_t r, equals −ε at a critical point
  double cos_s = 0.0;  // ∂_s r, equals +ε
  double grad_norm = 0.0;
  double det = 0.0;    // Hessian determinant
  int iterations = 0;
};

struct CriticalSearch {
  std::vector<CriticalPoint> points;
  std::vector<std::pair<double, double>> skipped;  // seeds where Newton failed
};

/// Damped Newton on ∇φ from each seed; converged points (|∇φ| ≤ 1e−8) are
/// deduplicated. Requires |eps| ≤ 1 − 1e−3.
CriticalSearch critical_points(const Curve& c, const DeckTransform& alpha, double eps,
                               const std::vector<std::pair<double, double>>& seeds,
                               unsigned jobs = 0);
/// n × n seeds on [0, L)².
std::vector<std::pair<double, double>> grid_seeds(double L, std::size_t n);

struct ConeWeights {
  double w_plus = 0.0, w_zero = 1.0, w_minus = 0.0;
};

/// Seventh-order smoothstep S(x) = 35x⁴ − 84x⁵ + 70x⁶ − 20x⁷ on [0, 1].
double smoothstep7(double x);
/// Partition of unity over Fermi-frame directions: w_plus = 1 for ξ₂ ≥ δ/2,
/// 0 for ξ₂ ≤ δ/4; w_minus(ξ) = w_plus(−ξ).
ConeWeights cone_classify(const Vec2& xi, double delta);

struct MixedBoundReport {
  std::size_t checked = 0;
  double max_excess = -1e300;  // max |∂_t∂_sφ| − 2/r
  bool holds = true;
};
/// |∂_t∂_sφ| ≤ 2/r + slack at nodes with r ≥ r_min.
MixedBoundReport mixed_bound_check(const PhaseGrid& g, double r_min = 1.0, double slack = 1e-4);

struct CircleSandwichReport {
  std::size_t checked = 0;
  double min_gap = 1e300;     // min κ_S − 𝐤
  double max_excess = -1e300; // max κ_S − 𝐤 − 1/r
  bool holds = true;
};
/// 0 < κ_S − 𝐤(σ′(r)) < 1/r at every node, strict up to `slack`.
CircleSandwichReport circle_sandwich_check(const PhaseGrid& g, double slack = 1e-10,
                                           unsigned jobs = 0);

struct PureDerivativeReport {
  bool hypothesis_met = false;
  double min_hypothesis = 1e300;  // min |±κ_γ̃ + √(1−ε²) κ_S| over 𝓘 × 𝓘
  bool antecedent = false;        // ∂_sφ vanishes somewhere on 𝓘 × 𝓘
  double min_abs_ds = 1e300;
  double min_abs_dss = 1e300;
  double bound = 0.0;             // √δ ε₀ / 2
  bool implication_holds = false;
  double r_min = 1e300;
  double large_r_threshold = 0.0; // 16 / (ε₀ √δ)
  bool large_r_applicable = false;
  double max_abs_ts = 0.0;
  bool large_r_holds = false;     // max |∂_t∂_sφ| ≤ ε₀√δ/8 when applicable
};
/// Grid check of the pure second derivative bound on 𝓘 × 𝓘, 𝓘 = [a, b].
PureDerivativeReport pure_derivative_check(const Curve& c, const DeckTransform& alpha, double eps,
                                           double a, double b, double eps0, double delta,
                                           std::size_t n = 33, unsigned jobs = 0);

struct ComparisonTriangle {
  double actual = 0.0;  // d(p, q)
  double flat = 0.0;    // Euclidean side from d(o,p), d(o,q) and the angle at o
};
/// Nonpositive curvature forces actual ≥ flat.
ComparisonTriangle comparison_triangle(const SurfaceSpec& S, const SurfacePoint& o,
                                       const SurfacePoint& p, const SurfacePoint& q);

}  // namespace geoperiods
