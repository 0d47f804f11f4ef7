#pragma once

// Closed unit-speed curves on a SurfaceSpec, their geodesic and signed normal
// curvature, built-in geodesic circles and Fermi charts.
//
// A curve lives on the universal cover. It is either closed in chart
// coordinates or closed up to a deck transform α: γ(s + L) = α(γ(s)).

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "geoperiods/surface.hpp"

namespace geoperiods {

/// Position and the first two chart derivatives at one parameter value.
struct CurveJet {
  SurfacePoint x;
  Vec2 d1;
  Vec2 d2;
};

enum class Orientation { CounterClockwise, Clockwise };

struct CurveSample {
  double s;
  CurveJet jet;
  double h;  // signed normal curvature
};

class Curve {
 public:
  using JetFn = std::function<CurveJet(double)>;
  static constexpr std::size_t kDefaultCache = 4096;

  /// `jet` must already be unit speed on [0, L).
  static Curve from_unit_speed(SurfaceSpec S, JetFn jet, double L, std::string name,
                               std::optional<DeckTransform> closing = std::nullopt,
                               std::size_t n_cache = kDefaultCache);
  /// Any regular parametrization on [0, T); resampled to arc length.
  static Curve from_parametric(SurfaceSpec S, JetFn jet, double T, std::string name,
                               std::optional<DeckTransform> closing = std::nullopt,
                               std::size_t n_cache = kDefaultCache);
  /// Periodic point list (first and last rows identified), periodic cubic
  /// spline, then arc-length resampling.
  static Curve from_points(SurfaceSpec S, const std::vector<double>& t,
                           const std::vector<SurfacePoint>& pts, std::string name,
                           std::size_t n_cache = kDefaultCache);
  /// CSV with header `t,x1,x2`.
  static Curve from_csv(SurfaceSpec S, const std::string& path,
                        std::size_t n_cache = kDefaultCache);

  const SurfaceSpec& surface() const { return *surface_; }
  const std::string& name() const { return name_; }
  double length() const { return L_; }
  const std::optional<DeckTransform>& closing() const { return closing_; }
  const std::vector<CurveSample>& cache() const { return cache_; }

  /// Unit-speed jet at any real s (periodic, or extended through the deck).
  CurveJet jet(double s) const;
  SurfacePoint point(double s) const { return jet(s).x; }
  TangentVec tangent(double s) const;
  /// D/ds γ′, in chart components.
  Vec2 covariant_acceleration(double s) const;
  double geodesic_curvature(double s) const;
  double signed_normal_curvature(double s) const;
  /// γ′(s)^⊥ (the +π/2 rotation).
  TangentVec normal(double s) const;

  Curve shifted(double c) const;
  Curve reversed() const;

 private:
  Curve(SurfaceSpec S, JetFn jet, double L, std::string name, std::optional<DeckTransform> closing,
        std::size_t n_cache);
  void build_cache(std::size_t n);

  std::shared_ptr<const SurfaceSpec> surface_;
  JetFn unit_;
  double L_ = 0.0;
  std::string name_;
  std::optional<DeckTransform> closing_;
  std::vector<CurveSample> cache_;
};

double geodesic_curvature(const Curve& c, double s);
double signed_normal_curvature(const Curve& c, double s);

/// Unit-speed geodesic circle of radius r ∈ [1e−2, 50], starting at the point
/// reached from `center` in frame direction 0.
Curve geodesic_circle(const SurfaceSpec& S, const SurfacePoint& center, double r,
                      Orientation o = Orientation::CounterClockwise,
                      std::size_t n_cache = Curve::kDefaultCache);

/// Closed geodesic of the half-plane: the imaginary axis from i·y0, closed by
/// z ↦ e^{ell} z.
Curve vertical_geodesic(const SurfaceSpec& S, double ell, double y0 = 1.0);
/// Equidistant curve at distance d > 0 from the imaginary axis (right side),
/// closed by z ↦ e^{ell} z.
Curve hypercycle(const SurfaceSpec& S, double d, double ell);
/// Straight closed geodesic on the torus from p in lattice direction (m, n).
Curve torus_line(const SurfaceSpec& S, const SurfacePoint& p, long m, long n);
/// Chart-coordinate curve c + r(1 + eta·cos(k ψ))(cos ψ, sin ψ).
Curve perturbed_circle(const SurfaceSpec& S, const SurfacePoint& center, double r, double eta,
                       int k, std::size_t n_cache = Curve::kDefaultCache);

/// Fermi coordinates about a curve: (x1, x2) ↦ exp_{γ(x1)}(x2 γ′(x1)^⊥).
class FermiChart {
 public:
  explicit FermiChart(std::shared_ptr<const Curve> c, double width = 0.5)
      : curve_(std::move(c)), width_(width) {}

  const Curve& curve() const { return *curve_; }
  double width() const { return width_; }

  SurfacePoint map(double x1, double x2) const;
  /// Chart derivatives (∂/∂x1, ∂/∂x2) of `map`.
  std::pair<Vec2, Vec2> differential(double x1, double x2) const;
  /// Pulled-back metric in Fermi coordinates.
  Mat2 metric(double x1, double x2) const;
  /// Inverse of `map` by Newton iteration (≤ 50 steps); x1 ∈ [0, L).
  Vec2 coordinates(const SurfacePoint& p) const;

 private:
  std::shared_ptr<const Curve> curve_;
  double width_;
};

inline Vec2 fermi_coordinates(const FermiChart& chart, const SurfacePoint& p) {
  return chart.coordinates(p);
}

}  // namespace geoperiods
