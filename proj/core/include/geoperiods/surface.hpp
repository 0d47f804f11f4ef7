#pragma once

// Model surfaces: flat tori, the upper half-plane with K ≡ −a², conformal
// metrics e^{2u}(dx² + dy²) on a rectangle, and the round sphere (comparison
// only). Everything here is a pure function of its arguments.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "geoperiods/vec.hpp"

namespace geoperiods {

/// Chart coordinates. Hyperbolic: upper half-plane (x2 > 0). Sphere:
/// (colatitude, longitude). Torus points may be lifted (unreduced).
struct SurfacePoint {
  double x1 = 0.0;
  double x2 = 0.0;

  Vec2 vec() const { return {x1, x2}; }
  static SurfacePoint from(const Vec2& v) { return {v.x, v.y}; }
};

struct TangentVec {
  SurfacePoint base;
  Vec2 v;
};

struct Rect {
  double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;

  bool contains(const SurfacePoint& p) const {
    return p.x1 > x_min && p.x1 < x_max && p.x2 > y_min && p.x2 < y_max;
  }
};

/// Scalar field u for the conformal metric e^{2u}(dx² + dy²). Subclasses may
/// override the derivatives with closed forms; the defaults are central
/// differences with step 1e-4.
class ConformalField {
 public:
  virtual ~ConformalField() = default;
  virtual double value(double x, double y) const = 0;
  virtual Vec2 gradient(double x, double y) const;
  virtual double laplacian(double x, double y) const;
  virtual std::string name() const = 0;

  static constexpr double kStep = 1e-4;
};

/// Field given by an arbitrary callable; derivatives by finite differences.
class LambdaField final : public ConformalField {
 public:
  LambdaField(std::string name, std::function<double(double, double)> u)
      : name_(std::move(name)), u_(std::move(u)) {}
  double value(double x, double y) const override { return u_(x, y); }
  std::string name() const override { return name_; }

 private:
  std::string name_;
  std::function<double(double, double)> u_;
};

/// u ≡ 0.
class FlatField final : public ConformalField {
 public:
  double value(double, double) const override { return 0.0; }
  Vec2 gradient(double, double) const override { return {}; }
  double laplacian(double, double) const override { return 0.0; }
  std::string name() const override { return "flat"; }
};

/// u = −log(a·y): the upper half-plane with K ≡ −a².
class HalfPlaneField final : public ConformalField {
 public:
  explicit HalfPlaneField(double a = 1.0) : a_(a) {}
  double value(double, double y) const override;
  Vec2 gradient(double, double y) const override;
  double laplacian(double, double y) const override;
  std::string name() const override { return "half_plane"; }
  double a() const { return a_; }

 private:
  double a_;
};

/// u = log(2/(1 − |x|²)): the Poincaré disk, K ≡ −1.
class PoincareDiskField final : public ConformalField {
 public:
  double value(double x, double y) const override;
  Vec2 gradient(double x, double y) const override;
  double laplacian(double x, double y) const override;
  std::string name() const override { return "poincare_disk"; }
};

/// Half-plane metric with a Gaussian bump, u = −log y + β·exp(−|z − z0|²/σ²).
/// K = −e^{−2w}(1 + y²Δw) stays ≤ 0 for small β; checked at construction.
class BumpedHalfPlaneField final : public ConformalField {
 public:
  BumpedHalfPlaneField(double beta = 0.05, double x0 = 0.0, double y0 = 1.0, double sigma = 0.5)
      : beta_(beta), x0_(x0), y0_(y0), sigma_(sigma) {}
  double value(double x, double y) const override;
  Vec2 gradient(double x, double y) const override;
  double laplacian(double x, double y) const override;
  std::string name() const override { return "bumped_half_plane"; }
  double beta() const { return beta_; }
  double x0() const { return x0_; }
  double y0() const { return y0_; }
  double sigma() const { return sigma_; }

 private:
  double bump(double x, double y) const;
  double beta_, x0_, y0_, sigma_;
};

struct FlatTorus {
  double L1 = 0.0, L2 = 0.0;
};
struct Hyperbolic {
  double a = 1.0;
};
struct Conformal {
  std::shared_ptr<const ConformalField> field;
  Rect domain;
  Rect check_window;  // region sampled for the K ≤ 0 guarantee
};
struct RoundSphere {
  double R = 1.0;
};

enum class SurfaceKind { FlatTorus, Hyperbolic, Conformal, RoundSphere };

class SurfaceSpec {
 public:
  using Variant = std::variant<FlatTorus, Hyperbolic, Conformal, RoundSphere>;

  static SurfaceSpec flat_torus(double L1, double L2);
  static SurfaceSpec hyperbolic(double a);
  /// Samples K on a 64×64 grid of `check_window` (default: `domain` clipped
  /// to [−10, 10]²) and rejects the field if K > 1e−9 anywhere.
  static SurfaceSpec conformal(std::shared_ptr<const ConformalField> field, Rect domain,
                               std::optional<Rect> check_window = std::nullopt);
  static SurfaceSpec round_sphere(double R);

  SurfaceKind kind() const { return static_cast<SurfaceKind>(v_.index()); }
  bool comparison_only() const { return kind() == SurfaceKind::RoundSphere; }
  /// True when K is a known constant (every variant except Conformal).
  bool constant_curvature() const { return kind() != SurfaceKind::Conformal; }
  const Variant& variant() const { return v_; }
  template <class T>
  const T* get_if() const { return std::get_if<T>(&v_); }
  std::string describe() const;

 private:
  explicit SurfaceSpec(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// Throws UnsupportedSurfaceError for the comparison-only sphere.
void require_nonpositive(const SurfaceSpec& S, const char* where);

/// Throws DomainError when p is outside the chart.
void check_in_domain(const SurfaceSpec& S, const SurfacePoint& p);
bool in_domain(const SurfaceSpec& S, const SurfacePoint& p);

Mat2 metric_at(const SurfaceSpec& S, const SurfacePoint& p);
double gaussian_curvature(const SurfaceSpec& S, const SurfacePoint& p);
Christoffel christoffel(const SurfaceSpec& S, const SurfacePoint& p);

double inner(const SurfaceSpec& S, const SurfacePoint& p, const Vec2& u, const Vec2& v);
double metric_norm(const SurfaceSpec& S, const SurfacePoint& p, const Vec2& v);
/// Rotation by +π/2 in the oriented chart, norm-preserving.
Vec2 perp(const SurfaceSpec& S, const SurfacePoint& p, const Vec2& v);
/// Signed angle of v measured in an orthonormal frame aligned with the chart axes.
double frame_angle(const SurfaceSpec& S, const SurfacePoint& p, const Vec2& v);
/// Unit vector at p whose frame angle is `angle`.
TangentVec unit_at_angle(const SurfaceSpec& S, const SurfacePoint& p, double angle);
/// Rescales `dir` to unit metric norm.
TangentVec unit_vector(const SurfaceSpec& S, const SurfacePoint& p, const Vec2& dir);

/// Representative of p in the fundamental domain (torus) or p itself.
SurfacePoint reduce(const SurfaceSpec& S, const SurfacePoint& p);

struct FlowOptions {
  bool lifted = true;  // torus: keep universal-cover coordinates
  double tol = 1e-11;
};

/// Unit-speed geodesic flow for parameter r ∈ [−100, 100].
std::pair<SurfacePoint, TangentVec> geodesic_flow(const SurfaceSpec& S, const SurfacePoint& p,
                                                  const TangentVec& v, double r,
                                                  const FlowOptions& opt = {});

/// Minimizing geodesic between two points of the (lifted) surface.
struct GeodesicSegment {
  double length = 0.0;
  TangentVec start;  // σ′(0) at p
  TangentVec end;    // σ′(length) at q
};

/// Closed forms for flat/hyperbolic/sphere; shooting (tolerance 1e−8,
/// 200-iteration cap) for conformal metrics.
GeodesicSegment geodesic_between(const SurfaceSpec& S, const SurfacePoint& p,
                                 const SurfacePoint& q);

/// Riemannian distance. On the torus `lifted` selects cover semantics; quotient
/// semantics take the minimum over the 9 nearest lattice translates.
double distance(const SurfaceSpec& S, const SurfacePoint& p, const SurfacePoint& q,
                bool lifted = true);

struct TorusTranslation {
  long m = 0, n = 0;
};
struct HyperbolicMobius {
  double a = 1, b = 0, c = 0, d = 1;
};

/// Deck transformation of the universal cover.
class DeckTransform {
 public:
  using Variant = std::variant<TorusTranslation, HyperbolicMobius>;

  static DeckTransform translation(long m, long n) { return DeckTransform(TorusTranslation{m, n}); }
  /// Throws RangeError unless |ad − bc − 1| ≤ 1e−12.
  static DeckTransform mobius(double a, double b, double c, double d);
  /// z ↦ e^{ℓ} z: hyperbolic translation along the imaginary axis by K=−1 length ℓ.
  static DeckTransform axis_translation(double ell);

  const Variant& variant() const { return v_; }
  bool is_identity() const;
  DeckTransform inverse() const;
  DeckTransform compose(const DeckTransform& inner) const;  // this ∘ inner
  std::string describe() const;

 private:
  explicit DeckTransform(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

SurfacePoint apply_deck(const SurfaceSpec& S, const DeckTransform& alpha, const SurfacePoint& p);
/// Push-forward of a tangent vector (base point transformed as well).
TangentVec apply_deck(const SurfaceSpec& S, const DeckTransform& alpha, const TangentVec& v);

}  // namespace geoperiods
