#include "geoperiods/surface.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "geoperiods/errors.hpp"
#include "geoperiods/ode.hpp"

namespace geoperiods {

using cplx = std::complex<double>;
using std::numbers::pi;

// ---------------------------------------------------------------------------
// Conformal fields

Vec2 ConformalField::gradient(double x, double y) const {
  const double h = kStep;
  return {(value(x + h, y) - value(x - h, y)) / (2 * h),
          (value(x, y + h) - value(x, y - h)) / (2 * h)};
}

double ConformalField::laplacian(double x, double y) const {
  const double h = kStep;
  return (value(x + h, y) + value(x - h, y) + value(x, y + h) + value(x, y - h) -
          4.0 * value(x, y)) /
         (h * h);
}

double HalfPlaneField::value(double, double y) const { return -std::log(a_ * y); }
Vec2 HalfPlaneField::gradient(double, double y) const { return {0.0, -1.0 / y}; }
double HalfPlaneField::laplacian(double, double y) const { return 1.0 / (y * y); }

double PoincareDiskField::value(double x, double y) const {
  return std::log(2.0 / (1.0 - x * x - y * y));
}
Vec2 PoincareDiskField::gradient(double x, double y) const {
  const double q = 1.0 - x * x - y * y;
  return {2.0 * x / q, 2.0 * y / q};
}
double PoincareDiskField::laplacian(double x, double y) const {
  const double q = 1.0 - x * x - y * y;
  return 4.0 / (q * q);
}

double BumpedHalfPlaneField::bump(double x, double y) const {
  const double dx = x - x0_, dy = y - y0_;
  return beta_ * std::exp(-(dx * dx + dy * dy) / (sigma_ * sigma_));
}
double BumpedHalfPlaneField::value(double x, double y) const { return -std::log(y) + bump(x, y); }
Vec2 BumpedHalfPlaneField::gradient(double x, double y) const {
  const double w = bump(x, y);
  const double s2 = sigma_ * sigma_;
  return {-2.0 * (x - x0_) / s2 * w, -1.0 / y - 2.0 * (y - y0_) / s2 * w};
}
double BumpedHalfPlaneField::laplacian(double x, double y) const {
  const double dx = x - x0_, dy = y - y0_;
  const double s2 = sigma_ * sigma_;
  const double q = (dx * dx + dy * dy) / s2;
  return 1.0 / (y * y) + bump(x, y) * (4.0 * q - 4.0) / s2;
}

// ---------------------------------------------------------------------------
// SurfaceSpec

SurfaceSpec SurfaceSpec::flat_torus(double L1, double L2) {
  if (!(L1 > 0) || !(L2 > 0)) throw RangeError("flat_torus: side lengths must be positive");
  return SurfaceSpec(FlatTorus{L1, L2});
}

SurfaceSpec SurfaceSpec::hyperbolic(double a) {
  if (!(a > 0)) throw RangeError("hyperbolic: curvature scale a must be positive");
  return SurfaceSpec(Hyperbolic{a});
}

SurfaceSpec SurfaceSpec::round_sphere(double R) {
  if (!(R > 0)) throw RangeError("round_sphere: radius must be positive");
  return SurfaceSpec(RoundSphere{R});
}

SurfaceSpec SurfaceSpec::conformal(std::shared_ptr<const ConformalField> field, Rect domain,
                                   std::optional<Rect> check_window) {
  if (!field) throw RangeError("conformal: missing scalar field");
  if (!(domain.x_min < domain.x_max) || !(domain.y_min < domain.y_max))
    throw RangeError("conformal: empty domain rectangle");
  Rect win = check_window.value_or(Rect{std::max(domain.x_min, -10.0), std::min(domain.x_max, 10.0),
                                        std::max(domain.y_min, -10.0), std::min(domain.y_max, 10.0)});
  if (!(win.x_min < win.x_max) || !(win.y_min < win.y_max))
    throw RangeError("conformal: empty curvature check window");
  constexpr int kGrid = 64;
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      const double x = win.x_min + (i + 0.5) * (win.x_max - win.x_min) / kGrid;
      const double y = win.y_min + (j + 0.5) * (win.y_max - win.y_min) / kGrid;
      if (!domain.contains({x, y})) continue;
      const double K = -std::exp(-2.0 * field->value(x, y)) * field->laplacian(x, y);
      if (!(K <= 1e-9)) {
        std::ostringstream os;
        os << "conformal: field '" << field->name() << "' has curvature " << K << " > 0 at (" << x
           << ", " << y << ")";
        throw RangeError(os.str());
      }
    }
  }
  return SurfaceSpec(Conformal{std::move(field), domain, win});
}

std::string SurfaceSpec::describe() const {
  std::ostringstream os;
  os.precision(12);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FlatTorus>)
          os << "flat_torus(L1=" << s.L1 << ";L2=" << s.L2 << ")";
        else if constexpr (std::is_same_v<T, Hyperbolic>)
          os << "hyperbolic(a=" << s.a << ")";
        else if constexpr (std::is_same_v<T, Conformal>)
          os << "conformal(" << s.field->name() << ")";
        else
          os << "round_sphere(R=" << s.R << ")";
      },
      v_);
  return os.str();
}

void require_nonpositive(const SurfaceSpec& S, const char* where) {
  if (S.comparison_only())
    throw UnsupportedSurfaceError(std::string(where) +
                                  ": the round sphere is comparison-only (positive curvature)");
}

bool in_domain(const SurfaceSpec& S, const SurfacePoint& p) {
  if (!std::isfinite(p.x1) || !std::isfinite(p.x2)) return false;
  switch (S.kind()) {
    case SurfaceKind::Hyperbolic: return p.x2 > 0;
    case SurfaceKind::Conformal: return S.get_if<Conformal>()->domain.contains(p);
    case SurfaceKind::RoundSphere: return p.x1 >= 0 && p.x1 <= pi;
    default: return true;
  }
}

void check_in_domain(const SurfaceSpec& S, const SurfacePoint& p) {
  if (!in_domain(S, p)) {
    std::ostringstream os;
    os << "point (" << p.x1 << ", " << p.x2 << ") outside the chart of " << S.describe();
    throw DomainError(os.str());
  }
}

namespace {

struct Diag {
  double g1, g2;
};

Diag diag_metric(const SurfaceSpec& S, const SurfacePoint& p) {
  switch (S.kind()) {
    case SurfaceKind::FlatTorus: return {1.0, 1.0};
    case SurfaceKind::Hyperbolic: {
      const double a = S.get_if<Hyperbolic>()->a;
      const double f = 1.0 / (a * a * p.x2 * p.x2);
      return {f, f};
    }
    case SurfaceKind::Conformal: {
      const double f = std::exp(2.0 * S.get_if<Conformal>()->field->value(p.x1, p.x2));
      return {f, f};
    }
    case SurfaceKind::RoundSphere: {
      const double R = S.get_if<RoundSphere>()->R;
      const double s = std::sin(p.x1);
      return {R * R, R * R * s * s};
    }
  }
  return {1.0, 1.0};
}

cplx mobius(const HyperbolicMobius& m, cplx z) { return (m.a * z + m.b) / (m.c * z + m.d); }
cplx mobius_derivative(const HyperbolicMobius& m, cplx z) {
  const cplx den = m.c * z + m.d;
  return 1.0 / (den * den);
}

// --- sphere helpers (chart = colatitude, longitude) ------------------------

struct V3 {
  double x, y, z;
};
V3 operator+(V3 a, V3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
V3 operator*(double s, V3 a) { return {s * a.x, s * a.y, s * a.z}; }
double dot3(V3 a, V3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
double norm3(V3 a) { return std::sqrt(dot3(a, a)); }

V3 sphere_embed(double R, const SurfacePoint& p) {
  return {R * std::sin(p.x1) * std::cos(p.x2), R * std::sin(p.x1) * std::sin(p.x2),
          R * std::cos(p.x1)};
}
std::pair<V3, V3> sphere_frame(double R, const SurfacePoint& p) {
  const double st = std::sin(p.x1), ct = std::cos(p.x1), sp = std::sin(p.x2), cp = std::cos(p.x2);
  return {V3{R * ct * cp, R * ct * sp, -R * st}, V3{-R * st * sp, R * st * cp, 0.0}};
}
V3 sphere_push(double R, const TangentVec& v) {
  auto [dt, dp] = sphere_frame(R, v.base);
  return v.v.x * dt + v.v.y * dp;
}
SurfacePoint sphere_chart(double R, V3 X) {
  const double z = std::clamp(X.z / R, -1.0, 1.0);
  return {std::acos(z), std::atan2(X.y, X.x)};
}
Vec2 sphere_pull(double R, const SurfacePoint& p, V3 V) {
  auto [dt, dp] = sphere_frame(R, p);
  const double g1 = dot3(dt, dt), g2 = dot3(dp, dp);
  return {dot3(V, dt) / g1, g2 > 0 ? dot3(V, dp) / g2 : 0.0};
}

// --- conformal geodesic ODE -------------------------------------------------
// State (x, y, θ): unit tangent is e^{−u}(cos θ, sin θ).

struct ConformalGeodesic {
  const Conformal* c;
  std::optional<ode::State<3>> operator()(double, const ode::State<3>& s) const {
    if (!c->domain.contains({s[0], s[1]}) || !std::isfinite(s[2])) return std::nullopt;
    const double u = c->field->value(s[0], s[1]);
    const Vec2 g = c->field->gradient(s[0], s[1]);
    const double e = std::exp(-u);
    const double ct = std::cos(s[2]), st = std::sin(s[2]);
    ode::State<3> f{e * ct, e * st, e * (g.y * ct - g.x * st)};
    if (!std::isfinite(f[0]) || !std::isfinite(f[1]) || !std::isfinite(f[2])) return std::nullopt;
    return f;
  }
};

// Position error measured in metric units: coordinate scale tol·e^{−u}.
struct MetricScale {
  const Conformal* c;
  double tol;
  mutable double pos_scale = 1.0;
  double operator()(const ode::State<3>& y_old, const ode::State<3>&, std::size_t i) const {
    if (i == 0) {
      const double u = c->domain.contains({y_old[0], y_old[1]}) ? c->field->value(y_old[0], y_old[1])
                                                                : 0.0;
      pos_scale = tol * std::min(std::exp(-u), 1e300);
    }
    return i < 2 ? pos_scale : tol;
  }
};

std::pair<SurfacePoint, TangentVec> conformal_flow(const Conformal& c, const SurfacePoint& p,
                                                   const TangentVec& v, double r, double tol) {
  ode::State<3> s{p.x1, p.x2, std::atan2(v.v.y, v.v.x)};
  ode::Options opt;
  opt.rtol = tol;
  opt.atol = tol;
  opt.h_max = 0.5;
  s = ode::dopri5<3>(ConformalGeodesic{&c}, 0.0, s, r, opt, MetricScale{&c, tol}, ode::NoObserver{});
  const SurfacePoint q{s[0], s[1]};
  const double e = std::exp(-c.field->value(q.x1, q.x2));
  return {q, TangentVec{q, {e * std::cos(s[2]), e * std::sin(s[2])}}};
}

std::pair<SurfacePoint, TangentVec> hyperbolic_flow(double a, const SurfacePoint& p,
                                                    const TangentVec& v, double r) {
  // Rotate the vertical geodesic i·e^t about i, then scale/translate to p.
  const double psi = std::atan2(v.v.y, v.v.x) - pi / 2;
  const double cs = std::cos(psi / 2), sn = std::sin(psi / 2);
  const double t = a * r;
  const cplx w = cplx(0.0, std::exp(t));
  const cplx den = -sn * w + cs;
  const cplx rot = (cs * w + sn) / den;
  const cplx drot = 1.0 / (den * den);
  const cplx z = cplx(p.x1, 0.0) + p.x2 * rot;
  const cplx dz = a * p.x2 * drot * w;
  const SurfacePoint q{z.real(), z.imag()};
  return {q, TangentVec{q, {dz.real(), dz.imag()}}};
}

double gauss_legendre_length(const SurfaceSpec& S, const SurfacePoint& p, const SurfacePoint& q) {
  static constexpr std::array<double, 8> x = {-0.9602898564975363, -0.7966664774136267,
                                              -0.5255324099163290, -0.1834346424956498,
                                              0.1834346424956498,  0.5255324099163290,
                                              0.7966664774136267,  0.9602898564975363};
  static constexpr std::array<double, 8> w = {0.1012285362903763, 0.2223810344533745,
                                              0.3137066458778873, 0.3626837833783620,
                                              0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};
  const Vec2 d = q.vec() - p.vec();
  double L = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Vec2 m = p.vec() + 0.5 * (1.0 + x[i]) * d;
    L += 0.5 * w[i] * metric_norm(S, SurfacePoint::from(m), d);
  }
  return L;
}

GeodesicSegment conformal_shoot(const SurfaceSpec& S, const SurfacePoint& p, const SurfacePoint& q) {
  const Conformal& c = *S.get_if<Conformal>();
  check_in_domain(S, p);
  check_in_domain(S, q);
  const double scale_q = std::exp(c.field->value(q.x1, q.x2));
  double theta = std::atan2(q.x2 - p.x2, q.x1 - p.x1);
  double len = gauss_legendre_length(S, p, q);
  if (len == 0.0) return {0.0, unit_at_angle(S, p, 0.0), unit_at_angle(S, q, 0.0)};

  struct Shot {
    bool ok;
    Vec2 miss;  // chart coordinates
    TangentVec end;
    double residual;  // metric units
  };
  auto shoot = [&](double th, double L) -> Shot {
    try {
      auto [x, v] = geodesic_flow(S, p, unit_at_angle(S, p, th), L, FlowOptions{true, 1e-12});
      const Vec2 miss = x.vec() - q.vec();
      return {true, miss, v, scale_q * norm(miss)};
    } catch (const DomainError&) {
      return {false, {}, {}, std::numeric_limits<double>::infinity()};
    }
  };

  Shot cur = shoot(theta, len);
  for (int iter = 0; iter < 200; ++iter) {
    if (cur.ok && cur.residual < 1e-11) {
      return {len, unit_at_angle(S, p, theta), cur.end};
    }
    if (!cur.ok) throw ConvergenceError("geodesic shooting: initial guess escapes the domain");
    const double dth = 1e-6;
    const Shot plus = shoot(theta + dth, len);
    const Shot minus = shoot(theta - dth, len);
    if (!plus.ok || !minus.ok) throw ConvergenceError("geodesic shooting: escaping neighbour shot");
    const Vec2 j_theta = (plus.miss - minus.miss) / (2 * dth);
    const Vec2 j_len = cur.end.v;
    const double det = cross(j_theta, j_len);
    if (det == 0.0) throw ConvergenceError("geodesic shooting: singular Jacobian");
    // Solve [j_theta j_len] (dθ, dL)ᵀ = −miss.
    const double step_th = -cross(cur.miss, j_len) / det;
    const double step_len = -cross(j_theta, cur.miss) / det;
    double frac = 1.0;
    Shot next{};
    for (int halve = 0; halve < 40; ++halve) {
      double L = len + frac * step_len;
      if (L <= 0) L = 0.5 * len;
      next = shoot(theta + frac * step_th, L);
      if (next.ok && next.residual < cur.residual) {
        theta += frac * step_th;
        len = L;
        break;
      }
      frac *= 0.5;
    }
    if (!next.ok || !(next.residual < cur.residual)) {
      if (cur.residual < 1e-9) return {len, unit_at_angle(S, p, theta), cur.end};
      throw ConvergenceError("geodesic shooting: no descent step");
    }
    cur = next;
  }
  throw ConvergenceError("geodesic shooting: no convergence within 200 iterations");
}

}  // namespace

Mat2 metric_at(const SurfaceSpec& S, const SurfacePoint& p) {
  check_in_domain(S, p);
  const Diag d = diag_metric(S, p);
  return Mat2::diag(d.g1, d.g2);
}

double gaussian_curvature(const SurfaceSpec& S, const SurfacePoint& p) {
  check_in_domain(S, p);
  switch (S.kind()) {
    case SurfaceKind::FlatTorus: return 0.0;
    case SurfaceKind::Hyperbolic: {
      const double a = S.get_if<Hyperbolic>()->a;
      return -a * a;
    }
    case SurfaceKind::Conformal: {
      const auto& f = *S.get_if<Conformal>()->field;
      return -std::exp(-2.0 * f.value(p.x1, p.x2)) * f.laplacian(p.x1, p.x2);
    }
    case SurfaceKind::RoundSphere: {
      const double R = S.get_if<RoundSphere>()->R;
      return 1.0 / (R * R);
    }
  }
  return 0.0;
}

Christoffel christoffel(const SurfaceSpec& S, const SurfacePoint& p) {
  check_in_domain(S, p);
  Christoffel G{};
  auto conformal_symbols = [&](Vec2 du) {
    const double d[2] = {du.x, du.y};
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          G[k][i][j] = (i == k ? d[j] : 0.0) + (j == k ? d[i] : 0.0) - (i == j ? d[k] : 0.0);
  };
  switch (S.kind()) {
    case SurfaceKind::FlatTorus: break;
    case SurfaceKind::Hyperbolic: conformal_symbols({0.0, -1.0 / p.x2}); break;
    case SurfaceKind::Conformal:
      conformal_symbols(S.get_if<Conformal>()->field->gradient(p.x1, p.x2));
      break;
    case SurfaceKind::RoundSphere: {
      const double s = std::sin(p.x1), c = std::cos(p.x1);
      G[0][1][1] = -s * c;
      G[1][0][1] = G[1][1][0] = c / s;
      break;
    }
  }
  return G;
}

double inner(const SurfaceSpec& S, const SurfacePoint& p, const Vec2& u, const Vec2& v) {
  const Diag d = diag_metric(S, p);
  return d.g1 * u.x * v.x + d.g2 * u.y * v.y;
}

double metric_norm(const SurfaceSpec& S, const SurfacePoint& p, const Vec2& v) {
  return std::sqrt(inner(S, p, v, v));
}

Vec2 perp(const SurfaceSpec& S, const SurfacePoint& p, const Vec2& v) {
  const Diag d = diag_metric(S, p);
  if (d.g1 == d.g2) return {-v.y, v.x};
  return {-std::sqrt(d.g2 / d.g1) * v.y, std::sqrt(d.g1 / d.g2) * v.x};
}

double frame_angle(const SurfaceSpec& S, const SurfacePoint& p, const Vec2& v) {
  const Diag d = diag_metric(S, p);
  return std::atan2(std::sqrt(d.g2) * v.y, std::sqrt(d.g1) * v.x);
}

TangentVec unit_at_angle(const SurfaceSpec& S, const SurfacePoint& p, double angle) {
  const Diag d = diag_metric(S, p);
  return {p, {std::cos(angle) / std::sqrt(d.g1), std::sin(angle) / std::sqrt(d.g2)}};
}

TangentVec unit_vector(const SurfaceSpec& S, const SurfacePoint& p, const Vec2& dir) {
  const double n = metric_norm(S, p, dir);
  if (!(n > 0)) throw RangeError("unit_vector: zero direction");
  return {p, dir / n};
}

SurfacePoint reduce(const SurfaceSpec& S, const SurfacePoint& p) {
  if (const auto* t = S.get_if<FlatTorus>()) {
    auto wrap = [](double x, double L) {
      double r = std::fmod(x, L);
      if (r < 0) r += L;
      if (r >= L) r -= L;
      return r;
    };
    return {wrap(p.x1, t->L1), wrap(p.x2, t->L2)};
  }
  return p;
}

std::pair<SurfacePoint, TangentVec> geodesic_flow(const SurfaceSpec& S, const SurfacePoint& p,
                                                  const TangentVec& v, double r,
                                                  const FlowOptions& opt) {
  if (!(std::abs(r) <= 100.0)) throw RangeError("geodesic_flow: |r| must not exceed 100");
  check_in_domain(S, p);
  if (std::abs(metric_norm(S, p, v.v) - 1.0) > 1e-9)
    throw RangeError("geodesic_flow: initial vector is not unit length");
  if (r == 0.0) return {p, TangentVec{p, v.v}};
  switch (S.kind()) {
    case SurfaceKind::FlatTorus: {
      SurfacePoint q = SurfacePoint::from(p.vec() + r * v.v);
      if (!opt.lifted) q = reduce(S, q);
      return {q, TangentVec{q, v.v}};
    }
    case SurfaceKind::Hyperbolic: return hyperbolic_flow(S.get_if<Hyperbolic>()->a, p, v, r);
    case SurfaceKind::Conformal: return conformal_flow(*S.get_if<Conformal>(), p, v, r, opt.tol);
    case SurfaceKind::RoundSphere: {
      const double R = S.get_if<RoundSphere>()->R;
      const V3 X = sphere_embed(R, p);
      const V3 V = sphere_push(R, TangentVec{p, v.v});
      const double c = std::cos(r / R), s = std::sin(r / R);
      const V3 Xr = c * X + (R * s) * V;
      const V3 Vr = (-s / R) * X + c * V;
      const SurfacePoint q = sphere_chart(R, Xr);
      return {q, TangentVec{q, sphere_pull(R, q, Vr)}};
    }
  }
  return {p, v};
}

GeodesicSegment geodesic_between(const SurfaceSpec& S, const SurfacePoint& p,
                                 const SurfacePoint& q) {
  check_in_domain(S, p);
  check_in_domain(S, q);
  switch (S.kind()) {
    case SurfaceKind::FlatTorus: {
      const Vec2 d = q.vec() - p.vec();
      const double n = norm(d);
      const Vec2 u = n > 0 ? d / n : Vec2{1.0, 0.0};
      return {n, TangentVec{p, u}, TangentVec{q, u}};
    }
    case SurfaceKind::Hyperbolic: {
      const double a = S.get_if<Hyperbolic>()->a;
      const cplx zp(p.x1, p.x2), zq(q.x1, q.x2);
      const double len =
          2.0 * std::asinh(std::abs(zq - zp) / (2.0 * std::sqrt(p.x2 * q.x2))) / a;
      if (len == 0.0) return {0.0, unit_at_angle(S, p, 0.0), unit_at_angle(S, q, 0.0)};
      // Direction at p toward q via the Cayley map centred at p.
      const cplx zeta_p = (zq - zp) / (zq - std::conj(zp));
      const cplx zeta_q = (zp - zq) / (zp - std::conj(zq));
      const cplx dir_p = std::polar(a * p.x2, std::arg(zeta_p) + pi / 2);
      const cplx dir_q = -std::polar(a * q.x2, std::arg(zeta_q) + pi / 2);
      return {len, TangentVec{p, to_vec(dir_p)}, TangentVec{q, to_vec(dir_q)}};
    }
    case SurfaceKind::RoundSphere: {
      const double R = S.get_if<RoundSphere>()->R;
      const V3 X = sphere_embed(R, p), Y = sphere_embed(R, q);
      const double c = std::clamp(dot3(X, Y) / (R * R), -1.0, 1.0);
      const double ang = std::acos(c);
      if (ang == 0.0) return {0.0, unit_at_angle(S, p, 0.0), unit_at_angle(S, q, 0.0)};
      V3 t0 = Y + (-c) * X;
      t0 = (1.0 / norm3(t0)) * t0;
      V3 t1 = (-1.0) * (X + (-c) * Y);
      t1 = (1.0 / norm3(t1)) * t1;
      return {R * ang, TangentVec{p, sphere_pull(R, p, t0)}, TangentVec{q, sphere_pull(R, q, t1)}};
    }
    case SurfaceKind::Conformal: return conformal_shoot(S, p, q);
  }
  return {};
}

double distance(const SurfaceSpec& S, const SurfacePoint& p, const SurfacePoint& q, bool lifted) {
  if (const auto* t = S.get_if<FlatTorus>()) {
    if (lifted) return norm(q.vec() - p.vec());
    const SurfacePoint a = reduce(S, p), b = reduce(S, q);
    double best = std::numeric_limits<double>::infinity();
    for (int i = -1; i <= 1; ++i)
      for (int j = -1; j <= 1; ++j)
        best = std::min(best, std::hypot(b.x1 + i * t->L1 - a.x1, b.x2 + j * t->L2 - a.x2));
    return best;
  }
  return geodesic_between(S, p, q).length;
}

// ---------------------------------------------------------------------------
// Deck transformations

DeckTransform DeckTransform::mobius(double a, double b, double c, double d) {
  if (std::abs(a * d - b * c - 1.0) > 1e-12)
    throw RangeError("mobius: matrix determinant must equal 1");
  return DeckTransform(HyperbolicMobius{a, b, c, d});
}

DeckTransform DeckTransform::axis_translation(double ell) {
  const double e = std::exp(ell / 2);
  return DeckTransform(HyperbolicMobius{e, 0.0, 0.0, 1.0 / e});
}

bool DeckTransform::is_identity() const {
  if (const auto* t = std::get_if<TorusTranslation>(&v_)) return t->m == 0 && t->n == 0;
  const auto& m = std::get<HyperbolicMobius>(v_);
  const double s = m.a > 0 ? 1.0 : -1.0;
  return std::abs(m.a - s) + std::abs(m.d - s) + std::abs(m.b) + std::abs(m.c) < 1e-14;
}

DeckTransform DeckTransform::inverse() const {
  if (const auto* t = std::get_if<TorusTranslation>(&v_)) return translation(-t->m, -t->n);
  const auto& m = std::get<HyperbolicMobius>(v_);
  return DeckTransform(HyperbolicMobius{m.d, -m.b, -m.c, m.a});
}

DeckTransform DeckTransform::compose(const DeckTransform& inner) const {
  if (v_.index() != inner.v_.index())
    throw TypeMismatchError("deck transform composition across variants");
  if (const auto* t = std::get_if<TorusTranslation>(&v_)) {
    const auto& u = std::get<TorusTranslation>(inner.v_);
    return translation(t->m + u.m, t->n + u.n);
  }
  const auto& x = std::get<HyperbolicMobius>(v_);
  const auto& y = std::get<HyperbolicMobius>(inner.v_);
  return DeckTransform(HyperbolicMobius{x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
                                        x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d});
}

std::string DeckTransform::describe() const {
  std::ostringstream os;
  os.precision(12);
  if (const auto* t = std::get_if<TorusTranslation>(&v_)) {
    os << "translation(" << t->m << ";" << t->n << ")";
  } else {
    const auto& m = std::get<HyperbolicMobius>(v_);
    os << "mobius(" << m.a << ";" << m.b << ";" << m.c << ";" << m.d << ")";
  }
  return os.str();
}

SurfacePoint apply_deck(const SurfaceSpec& S, const DeckTransform& alpha, const SurfacePoint& p) {
  if (const auto* t = std::get_if<TorusTranslation>(&alpha.variant())) {
    const auto* torus = S.get_if<FlatTorus>();
    if (!torus) throw TypeMismatchError("torus translation applied on a non-torus surface");
    return {p.x1 + static_cast<double>(t->m) * torus->L1, p.x2 + static_cast<double>(t->n) * torus->L2};
  }
  if (S.kind() != SurfaceKind::Hyperbolic)
    throw TypeMismatchError("Möbius deck transform applied on a non-hyperbolic surface");
  const cplx z = mobius(std::get<HyperbolicMobius>(alpha.variant()), cplx(p.x1, p.x2));
  return {z.real(), z.imag()};
}

TangentVec apply_deck(const SurfaceSpec& S, const DeckTransform& alpha, const TangentVec& v) {
  const SurfacePoint q = apply_deck(S, alpha, v.base);
  if (std::holds_alternative<TorusTranslation>(alpha.variant())) return {q, v.v};
  const cplx d =
      mobius_derivative(std::get<HyperbolicMobius>(alpha.variant()), cplx(v.base.x1, v.base.x2));
  return {q, to_vec(d * to_complex(v.v))};
}

}  // namespace geoperiods
