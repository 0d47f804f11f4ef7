#include "geoperiods/jacobi.hpp"

#include <cmath>
#include <sstream>

#include "geoperiods/errors.hpp"
#include "geoperiods/ode.hpp"

namespace geoperiods {

namespace {

double conformal_K(const Conformal& c, double x, double y) {
  return -std::exp(-2.0 * c.field->value(x, y)) * c.field->laplacian(x, y);
}

std::optional<ode::State<3>> geodesic_rhs(const Conformal& c, const ode::State<3>& s) {
  if (!c.domain.contains({s[0], s[1]}) || !std::isfinite(s[2])) return std::nullopt;
  const double e = std::exp(-c.field->value(s[0], s[1]));
  const Vec2 g = c.field->gradient(s[0], s[1]);
  const double ct = std::cos(s[2]), st = std::sin(s[2]);
  ode::State<3> f{e * ct, e * st, e * (g.y * ct - g.x * st)};
  if (!std::isfinite(f[0]) || !std::isfinite(f[1]) || !std::isfinite(f[2])) return std::nullopt;
  return f;
}

// Geodesic (x, y, θ) carried together with a scalar Jacobi field (j, j').
struct GeodesicJacobi {
  const Conformal* c;
  std::optional<ode::State<5>> operator()(double, const ode::State<5>& s) const {
    auto g = geodesic_rhs(*c, {s[0], s[1], s[2]});
    if (!g) return std::nullopt;
    const double K = conformal_K(*c, s[0], s[1]);
    return ode::State<5>{(*g)[0], (*g)[1], (*g)[2], s[4], -K * s[3]};
  }
};

struct GeodesicJacobiScale {
  const Conformal* c;
  double tol;
  mutable double pos = 1.0;
  double operator()(const ode::State<5>& a, const ode::State<5>& b, std::size_t i) const {
    if (i == 0) pos = tol * std::exp(-c->field->value(a[0], a[1]));
    if (i < 2) return pos;
    if (i == 2) return tol;
    return tol * (1.0 + std::max(std::abs(a[i]), std::abs(b[i])));
  }
};

struct PathScale {
  const Conformal* c;
  double tol;
  mutable double pos = 1.0;
  double operator()(const ode::State<3>& a, const ode::State<3>&, std::size_t i) const {
    if (i == 0) pos = tol * std::exp(-c->field->value(a[0], a[1]));
    return i < 2 ? pos : tol;
  }
};

ode::State<5> conformal_jacobi(const Conformal& c, const SurfacePoint& p, const TangentVec& v,
                               double j0, double dj0, double r) {
  ode::State<5> s{p.x1, p.x2, std::atan2(v.v.y, v.v.x), j0, dj0};
  ode::Options opt;
  opt.h_max = 0.25;
  return ode::dopri5<5>(GeodesicJacobi{&c}, 0.0, s, r, opt, GeodesicJacobiScale{&c, 1e-11},
                        ode::NoObserver{});
}

void require_unit(const SurfaceSpec& S, const TangentVec& v) {
  if (std::abs(metric_norm(S, v.base, v.v) - 1.0) > 1e-9)
    throw RangeError("jacobi: direction is not a unit vector");
}

}  // namespace

double GeodesicRay::curvature_at(double r) const {
  if (surface.constant_curvature()) return gaussian_curvature(surface, p);
  return gaussian_curvature(surface, geodesic_flow(surface, p, v, r).first);
}

JacobiValue jacobi_solve(const GeodesicRay& ray, double j0, double dj0, double r) {
  if (!(std::abs(r) <= 100.0)) throw RangeError("jacobi_solve: |r| must not exceed 100");
  check_in_domain(ray.surface, ray.p);
  require_unit(ray.surface, ray.v);
  if (j0 == 0.0 && dj0 == 0.0) return {0.0, 0.0};
  const SurfaceSpec& S = ray.surface;
  switch (S.kind()) {
    case SurfaceKind::FlatTorus: return {j0 + dj0 * r, dj0};
    case SurfaceKind::Hyperbolic: {
      const double a = S.get_if<Hyperbolic>()->a;
      const double c = std::cosh(a * r), s = std::sinh(a * r);
      return {j0 * c + dj0 * s / a, j0 * a * s + dj0 * c};
    }
    case SurfaceKind::RoundSphere: {
      const double w = 1.0 / S.get_if<RoundSphere>()->R;
      const double c = std::cos(w * r), s = std::sin(w * r);
      return {j0 * c + dj0 * s / w, -j0 * w * s + dj0 * c};
    }
    case SurfaceKind::Conformal: {
      const auto out = conformal_jacobi(*S.get_if<Conformal>(), ray.p, ray.v, j0, dj0, r);
      return {out[3], out[4]};
    }
  }
  return {};
}

double limiting_circle_curvature(const SurfaceSpec& S, const SurfacePoint& p, const TangentVec& v,
                                 double tol, RiccatiTrace* trace) {
  require_nonpositive(S, "limiting_circle_curvature");
  check_in_domain(S, p);
  require_unit(S, v);
  constexpr double kStart = 20.0, kMax = 1280.0;

  if (S.kind() == SurfaceKind::FlatTorus) {
    if (trace) *trace = RiccatiTrace{{-kStart, 0.0}, {0.0, 0.0}, true, kStart};
    return 0.0;
  }

  if (const auto* h = S.get_if<Hyperbolic>()) {
    const double a = h->a;
    double prev = a * std::tanh(a * kStart);
    for (double R = 2 * kStart; R <= kMax; R *= 2) {
      const double cur = a * std::tanh(a * R);
      if (std::abs(cur - prev) <= tol) {
        if (trace) {
          trace->grid.clear();
          trace->u.clear();
          for (int i = 0; i <= 64; ++i) {
            const double t = -R + R * i / 64.0;
            trace->grid.push_back(t);
            trace->u.push_back(a * std::tanh(a * (t + R)));
          }
          trace->converged = true;
          trace->horizon = R;
        }
        return cur;
      }
      prev = cur;
    }
    throw ConvergenceError("limiting_circle_curvature: horizon exceeded 1280");
  }

  const Conformal& c = *S.get_if<Conformal>();
  // Pass 1: the backward ray ζ(r), r ≤ 0, recorded as a dense path.
  ode::DensePath<3> path;
  ode::State<3> tip{p.x1, p.x2, std::atan2(v.v.y, v.v.x)};
  double reached = 0.0;
  bool escaped = false;
  ode::Options opt;
  opt.h_max = 0.1;
  auto rhs = [&c](double, const ode::State<3>& s) { return geodesic_rhs(c, s); };
  auto extend_to = [&](double depth) {
    if (escaped || depth <= reached) return;
    try {
      tip = ode::dopri5<3>(rhs, -reached, tip, -depth, opt, PathScale{&c, 1e-12},
                           [&](const ode::StepRecord<3>& rec) { path.push(rec); });
      reached = depth;
    } catch (const EscapeError&) {
      escaped = true;
      reached = -path.back_t();
    }
  };

  // Pass 2: forward Riccati from −R with u(−R) = 0.
  auto riccati = [&](double R, RiccatiTrace* tr) {
    auto f = [&](double t, const ode::State<1>& u) -> std::optional<ode::State<1>> {
      const auto s = path.at(t);
      if (!c.domain.contains({s[0], s[1]})) return std::nullopt;
      return ode::State<1>{-u[0] * u[0] - conformal_K(c, s[0], s[1])};
    };
    ode::Options ro;
    ro.rtol = 1e-12;
    ro.atol = 1e-14;
    ro.h_max = 0.1;
    if (tr) {
      tr->grid.clear();
      tr->u.clear();
    }
    const auto out = ode::dopri5<1>(f, -R, ode::State<1>{0.0}, 0.0, ro, ode::MixedScale{1e-12, 1e-14},
                                    [&](const ode::StepRecord<1>& rec) {
                                      if (tr) {
                                        tr->grid.push_back(rec.t);
                                        tr->u.push_back(rec.y[0]);
                                      }
                                    });
    return out[0];
  };

  extend_to(kStart);
  double R = reached;
  if (!(R > 0)) throw ConvergenceError("limiting_circle_curvature: ray escapes immediately");
  double prev = riccati(R, nullptr);
  while (true) {
    const double next_R = 2 * R;
    if (next_R > kMax) break;
    extend_to(next_R);
    const double R2 = reached;
    if (R2 <= R * (1 + 1e-12)) break;
    RiccatiTrace local;
    const double cur = riccati(R2, &local);
    if (std::abs(cur - prev) <= tol) {
      local.converged = true;
      local.horizon = R2;
      if (trace) *trace = std::move(local);
      return cur;
    }
    prev = cur;
    R = R2;
    if (escaped) break;
  }
  std::ostringstream os;
  os << "limiting_circle_curvature: no convergence (horizon " << R
     << (escaped ? ", ray left the domain)" : ")");
  throw ConvergenceError(os.str());
}

RayJacobi flow_with_jacobi(const SurfaceSpec& S, const SurfacePoint& p, const TangentVec& v,
                           double r, double j0, double dj0) {
  check_in_domain(S, p);
  require_unit(S, v);
  if (const auto* c = S.get_if<Conformal>()) {
    if (r == 0.0) return {p, v, j0, dj0};
    const auto out = conformal_jacobi(*c, p, v, j0, dj0, r);
    const SurfacePoint q{out[0], out[1]};
    const double e = std::exp(-c->field->value(q.x1, q.x2));
    return {q, TangentVec{q, {e * std::cos(out[2]), e * std::sin(out[2])}}, out[3], out[4]};
  }
  const auto [q, w] = geodesic_flow(S, p, v, r);
  const JacobiValue jv = jacobi_solve(GeodesicRay{S, p, v}, j0, dj0, r);
  return {q, w, jv.j, jv.dj};
}

double circle_curvature(const SurfaceSpec& S, const SurfacePoint& center, const TangentVec& v,
                        double r) {
  if (!(r > 0) || !(r <= 100)) throw RangeError("circle_curvature: radius must lie in (0, 100]");
  check_in_domain(S, center);
  require_unit(S, v);
  double c = 0.0, dc = 0.0;
  switch (S.kind()) {
    case SurfaceKind::FlatTorus: c = r; dc = 1.0; break;
    case SurfaceKind::Hyperbolic: {
      const double a = S.get_if<Hyperbolic>()->a;
      c = std::sinh(a * r) / a;
      dc = std::cosh(a * r);
      break;
    }
    case SurfaceKind::RoundSphere: {
      const double R = S.get_if<RoundSphere>()->R;
      c = R * std::sin(r / R);
      dc = std::cos(r / R);
      break;
    }
    case SurfaceKind::Conformal: {
      const auto out = conformal_jacobi(*S.get_if<Conformal>(), center, v, 0.0, 1.0, r);
      c = out[3];
      dc = out[4];
      break;
    }
  }
  if (std::abs(c) < 1e-12) throw UnderflowError("circle_curvature: Jacobi field underflow");
  return dc / c;
}

}  // namespace geoperiods
