#include "geoperiods/phase.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>

#include "geoperiods/errors.hpp"
#include "geoperiods/jacobi.hpp"
#include "geoperiods/parallel.hpp"

namespace geoperiods {

namespace {

constexpr double kGradStep = 1e-3;
constexpr double kHessStep = 3e-3;

struct Geometry {
  TangentVec tp;  // γ̃′(t)
  TangentVec tq;  // (αγ̃)′(s)
  double hp = 0.0, hq = 0.0;
  GeodesicSegment sigma;
};

void require_phase_surface(const Curve& c) { require_nonpositive(c.surface(), "phase"); }

void require_distance(double r) {
  if (!(r >= kPhaseMinDistance))
    throw ProximityError("phase: d(γ(t), αγ(s)) = " + std::to_string(r) + " is below 0.1");
}

Geometry geometry(const Curve& c, const DeckTransform& alpha, double t, double s) {
  const SurfaceSpec& S = c.surface();
  Geometry g;
  g.tp = c.tangent(t);
  g.tq = apply_deck(S, alpha, c.tangent(s));
  g.hp = c.signed_normal_curvature(t);
  g.hq = c.signed_normal_curvature(s);
  g.sigma = geodesic_between(S, g.tp.base, g.tq.base);
  require_distance(g.sigma.length);
  return g;
}

int sign_of(double x) { return x < 0 ? -1 : 1; }

PhaseGradient gradient_from(const SurfaceSpec& S, const Geometry& g, double eps) {
  const double drt = -inner(S, g.tp.base, g.sigma.start.v, g.tp.v);
  const double drs = inner(S, g.tq.base, g.sigma.end.v, g.tq.v);
  return {eps + drt, -eps + drs};
}

SecondVariation variation_s(const SurfaceSpec& S, const Geometry& g) {
  const SurfacePoint& Q = g.tq.base;
  const Vec2 u = g.sigma.end.v;
  SecondVariation v;
  v.cos_theta = std::abs(inner(S, Q, g.tq.v, perp(S, Q, u)));
  v.sign = sign_of(inner(S, Q, u, g.hq * perp(S, Q, g.tq.v)));
  v.kappa_curve = std::abs(g.hq);
  v.kappa_circle = circle_curvature(S, g.tp.base, g.sigma.start, g.sigma.length);
  return v;
}

double second_t(const SurfaceSpec& S, const Geometry& g) {
  const SurfacePoint& P = g.tp.base;
  const Vec2 u = g.sigma.start.v;
  const double cos_t = std::abs(inner(S, P, g.tp.v, perp(S, P, u)));
  const int sign = -sign_of(inner(S, P, u, g.hp * perp(S, P, g.tp.v)));
  const TangentVec back{g.tq.base, -g.sigma.end.v};
  const double kappa_circle = circle_curvature(S, g.tq.base, back, g.sigma.length);
  return cos_t * (sign * std::abs(g.hp) + cos_t * kappa_circle);
}

double mixed_fd(const Curve& c, const DeckTransform& alpha, double eps, double t, double s) {
  auto d = [&](double h) {
    return (phase_gradient(c, alpha, eps, t + h, s).ds - phase_gradient(c, alpha, eps, t - h, s).ds) /
           (2 * h);
  };
  const double d1 = d(kGradStep), d2 = d(2 * kGradStep);
  return (4 * d1 - d2) / 3;
}

}  // namespace

double phase_distance(const Curve& c, const DeckTransform& alpha, double t, double s) {
  require_phase_surface(c);
  const SurfaceSpec& S = c.surface();
  const double r = distance(S, c.point(t), apply_deck(S, alpha, c.point(s)));
  require_distance(r);
  return r;
}

double phase(const Curve& c, const DeckTransform& alpha, double eps, double t, double s) {
  return eps * (t - s) + phase_distance(c, alpha, t, s);
}

PhaseGradient phase_gradient(const Curve& c, const DeckTransform& alpha, double eps, double t,
                             double s) {
  require_phase_surface(c);
  return gradient_from(c.surface(), geometry(c, alpha, t, s), eps);
}

SecondVariation second_variation_s(const Curve& c, const DeckTransform& alpha, double t, double s) {
  require_phase_surface(c);
  return variation_s(c.surface(), geometry(c, alpha, t, s));
}

PhaseHessian phase_hessian(const Curve& c, const DeckTransform& alpha, double eps, double t,
                           double s) {
  require_phase_surface(c);
  const SurfaceSpec& S = c.surface();
  const Geometry g = geometry(c, alpha, t, s);
  return {second_t(S, g), mixed_fd(c, alpha, eps, t, s), variation_s(S, g).value()};
}

PhaseHessian phase_hessian_fd(const Curve& c, const DeckTransform& alpha, double eps, double t,
                              double s) {
  auto f = [&](double a, double b) { return phase(c, alpha, eps, a, b); };
  const double f0 = f(t, s);
  auto tt = [&](double h) { return (f(t + h, s) - 2 * f0 + f(t - h, s)) / (h * h); };
  auto ss = [&](double h) { return (f(t, s + h) - 2 * f0 + f(t, s - h)) / (h * h); };
  auto ts = [&](double h) {
    return (f(t + h, s + h) - f(t + h, s - h) - f(t - h, s + h) + f(t - h, s - h)) / (4 * h * h);
  };
  auto rich = [](auto d) { return (4 * d(kHessStep) - d(2 * kHessStep)) / 3; };
  return {rich(tt), rich(ts), rich(ss)};
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) v[0] = a;
  for (std::size_t i = 0; n > 1 && i < n; ++i)
    v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

PhaseGrid build_phase_grid(std::shared_ptr<const Curve> c, const DeckTransform& alpha, double eps,
                           std::vector<double> t, std::vector<double> s, unsigned jobs) {
  if (!c) throw RangeError("build_phase_grid: null curve");
  require_phase_surface(*c);
  if (alpha.is_identity()) throw RangeError("build_phase_grid: alpha must not be the identity");
  if (t.empty() || s.empty()) throw RangeError("build_phase_grid: empty grid");
  PhaseGrid g;
  g.curve = std::move(c);
  g.alpha = alpha;
  g.eps = eps;
  g.t = std::move(t);
  g.s = std::move(s);
  const Curve& C = *g.curve;
  const SurfaceSpec& S = C.surface();
  const std::size_t ns = g.s.size();
  g.nodes = parallel_map<PhaseNode>(g.t.size() * ns, jobs, [&](std::size_t k) {
    const double tk = g.t[k / ns], sk = g.s[k % ns];
    const Geometry geo = geometry(C, alpha, tk, sk);
    const PhaseGradient grad = gradient_from(S, geo, eps);
    const PhaseHessian fd = phase_hessian_fd(C, alpha, eps, tk, sk);
    return PhaseNode{tk,
                     sk,
                     geo.sigma.length,
                     eps * (tk - sk) + geo.sigma.length,
                     grad.dt,
                     grad.ds,
                     second_t(S, geo),
                     mixed_fd(C, alpha, eps, tk, sk),
                     variation_s(S, geo).value(),
                     fd.tt,
                     fd.ts,
                     fd.ss};
  });
  return g;
}

void PhaseGrid::write_csv(std::ostream& os) const {
  os << "t,s,r,phi,dphi_t,dphi_s,d2phi_tt,d2phi_ts,d2phi_ss,fd_tt,fd_ts,fd_ss\n";
  const auto old = os.precision(17);
  for (const auto& n : nodes) {
    os << n.t << ',' << n.s << ',' << n.r << ',' << n.phi << ',' << n.dt << ',' << n.ds << ','
       << n.tt << ',' << n.ts << ',' << n.ss << ',' << n.fd_tt << ',' << n.fd_ts << ',' << n.fd_ss
       << '\n';
  }
  os.precision(old);
}

std::vector<std::pair<double, double>> grid_seeds(double L, std::size_t n) {
  std::vector<std::pair<double, double>> out;
  out.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out.emplace_back(L * (i + 0.5) / n, L * (j + 0.5) / n);
  return out;
}

namespace {

std::optional<CriticalPoint> newton(const Curve& c, const DeckTransform& alpha, double eps,
                                    double t, double s) {
  auto gnorm = [](const PhaseGradient& g) { return std::hypot(g.dt, g.ds); };
  PhaseGradient g = phase_gradient(c, alpha, eps, t, s);
  double n = gnorm(g);
  int it = 0;
  for (; it < 60 && n > 1e-12; ++it) {
    const PhaseHessian H = phase_hessian(c, alpha, eps, t, s);
    const double det = H.det();
    double dt, ds;
    if (std::abs(det) > 1e-14 * (1 + H.tt * H.tt + H.ss * H.ss)) {
      dt = -(H.ss * g.dt - H.ts * g.ds) / det;
      ds = -(-H.ts * g.dt + H.tt * g.ds) / det;
    } else {
      dt = -g.dt;
      ds = -g.ds;
    }
    const double len = std::hypot(dt, ds);
    if (len > 0.25) dt *= 0.25 / len, ds *= 0.25 / len;
    bool accepted = false;
    for (int k = 0; k < 30 && !accepted; ++k, dt *= 0.5, ds *= 0.5) {
      try {
        const PhaseGradient gn = phase_gradient(c, alpha, eps, t + dt, s + ds);
        if (gnorm(gn) < n) {
          t += dt, s += ds, g = gn, n = gnorm(gn);
          accepted = true;
        }
      } catch (const ProximityError&) {
      }
    }
    if (!accepted) break;
  }
  if (!(n <= 1e-8)) return std::nullopt;
  const PhaseHessian H = phase_hessian(c, alpha, eps, t, s);
  return CriticalPoint{t, s, g.dt - eps, g.ds + eps, n, H.det(), it};
}

double circular_gap(double a, double b, double L) {
  const double d = std::fmod(std::abs(a - b), L);
  return std::min(d, L - d);
}

}  // namespace

CriticalSearch critical_points(const Curve& c, const DeckTransform& alpha, double eps,
                               const std::vector<std::pair<double, double>>& seeds,
                               unsigned jobs) {
  require_phase_surface(c);
  if (!(std::abs(eps) <= 1 - 1e-3)) throw RangeError("critical_points: |eps| must be ≤ 1 − 1e−3");
  const auto found = parallel_map<std::optional<CriticalPoint>>(seeds.size(), jobs, [&](std::size_t i) {
    try {
      return newton(c, alpha, eps, seeds[i].first, seeds[i].second);
    } catch (const ProximityError&) {
    } catch (const ConvergenceError&) {
    } catch (const DomainError&) {
    }
    return std::optional<CriticalPoint>{};
  });
  const double L = c.length();
  const bool periodic = !c.closing().has_value();
  CriticalSearch out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (!found[i]) {
      out.skipped.push_back(seeds[i]);
      continue;
    }
    CriticalPoint p = *found[i];
    if (periodic) {
      p.t -= L * std::floor(p.t / L);
      p.s -= L * std::floor(p.s / L);
    }
    const bool dup = std::any_of(out.points.begin(), out.points.end(), [&](const CriticalPoint& q) {
      const double dt = periodic ? circular_gap(p.t, q.t, L) : std::abs(p.t - q.t);
      const double ds = periodic ? circular_gap(p.s, q.s, L) : std::abs(p.s - q.s);
      return dt < 1e-6 && ds < 1e-6;
    });
    if (!dup) out.points.push_back(p);
  }
  std::sort(out.points.begin(), out.points.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    return a.t != b.t ? a.t < b.t : a.s < b.s;
  });
  return out;
}

double smoothstep7(double x) {
  x = std::clamp(x, 0.0, 1.0);
  const double x4 = x * x * x * x;
  return x4 * (35 + x * (-84 + x * (70 - 20 * x)));
}

ConeWeights cone_classify(const Vec2& xi, double delta) {
  if (!(std::abs(norm(xi) - 1) <= 1e-9)) throw RangeError("cone_classify: xi must be a unit vector");
  if (!(delta > 0 && delta < 1)) throw RangeError("cone_classify: delta must lie in (0, 1)");
  const double q = delta / 4;
  const double wp = smoothstep7((xi.y - q) / q);
  const double wm = smoothstep7((-xi.y - q) / q);
  return {wp, 1 - wp - wm, wm};
}

MixedBoundReport mixed_bound_check(const PhaseGrid& g, double r_min, double slack) {
  MixedBoundReport rep;
  for (const auto& n : g.nodes) {
    if (n.r < r_min) continue;
    ++rep.checked;
    const double excess = std::abs(n.ts) - 2 / n.r;
    rep.max_excess = std::max(rep.max_excess, excess);
    if (excess > slack) rep.holds = false;
  }
  return rep;
}

CircleSandwichReport circle_sandwich_check(const PhaseGrid& g, double slack, unsigned jobs) {
  const Curve& c = *g.curve;
  const SurfaceSpec& S = c.surface();
  struct Gap {
    double gap, r;
  };
  const auto gaps = parallel_map<Gap>(g.nodes.size(), jobs, [&](std::size_t k) {
    const Geometry geo = geometry(c, g.alpha, g.nodes[k].t, g.nodes[k].s);
    const double ks = circle_curvature(S, geo.tp.base, geo.sigma.start, geo.sigma.length);
    const double kl = limiting_circle_curvature(S, geo.tq.base, geo.sigma.end);
    return Gap{ks - kl, geo.sigma.length};
  });
  CircleSandwichReport rep;
  for (const auto& x : gaps) {
    ++rep.checked;
    rep.min_gap = std::min(rep.min_gap, x.gap);
    rep.max_excess = std::max(rep.max_excess, x.gap - 1 / x.r);
    if (!(x.gap > slack) || !(x.gap - 1 / x.r < -slack)) rep.holds = false;
  }
  return rep;
}

PureDerivativeReport pure_derivative_check(const Curve& c, const DeckTransform& alpha, double eps,
                                           double a, double b, double eps0, double delta,
                                           std::size_t n, unsigned jobs) {
  require_phase_surface(c);
  if (!(a < b)) throw RangeError("pure_derivative_check: need a < b");
  if (!(eps0 > 0)) throw RangeError("pure_derivative_check: eps0 must be positive");
  if (!(delta > 0 && delta < 1)) throw RangeError("pure_derivative_check: delta must lie in (0, 1)");
  if (!(std::abs(eps) < 1)) throw RangeError("pure_derivative_check: |eps| must be < 1");
  if (n < 2) throw RangeError("pure_derivative_check: n must be at least 2");
  const SurfaceSpec& S = c.surface();
  const auto grid = linspace(a, b, n);
  const double root = std::sqrt(1 - eps * eps);
  struct Row {
    double r, ds, dss, hyp, ts;
  };
  const auto rows = parallel_map<Row>(n * n, jobs, [&](std::size_t k) {
    const double t = grid[k / n], s = grid[k % n];
    const Geometry geo = geometry(c, alpha, t, s);
    const SecondVariation v = variation_s(S, geo);
    return Row{geo.sigma.length, gradient_from(S, geo, eps).ds, v.value(),
               std::abs(v.sign * v.kappa_curve + root * v.kappa_circle),
               mixed_fd(c, alpha, eps, t, s)};
  });
  PureDerivativeReport rep;
  rep.bound = std::sqrt(delta) * eps0 / 2;
  rep.large_r_threshold = 16 / (eps0 * std::sqrt(delta));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Row& x = rows[k];
    rep.min_hypothesis = std::min(rep.min_hypothesis, x.hyp);
    rep.min_abs_ds = std::min(rep.min_abs_ds, std::abs(x.ds));
    rep.min_abs_dss = std::min(rep.min_abs_dss, std::abs(x.dss));
    rep.r_min = std::min(rep.r_min, x.r);
    rep.max_abs_ts = std::max(rep.max_abs_ts, std::abs(x.ts));
    const std::size_t i = k / n, j = k % n;
    if (x.ds == 0.0) rep.antecedent = true;
    if (j + 1 < n && (x.ds < 0) != (rows[k + 1].ds < 0)) rep.antecedent = true;
    if (i + 1 < n && (x.ds < 0) != (rows[k + n].ds < 0)) rep.antecedent = true;
  }
  rep.hypothesis_met = rep.min_hypothesis > eps0;
  rep.implication_holds = rep.hypothesis_met && (!rep.antecedent || rep.min_abs_dss >= rep.bound);
  rep.large_r_applicable = rep.r_min >= rep.large_r_threshold;
  rep.large_r_holds =
      rep.large_r_applicable && rep.max_abs_ts <= eps0 * std::sqrt(delta) / 8;
  return rep;
}

ComparisonTriangle comparison_triangle(const SurfaceSpec& S, const SurfacePoint& o,
                                       const SurfacePoint& p, const SurfacePoint& q) {
  const GeodesicSegment op = geodesic_between(S, o, p);
  const GeodesicSegment oq = geodesic_between(S, o, q);
  const double c = std::clamp(inner(S, o, op.start.v, oq.start.v), -1.0, 1.0);
  const double a = op.length, b = oq.length;
  return {distance(S, p, q), std::sqrt(std::max(0.0, a * a + b * b - 2 * a * b * c))};
}

}  // namespace geoperiods
