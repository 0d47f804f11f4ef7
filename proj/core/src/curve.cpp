#include "geoperiods/curve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "geoperiods/errors.hpp"
#include "geoperiods/jacobi.hpp"

namespace geoperiods {

using cplx = std::complex<double>;
using std::numbers::pi;

namespace {

Vec2 gamma_vv(const Christoffel& G, const Vec2& v) {
  const double a[2] = {v.x, v.y};
  double out[2] = {0.0, 0.0};
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out[k] += G[k][i][j] * a[i] * a[j];
  return {out[0], out[1]};
}

CurveJet push_jet(const SurfaceSpec& S, const DeckTransform& alpha, const CurveJet& j) {
  if (const auto* t = std::get_if<TorusTranslation>(&alpha.variant())) {
    const auto* torus = S.get_if<FlatTorus>();
    if (!torus) throw TypeMismatchError("torus translation on a non-torus curve");
    return {{j.x.x1 + static_cast<double>(t->m) * torus->L1,
             j.x.x2 + static_cast<double>(t->n) * torus->L2},
            j.d1, j.d2};
  }
  if (S.kind() != SurfaceKind::Hyperbolic)
    throw TypeMismatchError("Möbius closing transform on a non-hyperbolic curve");
  const auto& m = std::get<HyperbolicMobius>(alpha.variant());
  const cplx z(j.x.x1, j.x.x2);
  const cplx den = m.c * z + m.d;
  const cplx f = (m.a * z + m.b) / den;
  const cplx f1 = 1.0 / (den * den);
  const cplx f2 = -2.0 * m.c / (den * den * den);
  const cplx v = to_complex(j.d1), a = to_complex(j.d2);
  return {{f.real(), f.imag()}, to_vec(f1 * v), to_vec(f2 * v * v + f1 * a)};
}

// Unit-speed jet from an arbitrary regular parametrization.
CurveJet unitize(const SurfaceSpec& S, const CurveJet& p) {
  const double sigma = metric_norm(S, p.x, p.d1);
  if (!(sigma > 0)) throw RangeError("curve: parametrization is not regular");
  const Vec2 cov = p.d2 + gamma_vv(christoffel(S, p.x), p.d1);
  const double dsigma = inner(S, p.x, p.d1, cov) / sigma;
  return {p.x, p.d1 / sigma, p.d2 / (sigma * sigma) - p.d1 * (dsigma / (sigma * sigma * sigma))};
}

// Arc-length table u ↦ s with a monotone cubic Hermite inverse s ↦ u.
class ArcTable {
 public:
  ArcTable(const std::function<double(double)>& speed, double T, std::size_t panels) : T_(T) {
    static constexpr std::array<double, 8> x = {-0.9602898564975363, -0.7966664774136267,
                                                -0.5255324099163290, -0.1834346424956498,
                                                0.1834346424956498,  0.5255324099163290,
                                                0.7966664774136267,  0.9602898564975363};
    static constexpr std::array<double, 8> w = {0.1012285362903763, 0.2223810344533745,
                                                0.3137066458778873, 0.3626837833783620,
                                                0.3626837833783620, 0.3137066458778873,
                                                0.2223810344533745, 0.1012285362903763};
    u_.resize(panels + 1);
    s_.resize(panels + 1);
    slope_.resize(panels + 1);
    s_[0] = 0.0;
    const double h = T / static_cast<double>(panels);
    for (std::size_t i = 0; i <= panels; ++i) u_[i] = h * static_cast<double>(i);
    for (std::size_t i = 0; i < panels; ++i) {
      double acc = 0.0;
      for (std::size_t q = 0; q < x.size(); ++q)
        acc += w[q] * speed(u_[i] + 0.5 * h * (1.0 + x[q]));
      s_[i + 1] = s_[i] + 0.5 * h * acc;
    }
    for (std::size_t i = 0; i < panels; ++i) slope_[i] = 1.0 / speed(u_[i]);
    slope_[panels] = slope_[0];
    // Fritsch–Carlson limiter on du/ds.
    for (std::size_t i = 0; i < panels; ++i) {
      const double secant = (u_[i + 1] - u_[i]) / (s_[i + 1] - s_[i]);
      const double a = slope_[i] / secant, b = slope_[i + 1] / secant;
      const double r2 = a * a + b * b;
      if (r2 > 9.0) {
        const double tau = 3.0 / std::sqrt(r2);
        slope_[i] = tau * a * secant;
        slope_[i + 1] = tau * b * secant;
      }
    }
  }

  double length() const { return s_.back(); }

  double u_of(double s) const {
    auto it = std::upper_bound(s_.begin(), s_.end(), s);
    std::size_t j = static_cast<std::size_t>(it - s_.begin());
    j = std::clamp<std::size_t>(j, 1, s_.size() - 1);
    const double h = s_[j] - s_[j - 1];
    const double t = (s - s_[j - 1]) / h;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return h00 * u_[j - 1] + h10 * h * slope_[j - 1] + h01 * u_[j] + h11 * h * slope_[j];
  }

 private:
  double T_;
  std::vector<double> u_, s_, slope_;
};

// Periodic cubic spline through (t_i, y_i), t strictly increasing, period P.
class PeriodicSpline {
 public:
  PeriodicSpline(std::vector<double> t, std::vector<double> y, double period)
      : t_(std::move(t)), y_(std::move(y)), P_(period) {
    const std::size_t n = t_.size();
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i)
      h[i] = (i + 1 < n ? t_[i + 1] : t_[0] + P_) - t_[i];
    // Cyclic tridiagonal system for the second derivatives.
    std::vector<double> a(n), b(n), c(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t im = (i + n - 1) % n, ip = (i + 1) % n;
      a[i] = h[im];
      b[i] = 2.0 * (h[im] + h[i]);
      c[i] = h[i];
      d[i] = 6.0 * ((y_[ip] - y_[i]) / h[i] - (y_[i] - y_[im]) / h[im]);
    }
    m_ = solve_cyclic(a, b, c, d);
    h_ = std::move(h);
  }

  // Value and first two derivatives at u (any real).
  std::array<double, 3> eval(double u) const {
    double x = std::fmod(u - t_[0], P_);
    if (x < 0) x += P_;
    x += t_[0];
    auto it = std::upper_bound(t_.begin(), t_.end(), x);
    std::size_t i = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
    const std::size_t n = t_.size(), ip = (i + 1) % n;
    const double h = h_[i];
    const double A = (t_[i] + h - x) / h, B = (x - t_[i]) / h;
    const double v = A * y_[i] + B * y_[ip] + ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[ip]) * h * h / 6.0;
    const double d1 = (y_[ip] - y_[i]) / h - (3 * A * A - 1) / 6.0 * h * m_[i] +
                      (3 * B * B - 1) / 6.0 * h * m_[ip];
    const double d2 = A * m_[i] + B * m_[ip];
    return {v, d1, d2};
  }

 private:
  static std::vector<double> solve_cyclic(std::vector<double> a, std::vector<double> b,
                                          std::vector<double> c, std::vector<double> d) {
    // Sherman–Morrison on top of the Thomas algorithm.
    const std::size_t n = b.size();
    if (n < 3) throw RangeError("periodic spline needs at least 3 distinct points");
    const double alpha = c[n - 1], beta = a[0];
    const double gamma = -b[0];
    b[0] -= gamma;
    b[n - 1] -= alpha * beta / gamma;
    auto thomas = [&](std::vector<double> rhs) {
      std::vector<double> cp(n), x(n);
      cp[0] = c[0] / b[0];
      rhs[0] /= b[0];
      for (std::size_t i = 1; i < n; ++i) {
        const double m = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / m;
        rhs[i] = (rhs[i] - a[i] * rhs[i - 1]) / m;
      }
      x[n - 1] = rhs[n - 1];
      for (std::size_t i = n - 1; i-- > 0;) x[i] = rhs[i] - cp[i] * x[i + 1];
      return x;
    };
    std::vector<double> uvec(n, 0.0);
    uvec[0] = gamma;
    uvec[n - 1] = alpha;
    const auto x = thomas(d);
    const auto z = thomas(uvec);
    const double fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - fact * z[i];
    return out;
  }

  std::vector<double> t_, y_, m_, h_;
  double P_;
};

constexpr std::size_t kArcPanels = 512;

Curve reparametrized(SurfaceSpec S, std::function<double(double)> speed,
                     std::function<CurveJet(double)> unit_at, double T, std::string name,
                     std::optional<DeckTransform> closing, std::size_t n_cache) {
  auto table = std::make_shared<ArcTable>(speed, T, kArcPanels);
  const double L = table->length();
  auto jet = [table, unit_at = std::move(unit_at)](double s) { return unit_at(table->u_of(s)); };
  return Curve::from_unit_speed(std::move(S), std::move(jet), L, std::move(name),
                                std::move(closing), n_cache);
}

}  // namespace

// ---------------------------------------------------------------------------

Curve::Curve(SurfaceSpec S, JetFn jet, double L, std::string name,
             std::optional<DeckTransform> closing, std::size_t n_cache)
    : surface_(std::make_shared<const SurfaceSpec>(std::move(S))),
      unit_(std::move(jet)),
      L_(L),
      name_(std::move(name)),
      closing_(std::move(closing)) {
  if (!(L_ > 0) || !std::isfinite(L_)) throw RangeError("curve: length must be positive");
  if (closing_ && closing_->is_identity()) closing_.reset();
  build_cache(n_cache);
}

Curve Curve::from_unit_speed(SurfaceSpec S, JetFn jet, double L, std::string name,
                             std::optional<DeckTransform> closing, std::size_t n_cache) {
  return Curve(std::move(S), std::move(jet), L, std::move(name), std::move(closing), n_cache);
}

Curve Curve::from_parametric(SurfaceSpec S, JetFn jet, double T, std::string name,
                             std::optional<DeckTransform> closing, std::size_t n_cache) {
  if (!(T > 0)) throw RangeError("curve: parameter period must be positive");
  auto shared = std::make_shared<SurfaceSpec>(S);
  auto speed = [shared, jet](double u) {
    const CurveJet p = jet(u);
    return metric_norm(*shared, p.x, p.d1);
  };
  auto unit_at = [shared, jet](double u) { return unitize(*shared, jet(u)); };
  return reparametrized(std::move(S), speed, unit_at, T, std::move(name), std::move(closing),
                        n_cache);
}

Curve Curve::from_points(SurfaceSpec S, const std::vector<double>& t,
                         const std::vector<SurfacePoint>& pts, std::string name,
                         std::size_t n_cache) {
  if (t.size() != pts.size() || t.size() < 4)
    throw FormatError("curve points: need at least 4 rows with matching t");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw FormatError("curve points: t must be strictly increasing");
  const auto& first = pts.front();
  const auto& last = pts.back();
  if (std::hypot(first.x1 - last.x1, first.x2 - last.x2) > 1e-9)
    throw FormatError("curve points: first and last rows must coincide");
  for (const auto& p : pts) check_in_domain(S, p);
  const std::size_t n = t.size() - 1;
  const double period = t.back() - t.front();
  std::vector<double> tt(t.begin(), t.begin() + static_cast<long>(n)), xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = pts[i].x1;
    ys[i] = pts[i].x2;
  }
  auto sx = std::make_shared<PeriodicSpline>(tt, xs, period);
  auto sy = std::make_shared<PeriodicSpline>(tt, ys, period);
  const double t0 = t.front();
  auto jet = [sx, sy, t0](double u) {
    const auto a = sx->eval(t0 + u), b = sy->eval(t0 + u);
    return CurveJet{{a[0], b[0]}, {a[1], b[1]}, {a[2], b[2]}};
  };
  return from_parametric(std::move(S), jet, period, std::move(name), std::nullopt, n_cache);
}

Curve Curve::from_csv(SurfaceSpec S, const std::string& path, std::size_t n_cache) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open curve file " + path);
  std::string line;
  auto strip = [](std::string s) {
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
            s.end());
    return s;
  };
  if (!std::getline(in, line) || strip(line) != "t,x1,x2")
    throw FormatError(path + ": expected header t,x1,x2");
  std::vector<double> t;
  std::vector<SurfacePoint> pts;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = strip(line);
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string a, b, c;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c, ','))
      throw FormatError(path + ": row " + std::to_string(row) + " needs three columns");
    try {
      t.push_back(std::stod(a));
      pts.push_back({std::stod(b), std::stod(c)});
    } catch (const std::exception&) {
      throw FormatError(path + ": row " + std::to_string(row) + " is not numeric");
    }
  }
  return from_points(std::move(S), t, pts, path, n_cache);
}

void Curve::build_cache(std::size_t n) {
  if (n < 8) n = 8;
  cache_.clear();
  cache_.reserve(n);
  const SurfaceSpec& S = *surface_;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = L_ * static_cast<double>(i) / static_cast<double>(n);
    const CurveJet j = unit_(s);
    check_in_domain(S, j.x);
    const double speed = metric_norm(S, j.x, j.d1);
    if (std::abs(speed - 1.0) > 1e-6) {
      std::ostringstream os;
      os << "curve '" << name_ << "': speed " << speed << " at s=" << s << " is not unit";
      throw RangeError(os.str());
    }
    const Vec2 acc = j.d2 + gamma_vv(christoffel(S, j.x), j.d1);
    cache_.push_back({s, j, inner(S, j.x, acc, perp(S, j.x, j.d1))});
  }
  // Closure in chart coordinates (up to the closing transform).
  CurveJet start = unit_(0.0);
  if (closing_) start = push_jet(S, *closing_, start);
  const CurveJet end = unit_(L_);
  double dx = end.x.x1 - start.x.x1, dy = end.x.x2 - start.x.x2;
  if (S.kind() == SurfaceKind::RoundSphere) dy = std::remainder(dy, 2 * pi);
  const double scale = std::max({1.0, std::abs(start.x.x1), std::abs(start.x.x2)});
  if (std::hypot(dx, dy) > 1e-9 * scale) {
    std::ostringstream os;
    os << "curve '" << name_ << "' is not closed: gap " << std::hypot(dx, dy);
    throw RangeError(os.str());
  }
}

CurveJet Curve::jet(double s) const {
  if (s >= 0.0 && s < L_) return unit_(s);
  const double k = std::floor(s / L_);
  double base = s - k * L_;
  if (base >= L_) base -= L_;
  if (base < 0) base = 0;
  CurveJet j = unit_(base);
  if (!closing_) return j;
  const long n = static_cast<long>(k);
  const DeckTransform step = n > 0 ? *closing_ : closing_->inverse();
  for (long i = 0; i < std::abs(n); ++i) j = push_jet(*surface_, step, j);
  return j;
}

TangentVec Curve::tangent(double s) const {
  const CurveJet j = jet(s);
  return {j.x, j.d1};
}

TangentVec Curve::normal(double s) const {
  const CurveJet j = jet(s);
  return {j.x, perp(*surface_, j.x, j.d1)};
}

Vec2 Curve::covariant_acceleration(double s) const {
  const CurveJet j = jet(s);
  return j.d2 + gamma_vv(christoffel(*surface_, j.x), j.d1);
}

double Curve::geodesic_curvature(double s) const {
  const CurveJet j = jet(s);
  return metric_norm(*surface_, j.x, j.d2 + gamma_vv(christoffel(*surface_, j.x), j.d1));
}

double Curve::signed_normal_curvature(double s) const {
  const CurveJet j = jet(s);
  const Vec2 acc = j.d2 + gamma_vv(christoffel(*surface_, j.x), j.d1);
  return inner(*surface_, j.x, acc, perp(*surface_, j.x, j.d1));
}

Curve Curve::shifted(double c) const {
  auto self = std::make_shared<const Curve>(*this);
  return Curve(*surface_, [self, c](double s) { return self->jet(s + c); }, L_,
               name_ + "+shift", closing_, cache_.size());
}

Curve Curve::reversed() const {
  auto self = std::make_shared<const Curve>(*this);
  auto jet = [self](double s) {
    CurveJet j = self->jet(-s);
    j.d1 = -j.d1;
    return j;
  };
  std::optional<DeckTransform> inv;
  if (closing_) inv = closing_->inverse();
  return Curve(*surface_, jet, L_, name_ + "-reversed", inv, cache_.size());
}

double geodesic_curvature(const Curve& c, double s) { return c.geodesic_curvature(s); }
double signed_normal_curvature(const Curve& c, double s) { return c.signed_normal_curvature(s); }

// ---------------------------------------------------------------------------
// Built-in curves

Curve geodesic_circle(const SurfaceSpec& S, const SurfacePoint& center, double r, Orientation o,
                      std::size_t n_cache) {
  if (!(r >= 1e-2 && r <= 50.0)) throw RangeError("geodesic_circle: radius must lie in [0.01, 50]");
  check_in_domain(S, center);
  const double sgn = o == Orientation::CounterClockwise ? 1.0 : -1.0;
  std::ostringstream nm;
  nm << "circle(r=" << r << (o == Orientation::CounterClockwise ? ",ccw)" : ",cw)");

  switch (S.kind()) {
    case SurfaceKind::FlatTorus: {
      const double w = sgn / r;
      auto jet = [center, r, w](double s) {
        const double c = std::cos(w * s), sn = std::sin(w * s);
        return CurveJet{{center.x1 + r * c, center.x2 + r * sn},
                        {-r * w * sn, r * w * c},
                        {-r * w * w * c, -r * w * w * sn}};
      };
      return Curve::from_unit_speed(S, jet, 2 * pi * r, nm.str(), std::nullopt, n_cache);
    }
    case SurfaceKind::Hyperbolic: {
      const double a = S.get_if<Hyperbolic>()->a;
      const double rho = a * r;
      const double q = std::tanh(rho / 2);
      const double w_speed = sgn * a / std::sinh(rho);
      const double x0 = center.x1, y0 = center.x2;
      auto jet = [=](double s) {
        const double psi = w_speed * s;
        const cplx w = cplx(0.0, -q) * std::polar(1.0, psi);
        const cplx one_minus = 1.0 - w;
        const cplx m = cplx(0.0, 1.0) * (1.0 + w) / one_minus;
        const cplx m1 = cplx(0.0, 2.0) / (one_minus * one_minus);
        const cplx m2 = cplx(0.0, 4.0) / (one_minus * one_minus * one_minus);
        const cplx z = x0 + y0 * m;
        const cplx dz = y0 * m1 * cplx(0.0, 1.0) * w;
        const cplx ddz = -y0 * w * (m2 * w + m1);
        return CurveJet{{z.real(), z.imag()}, to_vec(w_speed * dz), to_vec(w_speed * w_speed * ddz)};
      };
      return Curve::from_unit_speed(S, jet, 2 * pi * std::sinh(rho) / a, nm.str(), std::nullopt,
                                    n_cache);
    }
    case SurfaceKind::RoundSphere: {
      const double R = S.get_if<RoundSphere>()->R;
      if (!(r < pi * R)) throw RangeError("geodesic_circle: radius exceeds the sphere diameter");
      const bool north = std::abs(center.x1) < 1e-12;
      const bool south = std::abs(center.x1 - pi) < 1e-12;
      if (north || south) {
        const double theta = north ? r / R : pi - r / R;
        const double w = (north ? sgn : -sgn) / (R * std::sin(theta));
        auto jet = [theta, w](double s) {
          return CurveJet{{theta, w * s}, {0.0, w}, {0.0, 0.0}};
        };
        // Longitude runs over one full turn; closure is taken mod 2π.
        return Curve::from_unit_speed(S, jet, 2 * pi * R * std::sin(r / R), nm.str(), std::nullopt,
                                      n_cache);
      }
      if (center.x1 - r / R < 0.05 || center.x1 + r / R > pi - 0.05)
        throw DomainError("geodesic_circle: sphere circle passes too close to a chart pole");
      break;
    }
    case SurfaceKind::Conformal: break;
  }

  // Generic construction: circle points from the exponential map, tangent
  // from the Jacobi field J = c·σ′^⊥, curvature c′/c.
  auto shared = std::make_shared<SurfaceSpec>(S);
  const bool sphere = S.kind() == SurfaceKind::RoundSphere;
  auto eval = [shared, center, r, sgn, sphere](double u) {
    const double psi = sgn * u;
    const RayJacobi rj = flow_with_jacobi(*shared, center, unit_at_angle(*shared, center, psi), r,
                                          0.0, 1.0);
    SurfacePoint x = rj.x;
    if (sphere) x.x2 = center.x2 + std::remainder(x.x2 - center.x2, 2 * pi);
    const Vec2 T = sgn * perp(*shared, rj.x, rj.arrival.v);
    const double h = sgn * rj.dj / rj.j;
    const Vec2 acc = h * perp(*shared, x, T) - gamma_vv(christoffel(*shared, x), T);
    return std::pair{CurveJet{x, T, acc}, rj.j};
  };
  auto speed = [eval](double u) { return eval(u).second; };
  auto unit_at = [eval](double u) { return eval(u).first; };
  return reparametrized(S, speed, unit_at, 2 * pi, nm.str(), std::nullopt, n_cache);
}

Curve vertical_geodesic(const SurfaceSpec& S, double ell, double y0) {
  const auto* h = S.get_if<Hyperbolic>();
  if (!h) throw TypeMismatchError("vertical_geodesic needs the hyperbolic half-plane");
  if (!(ell > 0) || !(y0 > 0)) throw RangeError("vertical_geodesic: ell and y0 must be positive");
  const double a = h->a;
  auto jet = [a, y0](double s) {
    const double y = y0 * std::exp(a * s);
    return CurveJet{{0.0, y}, {0.0, a * y}, {0.0, a * a * y}};
  };
  return Curve::from_unit_speed(S, jet, ell / a, "vertical_geodesic",
                                DeckTransform::axis_translation(ell));
}

Curve hypercycle(const SurfaceSpec& S, double d, double ell) {
  const auto* h = S.get_if<Hyperbolic>();
  if (!h) throw TypeMismatchError("hypercycle needs the hyperbolic half-plane");
  if (!(d > 0) || !(ell > 0)) throw RangeError("hypercycle: d and ell must be positive");
  const double a = h->a;
  const double theta0 = std::asin(1.0 / std::cosh(a * d));
  const double w = a * std::sin(theta0);
  const cplx dir = std::polar(1.0, theta0);
  auto jet = [w, dir](double s) {
    const cplx z = std::exp(w * s) * dir;
    return CurveJet{{z.real(), z.imag()}, to_vec(w * z), to_vec(w * w * z)};
  };
  std::ostringstream nm;
  nm << "hypercycle(d=" << d << ")";
  return Curve::from_unit_speed(S, jet, ell / w, nm.str(), DeckTransform::axis_translation(ell));
}

Curve torus_line(const SurfaceSpec& S, const SurfacePoint& p, long m, long n) {
  const auto* t = S.get_if<FlatTorus>();
  if (!t) throw TypeMismatchError("torus_line needs a flat torus");
  if (m == 0 && n == 0) throw RangeError("torus_line: direction must be nonzero");
  const Vec2 span{static_cast<double>(m) * t->L1, static_cast<double>(n) * t->L2};
  const double L = norm(span);
  const Vec2 T = span / L;
  auto jet = [p, T](double s) { return CurveJet{SurfacePoint::from(p.vec() + s * T), T, {}}; };
  return Curve::from_unit_speed(S, jet, L, "torus_line", DeckTransform::translation(m, n));
}

Curve perturbed_circle(const SurfaceSpec& S, const SurfacePoint& center, double r, double eta,
                       int k, std::size_t n_cache) {
  if (!(r > 0) || !(std::abs(eta) < 1)) throw RangeError("perturbed_circle: need r > 0, |eta| < 1");
  auto jet = [center, r, eta, k](double u) {
    const double c = std::cos(u), s = std::sin(u);
    const double rho = r * (1 + eta * std::cos(k * u));
    const double d1 = -r * eta * k * std::sin(k * u);
    const double d2 = -r * eta * k * k * std::cos(k * u);
    return CurveJet{{center.x1 + rho * c, center.x2 + rho * s},
                    {d1 * c - rho * s, d1 * s + rho * c},
                    {d2 * c - 2 * d1 * s - rho * c, d2 * s + 2 * d1 * c - rho * s}};
  };
  std::ostringstream nm;
  nm << "perturbed_circle(r=" << r << ",eta=" << eta << ",k=" << k << ")";
  return Curve::from_parametric(S, jet, 2 * pi, nm.str(), std::nullopt, n_cache);
}

// ---------------------------------------------------------------------------
// Fermi charts

SurfacePoint FermiChart::map(double x1, double x2) const {
  const Curve& c = *curve_;
  if (x2 == 0.0) return c.point(x1);
  return geodesic_flow(c.surface(), c.point(x1), c.normal(x1), x2).first;
}

std::pair<Vec2, Vec2> FermiChart::differential(double x1, double x2) const {
  const Curve& c = *curve_;
  const SurfaceSpec& S = c.surface();
  const TangentVec n = c.normal(x1);
  const RayJacobi rj = flow_with_jacobi(S, n.base, n, x2, 1.0, -c.signed_normal_curvature(x1));
  return {-rj.j * perp(S, rj.x, rj.arrival.v), rj.arrival.v};
}

Mat2 FermiChart::metric(double x1, double x2) const {
  const SurfaceSpec& S = curve_->surface();
  const SurfacePoint p = map(x1, x2);
  const auto [a, b] = differential(x1, x2);
  const double g12 = inner(S, p, a, b);
  return {inner(S, p, a, a), g12, g12, inner(S, p, b, b)};
}

Vec2 FermiChart::coordinates(const SurfacePoint& p) const {
  const Curve& c = *curve_;
  const SurfaceSpec& S = c.surface();
  check_in_domain(S, p);
  const double L = c.length();
  // Seed from the nearest cached sample.
  const auto& cache = c.cache();
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cache.size(); ++i) {
    const double d = metric_norm(S, cache[i].jet.x, p.vec() - cache[i].jet.x.vec());
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  double x1 = cache[best].s;
  const SurfacePoint base = cache[best].jet.x;
  double x2 = inner(S, base, p.vec() - base.vec(), perp(S, base, cache[best].jet.d1));
  x1 += inner(S, base, p.vec() - base.vec(), cache[best].jet.d1);
  if (std::abs(x2) > 2 * width_) throw DomainError("fermi_coordinates: point outside the tube");

  for (int iter = 0; iter < 50; ++iter) {
    const SurfacePoint q = map(x1, x2);
    const Vec2 miss = q.vec() - p.vec();
    const double resid = metric_norm(S, p, miss);
    if (resid < 1e-13) {
      if (std::abs(x2) > width_) throw DomainError("fermi_coordinates: point outside the tube");
      double r = std::fmod(x1, L);
      if (r < 0) r += L;
      return {r, x2};
    }
    const auto [d1, d2] = differential(x1, x2);
    const double det = cross(d1, d2);
    if (det == 0.0) throw ConvergenceError("fermi_coordinates: singular differential");
    double s1 = -cross(miss, d2) / det;
    double s2 = -cross(d1, miss) / det;
    const double cap = 0.25;
    const double m = std::max(std::abs(s1), std::abs(s2));
    if (m > cap) {
      s1 *= cap / m;
      s2 *= cap / m;
    }
    x1 += s1;
    x2 += s2;
    if (std::abs(x2) > 2 * width_) throw DomainError("fermi_coordinates: point outside the tube");
    if (std::abs(s1) + std::abs(s2) < 1e-15 * (1 + std::abs(x1))) {
      if (resid < 1e-10) {
        if (std::abs(x2) > width_) throw DomainError("fermi_coordinates: point outside the tube");
        double r = std::fmod(x1, L);
        if (r < 0) r += L;
        return {r, x2};
      }
    }
  }
  throw ConvergenceError("fermi_coordinates: Newton did not converge in 50 iterations");
}

}  // namespace geoperiods
