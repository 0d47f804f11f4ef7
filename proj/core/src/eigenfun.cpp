#include "geoperiods/eigenfun.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "geoperiods/errors.hpp"

namespace geoperiods {

using cplx = std::complex<double>;
using std::numbers::pi;

double legendre_p(int n, double x) {
  if (n < 0 || n > EigenfunctionSpec::kMaxDegree) throw RangeError("legendre_p: degree out of range");
  if (n == 0) return 1.0;
  double p0 = 1.0, p1 = x;
  for (int k = 1; k < n; ++k) {
    const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double highest_weight_norm(int n, double R) {
  // ∫ sin^{2n}θ dA = 4πR²·(2n)!!/(2n+1)!! = 4πR²·2^{2n}(n!)²/(2n+1)!.
  const double log_ratio = 2.0 * n * std::log(2.0) + 2.0 * std::lgamma(n + 1.0) - std::lgamma(2.0 * n + 2.0);
  return std::exp(-0.5 * (std::log(4.0 * pi * R * R) + log_ratio));
}

EigenfunctionSpec EigenfunctionSpec::torus_wave(const SurfaceSpec& S, long m, long n, bool cosine) {
  if (S.kind() != SurfaceKind::FlatTorus) throw TypeMismatchError("torus_wave needs a flat torus");
  return EigenfunctionSpec(S, TorusWave{m, n, cosine});
}

EigenfunctionSpec EigenfunctionSpec::sphere_zonal(const SurfaceSpec& S, int n) {
  if (S.kind() != SurfaceKind::RoundSphere) throw TypeMismatchError("sphere_zonal needs the sphere");
  if (n < 0 || n > kMaxDegree) throw RangeError("sphere_zonal: degree must lie in [0, 4096]");
  EigenfunctionSpec e(S, SphereZonal{n});
  e.norm_ = std::sqrt((2.0 * n + 1.0) / (4.0 * pi)) / S.get_if<RoundSphere>()->R;
  return e;
}

EigenfunctionSpec EigenfunctionSpec::sphere_highest_weight(const SurfaceSpec& S, int n) {
  if (S.kind() != SurfaceKind::RoundSphere)
    throw TypeMismatchError("sphere_highest_weight needs the sphere");
  if (n < 1 || n > kMaxDegree) throw RangeError("sphere_highest_weight: degree must lie in [1, 4096]");
  EigenfunctionSpec e(S, SphereHighestWeight{n});
  e.norm_ = highest_weight_norm(n, S.get_if<RoundSphere>()->R);
  return e;
}

EigenfunctionSpec EigenfunctionSpec::hyperbolic_wave_sum(const SurfaceSpec& S,
                                                         std::vector<WaveTerm> terms,
                                                         double lambda) {
  if (S.kind() != SurfaceKind::Hyperbolic)
    throw TypeMismatchError("hyperbolic_wave_sum needs the hyperbolic half-plane");
  if (terms.empty() || terms.size() > 64) throw RangeError("hyperbolic_wave_sum: 1 to 64 terms");
  if (!(lambda > 0)) throw RangeError("hyperbolic_wave_sum: lambda must be positive");
  for (const auto& t : terms)
    if (!std::isfinite(t.amp.real()) || !std::isfinite(t.amp.imag()) ||
        (t.b && !std::isfinite(*t.b)))
      throw RangeError("hyperbolic_wave_sum: non-finite term");
  return EigenfunctionSpec(S, HyperbolicWaveSum{std::move(terms), lambda});
}

EigenfunctionSpec EigenfunctionSpec::random_wave_sum(const SurfaceSpec& S, double lambda, int count,
                                                     std::uint64_t seed, double spread) {
  if (count < 1 || count > 64) throw RangeError("random_wave_sum: 1 to 64 terms");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> B(-spread, spread), phase(0.0, 2 * pi);
  std::vector<WaveTerm> terms;
  terms.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double b = B(rng);
    terms.push_back({b, std::polar(1.0, phase(rng))});
  }
  return hyperbolic_wave_sum(S, std::move(terms), lambda);
}

double EigenfunctionSpec::eigenvalue() const {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, TorusWave>) {
          const auto* t = surface_.get_if<FlatTorus>();
          const double k1 = 2 * pi * static_cast<double>(f.m) / t->L1;
          const double k2 = 2 * pi * static_cast<double>(f.n) / t->L2;
          return k1 * k1 + k2 * k2;
        } else if constexpr (std::is_same_v<T, HyperbolicWaveSum>) {
          const double a = surface_.get_if<Hyperbolic>()->a;
          return a * a * (0.25 + f.lambda * f.lambda);
        } else {
          const double R = surface_.get_if<RoundSphere>()->R;
          return f.n * (f.n + 1.0) / (R * R);
        }
      },
      v_);
}

double EigenfunctionSpec::frequency() const {
  if (const auto* w = std::get_if<HyperbolicWaveSum>(&v_))
    return surface_.get_if<Hyperbolic>()->a * w->lambda;
  return std::sqrt(eigenvalue());
}

bool EigenfunctionSpec::real_valued() const {
  if (const auto* t = std::get_if<TorusWave>(&v_)) return t->cosine || (t->m == 0 && t->n == 0);
  return std::holds_alternative<SphereZonal>(v_);
}

std::string EigenfunctionSpec::family() const {
  switch (v_.index()) {
    case 0: return "torus_wave";
    case 1: return "sphere_zonal";
    case 2: return "sphere_highest_weight";
    default: return "hyperbolic_wave_sum";
  }
}

std::string EigenfunctionSpec::describe() const {
  std::ostringstream os;
  os.precision(12);
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, TorusWave>)
          os << (f.cosine ? "torus_cos(" : "torus_wave(") << f.m << ";" << f.n << ")";
        else if constexpr (std::is_same_v<T, SphereZonal>)
          os << "sphere_zonal(" << f.n << ")";
        else if constexpr (std::is_same_v<T, SphereHighestWeight>)
          os << "sphere_highest_weight(" << f.n << ")";
        else
          os << "hyperbolic_wave_sum(terms=" << f.terms.size() << ";lambda=" << f.lambda << ")";
      },
      v_);
  return os.str();
}

cplx EigenfunctionSpec::evaluate(const SurfacePoint& p) const {
  check_in_domain(surface_, p);
  return std::visit(
      [&](const auto& f) -> cplx {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, TorusWave>) {
          const auto* t = surface_.get_if<FlatTorus>();
          // Reduce to one turn first so large lifts stay accurate.
          const double turns = std::fmod(static_cast<double>(f.m) * p.x1 / t->L1, 1.0) +
                               std::fmod(static_cast<double>(f.n) * p.x2 / t->L2, 1.0);
          const double ph = 2 * pi * turns;
          if (f.cosine) return {std::cos(ph), 0.0};
          return std::polar(1.0, ph);
        } else if constexpr (std::is_same_v<T, SphereZonal>) {
          return {norm_ * legendre_p(f.n, std::cos(p.x1)), 0.0};
        } else if constexpr (std::is_same_v<T, SphereHighestWeight>) {
          const double s = std::sin(p.x1);
          const double mag = s == 0.0 ? 0.0 : norm_ * std::exp(f.n * std::log(std::abs(s)));
          const double sign = (s < 0 && f.n % 2 == 1) ? -1.0 : 1.0;
          return std::polar(sign * mag, f.n * p.x2);
        } else {
          const cplx expo(0.5, f.lambda);
          cplx acc = 0.0;
          for (const auto& term : f.terms) {
            double P;
            if (term.b) {
              const double dx = p.x1 - *term.b;
              P = p.x2 / (dx * dx + p.x2 * p.x2);
            } else {
              P = p.x2;
            }
            acc += term.amp * std::exp(expo * std::log(P));
          }
          return acc;
        }
      },
      v_);
}

double laplacian_residual(const EigenfunctionSpec& e, const SurfacePoint& p, double h) {
  if (!(h >= 1e-5 && h <= 1e-2)) throw RangeError("laplacian_residual: h must lie in [1e-5, 1e-2]");
  const SurfaceSpec& S = e.surface();
  auto f = [&](double x, double y) { return e.evaluate({x, y}); };
  const cplx c = f(p.x1, p.x2);
  cplx lap;
  if (const auto* sph = S.get_if<RoundSphere>()) {
    const double th = p.x1, R = sph->R;
    const double st = std::sin(th);
    const cplx up = f(th + h, p.x2), dn = f(th - h, p.x2);
    const cplx radial = (std::sin(th + h / 2) * (up - c) - std::sin(th - h / 2) * (c - dn)) / (h * h * st);
    const cplx az = (f(th, p.x2 + h) - 2.0 * c + f(th, p.x2 - h)) / (h * h * st * st);
    lap = (radial + az) / (R * R);
  } else {
    const cplx flat = (f(p.x1 + h, p.x2) + f(p.x1 - h, p.x2) + f(p.x1, p.x2 + h) +
                       f(p.x1, p.x2 - h) - 4.0 * c) /
                      (h * h);
    const Mat2 g = metric_at(S, p);
    lap = flat / g.a11;
  }
  return std::abs(lap + e.eigenvalue() * c);
}

}  // namespace geoperiods
