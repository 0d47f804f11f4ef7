#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "geoperiods/admissibility.hpp"
#include "geoperiods/errors.hpp"
#include "geoperiods/phase.hpp"

using namespace geoperiods;
using std::numbers::pi;

namespace {

struct Config {
  SurfaceSpec S = SurfaceSpec::hyperbolic(1.0);
  std::shared_ptr<const Curve> c =
      std::make_shared<const Curve>(geodesic_circle(S, {0.0, 1.0}, 1.0));
  DeckTransform alpha = DeckTransform::axis_translation(6.0);
  double L = c->length();
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-12); }

}  // namespace

TEST_CASE("phase values") {
  const Config k;
  for (double t : {0.0, 1.0, 4.2}) CHECK(phase(*k.c, k.alpha, 0.37, t, t) == phase_distance(*k.c, k.alpha, t, t));
  // Axis crossings of the circle about i are i·e and i/e.
  const double top = k.L / 4, bottom = 3 * k.L / 4;
  CHECK(phase(*k.c, k.alpha, 0.2, top, top) == doctest::Approx(6.0).epsilon(1e-10));
  CHECK(phase(*k.c, k.alpha, 0.0, top, bottom) == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(phase(*k.c, k.alpha, 0.0, bottom, top) == doctest::Approx(8.0).epsilon(1e-10));

  const auto T = SurfaceSpec::flat_torus(2 * pi, 2 * pi);
  const auto line = torus_line(T, {0, 0}, 1, 0);
  const auto along = DeckTransform::translation(1, 0);
  for (auto [t, s] : {std::pair{1.0, 0.5}, std::pair{0.2, 3.0}, std::pair{5.0, 1.0}}) {
    const double eps = 0.3;
    CHECK(phase(line, along, eps, t, s) == doctest::Approx(eps * (t - s) + std::abs(t - s - 2 * pi)));
  }
  CHECK_THROWS_AS(phase(line, DeckTransform::translation(0, 0), 0.0, 1.0, 1.0), ProximityError);
  CHECK_THROWS_AS(phase(geodesic_circle(SurfaceSpec::round_sphere(1), {0, 0}, 1.0),
                        DeckTransform::translation(0, 0), 0.0, 0.0, 1.0),
                  UnsupportedSurfaceError);
}

TEST_CASE("phase gradient") {
  const Config k;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0, k.L);
  const double h = 1e-3;
  for (int i = 0; i < 100; ++i) {
    const double t = U(rng), s = U(rng), eps = 0.4;
    const auto g = phase_gradient(*k.c, k.alpha, eps, t, s);
    const double ft = (phase(*k.c, k.alpha, eps, t + h, s) - phase(*k.c, k.alpha, eps, t - h, s)) / (2 * h);
    const double fs = (phase(*k.c, k.alpha, eps, t, s + h) - phase(*k.c, k.alpha, eps, t, s - h)) / (2 * h);
    CHECK(std::abs(g.dt - ft) <= 1e-5);
    CHECK(std::abs(g.ds - fs) <= 1e-5);
    CHECK(std::abs(g.ds + eps) <= 1 + 1e-9);
    // Mirror symmetry through the geodesic |z| = e³ swaps (t, s) ↔ (−s, −t).
    const auto m = phase_gradient(*k.c, k.alpha, 0.0, t, k.L - t);
    CHECK(std::abs(m.dt + m.ds) < 1e-8);
  }
}

TEST_CASE("Hessian formulas against finite differences") {
  const Config k;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0, k.L);
  for (int i = 0; i < 100; ++i) {
    const double t = U(rng), s = U(rng);
    const auto H = phase_hessian(*k.c, k.alpha, 0.3, t, s);
    const auto F = phase_hessian_fd(*k.c, k.alpha, 0.3, t, s);
    CHECK(rel(H.tt, F.tt) <= 1e-3);
    CHECK(rel(H.ss, F.ss) <= 1e-3);
    CHECK(std::abs(H.ts - F.ts) <= 1e-5);
  }
  // Straight line against its transverse translate.
  const auto T = SurfaceSpec::flat_torus(2 * pi, 2 * pi);
  const auto line = torus_line(T, {0, 0}, 1, 0);
  const auto up = DeckTransform::translation(0, 1);
  for (auto [t, s] : {std::pair{1.0, 0.5}, std::pair{0.2, 3.0}}) {
    const double r = std::hypot(t - s, 2 * pi);
    const auto H = phase_hessian(line, up, 0.1, t, s);
    CHECK(H.ss == doctest::Approx(4 * pi * pi / (r * r * r)).epsilon(1e-12));
    CHECK(H.tt == doctest::Approx(4 * pi * pi / (r * r * r)).epsilon(1e-12));
    CHECK(rel(H.ss, phase_hessian_fd(line, up, 0.1, t, s).ss) <= 1e-6);
    const auto v = second_variation_s(line, up, t, s);
    CHECK(v.kappa_circle == doctest::Approx(1 / r));
    CHECK(v.cos_theta == doctest::Approx(2 * pi / r));
  }
}

TEST_CASE("phase grid and mixed bound") {
  const Config k;
  const auto g = build_phase_grid(k.c, k.alpha, 0.2, linspace(0, k.L, 12), linspace(0, k.L, 12), 4);
  REQUIRE(g.nodes.size() == 144);
  for (const auto& n : g.nodes) {
    CHECK(n.r > 0);
    CHECK(std::abs(n.dt) <= 1 + 0.2 + 1e-9);
    CHECK(std::abs(n.ds) <= 1 + 0.2 + 1e-9);
    CHECK(std::abs(n.ts - n.fd_ts) <= 1e-5);
  }
  const auto mb = mixed_bound_check(g);
  CHECK(mb.checked == 144);
  CHECK(mb.holds);
  const auto cs = circle_sandwich_check(g);
  CHECK(cs.holds);
  CHECK(cs.min_gap > 0);
  std::ostringstream os;
  g.write_csv(os);
  CHECK(os.str().rfind("t,s,r,phi,dphi_t,dphi_s,d2phi_tt,d2phi_ts,d2phi_ss,fd_tt,fd_ts,fd_ss\n", 0) == 0);
  const auto g1 = build_phase_grid(k.c, k.alpha, 0.2, linspace(0, k.L, 12), linspace(0, k.L, 12), 1);
  std::ostringstream os1;
  g1.write_csv(os1);
  CHECK(os.str() == os1.str());
  CHECK_THROWS_AS(build_phase_grid(k.c, DeckTransform::axis_translation(0.0), 0.0, {0.0}, {1.0}),
                  RangeError);
}

TEST_CASE("critical points obey the angle law") {
  const Config k;
  const auto seeds = grid_seeds(k.L, 8);
  for (double eps : {0.0, 0.3, 0.6}) {
    const auto res = critical_points(*k.c, k.alpha, eps, seeds);
    REQUIRE(!res.points.empty());
    for (const auto& p : res.points) {
      CHECK(p.grad_norm <= 1e-8);
      CHECK(std::abs(p.cos_t + eps) <= 1e-6);
      CHECK(std::abs(p.cos_s - eps) <= 1e-6);
    }
    if (eps == 0.0) {
      // Perpendicular incidence at the mirror-symmetric axis crossings.
      bool top = false;
      for (const auto& p : res.points)
        top |= std::abs(p.t - k.L / 4) < 1e-6 && std::abs(p.s - k.L / 4) < 1e-6;
      CHECK(top);
    }
  }
  // A line against its own translate never becomes stationary.
  const auto T = SurfaceSpec::flat_torus(2 * pi, 2 * pi);
  const auto line = torus_line(T, {0, 0}, 1, 0);
  const auto along = DeckTransform::translation(1, 0);
  CHECK(critical_points(line, along, 0.3, grid_seeds(2 * pi, 6)).points.empty());
  double gmin = 1e300;
  for (double t : linspace(0, 2 * pi, 40))
    for (double s : linspace(0, 2 * pi, 40)) {
      if (std::abs(t - s - 2 * pi) < 0.2) continue;
      const auto g = phase_gradient(line, along, 0.3, t, s);
      gmin = std::min(gmin, std::hypot(g.dt, g.ds));
    }
  CHECK(gmin >= 0.7 * std::sqrt(2.0) - 1e-12);
}

TEST_CASE("direction cones") {
  const auto a = cone_classify({0, 1}, 0.1);
  CHECK(a.w_plus == 1.0);
  CHECK(a.w_zero == 0.0);
  const auto b = cone_classify({1, 0}, 0.1);
  CHECK(b.w_zero == 1.0);
  CHECK(b.w_plus == 0.0);
  CHECK(b.w_minus == 0.0);
  for (double th = 0; th < 2 * pi; th += 0.01) {
    const Vec2 xi{std::cos(th), std::sin(th)};
    const auto w = cone_classify(xi, 0.3);
    CHECK(std::abs(w.w_plus + w.w_zero + w.w_minus - 1) < 1e-12);
    CHECK(w.w_plus == cone_classify(-xi, 0.3).w_minus);
    CHECK(w.w_plus >= 0);
    CHECK(w.w_zero >= 0);
    if (xi.y >= 0.15) CHECK(w.w_plus == 1.0);
    if (xi.y <= 0.075) CHECK(w.w_plus == 0.0);
  }
  CHECK(smoothstep7(0.5) == doctest::Approx(0.5));
  CHECK_THROWS_AS(cone_classify({1, 1}, 0.1), RangeError);
  CHECK_THROWS_AS(cone_classify({1, 0}, 1.0), RangeError);
}

TEST_CASE("pure derivative bound") {
  const Config k;
  const double margin = admissible_eps(*k.c, 8, 11).margin_at(0.0);
  const double eps0 = margin / 2, delta = 0.5;
  const double top = k.L / 4;
  const auto rep = pure_derivative_check(*k.c, k.alpha, 0.0, top - 0.05, top + 0.05, eps0, delta, 17);
  CHECK(rep.hypothesis_met);
  CHECK(rep.antecedent);
  CHECK(rep.implication_holds);
  CHECK(rep.min_abs_dss >= rep.bound - 1e-4);

  const auto vac = pure_derivative_check(*k.c, k.alpha, 0.0, 0.0, 0.1, eps0, delta, 9);
  CHECK(vac.hypothesis_met);
  CHECK(!vac.antecedent);
  CHECK(vac.implication_holds);
  CHECK(vac.min_abs_ds > 0);

  const auto bad = pure_derivative_check(*k.c, k.alpha, 0.0, top - 0.05, top + 0.05, 5.0, delta, 5);
  CHECK(!bad.hypothesis_met);
  CHECK(!bad.implication_holds);

  const auto far = pure_derivative_check(*k.c, DeckTransform::axis_translation(60.0), 0.0, top - 0.05,
                                         top + 0.05, 0.3, 0.9, 9);
  CHECK(far.large_r_applicable);
  CHECK(far.large_r_holds);
}

TEST_CASE("comparison triangles in nonpositive curvature") {
  const auto H = SurfaceSpec::hyperbolic(1.0);
  const auto C = SurfaceSpec::conformal(std::make_shared<BumpedHalfPlaneField>(),
                                        Rect{-1e25, 1e25, 1e-25, 1e25});
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> X(-1, 1), Y(0.5, 2);
  for (const auto* S : {&H, &C}) {
    for (int i = 0; i < (S == &H ? 50 : 8); ++i) {
      const SurfacePoint o{X(rng), Y(rng)}, p{X(rng), Y(rng)}, q{X(rng), Y(rng)};
      const auto tri = comparison_triangle(*S, o, p, q);
      CHECK(tri.actual >= tri.flat - 1e-9);
    }
  }
  const auto T = SurfaceSpec::flat_torus(1, 1);
  const auto tri = comparison_triangle(T, {0, 0}, {3, 1}, {-1, 2});
  CHECK(tri.actual == doctest::Approx(tri.flat).epsilon(1e-12));
}
