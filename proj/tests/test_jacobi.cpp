#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "doctest.h"
#include "geoperiods/errors.hpp"
#include "geoperiods/jacobi.hpp"

using namespace geoperiods;
using std::numbers::pi;

namespace {

SurfaceSpec bumped() {
  return SurfaceSpec::conformal(std::make_shared<BumpedHalfPlaneField>(),
                                Rect{-1e25, 1e25, 1e-25, 1e25});
}
SurfaceSpec half_plane_conformal() {
  return SurfaceSpec::conformal(std::make_shared<HalfPlaneField>(1.0),
                                Rect{-1e25, 1e25, 1e-25, 1e25});
}

}  // namespace

TEST_CASE("jacobi_solve examples") {
  const auto T = SurfaceSpec::flat_torus(1, 1);
  const auto H = SurfaceSpec::hyperbolic(1.0);
  const SurfacePoint p{0.0, 1.0};
  const GeodesicRay flat{T, p, {p, {1, 0}}};
  for (double r : {-3.0, 0.5, 7.0}) CHECK(jacobi_solve(flat, 1.0, 0.0, r).j == 1.0);
  const GeodesicRay hyp{H, p, {p, {0, 1}}};
  CHECK(jacobi_solve(hyp, 0.0, 1.0, 1.0).j == doctest::Approx(1.175201193643801).epsilon(1e-14));
  CHECK(jacobi_solve(hyp, 0.0, 0.0, 5.0).j == 0.0);

  // The conformal path against the closed form.
  const auto C = half_plane_conformal();
  const GeodesicRay conf{C, p, unit_at_angle(C, p, 0.4)};
  const auto jc = jacobi_solve(conf, 0.3, -0.7, 3.0);
  const double j_exact = 0.3 * std::cosh(3.0) - 0.7 * std::sinh(3.0);
  CHECK(jc.j == doctest::Approx(j_exact).epsilon(1e-9));
  CHECK(conf.curvature_at(2.0) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("limiting circle curvature: constant curvature") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ang(-pi, pi), xx(-3, 3), yy(0.1, 5);
  const auto T = SurfaceSpec::flat_torus(2 * pi, 2 * pi);
  for (double a : {1.0, 2.0}) {
    const auto H = SurfaceSpec::hyperbolic(a);
    for (int i = 0; i < 8; ++i) {
      const SurfacePoint p{xx(rng), yy(rng)};
      CHECK(std::abs(limiting_circle_curvature(H, p, unit_at_angle(H, p, ang(rng))) - a) < 1e-8);
    }
  }
  RiccatiTrace tr;
  CHECK(limiting_circle_curvature(T, {1, 2}, TangentVec{{1, 2}, {0, 1}}, 1e-8, &tr) == 0.0);
  CHECK(tr.converged);
  CHECK_THROWS_AS(limiting_circle_curvature(SurfaceSpec::round_sphere(1), {1, 1},
                                            unit_at_angle(SurfaceSpec::round_sphere(1), {1, 1}, 0)),
                  UnsupportedSurfaceError);
}

TEST_CASE("limiting circle curvature: conformal metrics") {
  const auto C = half_plane_conformal();
  const auto B = bumped();
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> ang(-pi, pi), xx(-1, 1), yy(0.5, 2);
  for (int i = 0; i < 6; ++i) {
    const SurfacePoint p{xx(rng), yy(rng)};
    RiccatiTrace tr;
    const double k = limiting_circle_curvature(C, p, unit_at_angle(C, p, ang(rng)), 1e-8, &tr);
    CHECK(std::abs(k - 1.0) < 1e-7);
    CHECK(tr.converged);
    CHECK(tr.grid.front() == doctest::Approx(-tr.horizon));
  }
  // The bump keeps −K within [e^{−2β}·…]; 𝐤 stays in [0, sup √(−K)].
  double sup = 0.0;
  for (int i = 0; i < 200; ++i)
    for (int j = 0; j < 200; ++j) {
      const double x = -2 + 4.0 * i / 199, y = 0.05 + 3.0 * j / 199;
      sup = std::max(sup, std::sqrt(-gaussian_curvature(B, {x, y})));
    }
  for (int i = 0; i < 6; ++i) {
    const SurfacePoint p{xx(rng), yy(rng)};
    const double k = limiting_circle_curvature(B, p, unit_at_angle(B, p, ang(rng)));
    CHECK(k >= 0.0);
    CHECK(k <= sup + 1e-9);
  }
}

TEST_CASE("Riccati and Jacobi agree") {
  const auto B = bumped();
  const SurfacePoint p{0.1, 0.9};
  const TangentVec v = unit_at_angle(B, p, 0.3);
  const double k = limiting_circle_curvature(B, p, v, 1e-9);
  const double R = 12.0;
  const TangentVec back{p, -v.v};
  const auto [far, w] = geodesic_flow(B, p, back, R);
  const GeodesicRay ray{B, far, TangentVec{far, -w.v}};
  const auto jv = jacobi_solve(ray, 1.0, 0.0, R);
  CHECK(std::abs(jv.dj / jv.j - k) < 1e-7);
}

TEST_CASE("circle curvature") {
  const auto T = SurfaceSpec::flat_torus(2 * pi, 2 * pi);
  const auto H = SurfaceSpec::hyperbolic(1.0);
  const SurfacePoint p{0, 1};
  CHECK(circle_curvature(T, p, {p, {1, 0}}, 2.0) == doctest::Approx(0.5));
  CHECK(circle_curvature(H, p, {p, {1, 0}}, 1.0) ==
        doctest::Approx(1.313035285499331).epsilon(1e-14));
  CHECK(std::abs(circle_curvature(H, p, {p, {1, 0}}, 20.0) - 1.0) < 1e-15);
  CHECK_THROWS_AS(circle_curvature(H, p, {p, {1, 0}}, 0.0), RangeError);

  const auto C = half_plane_conformal();
  const auto B = bumped();
  for (double r : {0.1, 1.0, 3.0, 7.0}) {
    const TangentVec v = unit_at_angle(C, p, 1.1);
    CHECK(std::abs(circle_curvature(C, p, v, r) - 1.0 / std::tanh(r)) < 1e-9);
  }
  const auto H2 = SurfaceSpec::hyperbolic(2.0);
  for (double r : {0.3, 1.0, 4.0})
    CHECK(std::abs(circle_curvature(H2, p, {p, {0, 2}}, r) - 2.0 / std::tanh(2.0 * r)) < 1e-9);
  // Nonincreasing in r on constant curvature; on the bumped metric while
  // κ_S² ≥ sup(−K), where u' = −u² − K ≤ 0 is forced.
  double prev = std::numeric_limits<double>::infinity();
  for (double r = 0.25; r <= 12.0; r += 0.25) {
    const double k = circle_curvature(H, p, {p, {1, 0}}, r);
    CHECK(k <= prev + 1e-15);
    prev = k;
  }
  double supK = 0.0;
  for (int i = 0; i < 100; ++i)
    for (int j = 0; j < 100; ++j)
      supK = std::max(supK, -gaussian_curvature(B, {-3 + 6.0 * i / 99, 0.05 + 5.0 * j / 99}));
  const TangentVec v = unit_at_angle(B, {0.2, 1.3}, -0.8);
  prev = std::numeric_limits<double>::infinity();
  int checked = 0;
  for (double r = 0.05; r <= 12.0; r += 0.05) {
    const double k = circle_curvature(B, v.base, v, r);
    if (prev * prev >= supK) {
      CHECK(k <= prev + 1e-12);
      ++checked;
    }
    prev = k;
  }
  CHECK(checked > 10);
}

TEST_CASE("circle curvature sandwich") {
  const auto H = SurfaceSpec::hyperbolic(1.0);
  const auto B = bumped();
  for (const auto* S : {&H, &B}) {
    const SurfacePoint p{0.3, 1.2};
    for (double angle : {0.0, 1.0, 2.5, -2.0}) {
      const TangentVec v = unit_at_angle(*S, p, angle);
      for (double r : {1.0, 2.0, 5.0, 10.0, 20.0}) {
        const auto [q, w] = geodesic_flow(*S, p, v, r);
        const double kS = circle_curvature(*S, p, v, r);
        const double k = limiting_circle_curvature(*S, q, w);
        const double diff = kS - k;
        CHECK(diff > -1e-10);
        CHECK(diff < 1.0 / r - 1e-10);
      }
    }
  }
}
