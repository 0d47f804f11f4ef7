#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numbers>
#include <random>

#include "doctest.h"
#include "geoperiods/curve.hpp"
#include "geoperiods/errors.hpp"
#include "geoperiods/jacobi.hpp"

using namespace geoperiods;
using std::numbers::pi;

namespace {

SurfaceSpec half_plane_conformal() {
  return SurfaceSpec::conformal(std::make_shared<HalfPlaneField>(1.0),
                                Rect{-1e25, 1e25, 1e-25, 1e25});
}

}  // namespace

TEST_CASE("flat circles and orientation") {
  const auto T = SurfaceSpec::flat_torus(2 * pi, 2 * pi);
  const auto c = geodesic_circle(T, {1, 1}, 0.5);
  const auto cw = geodesic_circle(T, {1, 1}, 0.5, Orientation::Clockwise);
  CHECK(c.length() == doctest::Approx(pi));
  for (double s : {0.0, 0.4, 2.9}) {
    CHECK(c.geodesic_curvature(s) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(c.signed_normal_curvature(s) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(cw.signed_normal_curvature(s) == doctest::Approx(-2.0).epsilon(1e-12));
  }
  CHECK(geodesic_circle(T, {0, 0}, 1.0).length() == doctest::Approx(2 * pi));
  const auto rev = c.reversed();
  CHECK(rev.signed_normal_curvature(1.0) == doctest::Approx(-2.0).epsilon(1e-10));
}

TEST_CASE("geodesics have zero curvature") {
  const auto H = SurfaceSpec::hyperbolic(1.0);
  const auto g = vertical_geodesic(H, 3.0);
  for (double s : {0.0, 1.0, 2.5, -1.0, 4.0}) CHECK(std::abs(g.geodesic_curvature(s)) < 1e-7);
  const auto T = SurfaceSpec::flat_torus(2 * pi, 3.0);
  const auto line = torus_line(T, {0.2, 0.1}, 1, 1);
  CHECK(line.length() == doctest::Approx(std::hypot(2 * pi, 3.0)));
  CHECK(std::abs(line.signed_normal_curvature(1.3)) < 1e-12);
  // Continuation through the closing transform.
  const auto j = g.jet(g.length() + 0.5);
  const auto j0 = g.jet(0.5);
  CHECK(j.x.x2 == doctest::Approx(j0.x.x2 * std::exp(3.0)));
}

TEST_CASE("hyperbolic geodesic circles") {
  const auto H = SurfaceSpec::hyperbolic(1.0);
  const auto c = geodesic_circle(H, {0.3, 1.5}, 1.0);
  CHECK(c.length() == doctest::Approx(2 * pi * std::sinh(1.0)).epsilon(1e-12));
  const double coth1 = 1.0 / std::tanh(1.0);
  for (const auto& smp : c.cache()) {
    CHECK(std::abs(smp.h - coth1) < 1e-8);
    CHECK(std::abs(distance(H, smp.jet.x, {0.3, 1.5}) - 1.0) < 1e-12);
  }
  // The start point is reached from the center in frame direction 0.
  const auto [q, w] = geodesic_flow(H, {0.3, 1.5}, unit_at_angle(H, {0.3, 1.5}, 0.0), 1.0);
  CHECK(distance(H, q, c.point(0.0)) < 1e-12);
  const auto H2 = SurfaceSpec::hyperbolic(2.0);
  const auto c2 = geodesic_circle(H2, {0, 1}, 0.7);
  CHECK(c2.length() == doctest::Approx(pi * std::sinh(1.4)).epsilon(1e-12));
  CHECK(c2.signed_normal_curvature(0.3) == doctest::Approx(2.0 / std::tanh(1.4)).epsilon(1e-10));
}

TEST_CASE("conformal geodesic circles agree with the Jacobi curvature") {
  const auto C = half_plane_conformal();
  const SurfacePoint ctr{0.1, 1.0};
  const auto c = geodesic_circle(C, ctr, 1.0, Orientation::CounterClockwise, 512);
  CHECK(std::abs(c.length() - 2 * pi * std::sinh(1.0)) < 1e-6);
  const double kS = circle_curvature(C, ctr, unit_at_angle(C, ctr, 0.0), 1.0);
  for (int i = 0; i < 16; ++i) {
    const double s = c.length() * i / 16.0;
    CHECK(std::abs(c.geodesic_curvature(s) - kS) < 1e-6);
    CHECK(std::abs(c.signed_normal_curvature(s) - 1.0 / std::tanh(1.0)) < 1e-6);
  }
  const auto B = SurfaceSpec::conformal(std::make_shared<BumpedHalfPlaneField>(),
                                        Rect{-1e25, 1e25, 1e-25, 1e25});
  const auto cb = geodesic_circle(B, {0.0, 1.2}, 0.8, Orientation::Clockwise, 256);
  for (int i = 0; i < 16; ++i) {
    const double s = cb.length() * i / 16.0;
    // The arrival direction at γ(s) from the centre is the outward normal.
    const auto seg = geodesic_between(B, {0.0, 1.2}, cb.point(s));
    const double kS_s = circle_curvature(B, {0.0, 1.2}, seg.start, 0.8);
    CHECK(std::abs(cb.signed_normal_curvature(s) + kS_s) < 1e-6);
  }
}

TEST_CASE("sphere circles") {
  const auto S = SurfaceSpec::round_sphere(1.0);
  const auto eq = geodesic_circle(S, {0.0, 0.0}, pi / 2);
  CHECK(eq.length() == doctest::Approx(2 * pi));
  CHECK(std::abs(eq.geodesic_curvature(1.0)) < 1e-12);
  const auto small = geodesic_circle(S, {0.0, 0.0}, 0.5);
  CHECK(small.signed_normal_curvature(0.2) == doctest::Approx(1.0 / std::tan(0.5)));
  const auto off = geodesic_circle(S, {1.4, 0.5}, 0.6, Orientation::CounterClockwise, 256);
  CHECK(std::abs(off.length() - 2 * pi * std::sin(0.6)) < 1e-9);
  CHECK(std::abs(off.signed_normal_curvature(0.7) - 1.0 / std::tan(0.6)) < 1e-8);
}

TEST_CASE("curve invariants") {
  const auto H = SurfaceSpec::hyperbolic(1.0);
  const auto c = perturbed_circle(H, {0.0, 2.0}, 0.5, 0.2, 3);
  for (const auto& smp : c.cache()) {
    CHECK(std::abs(std::abs(smp.h) - c.geodesic_curvature(smp.s)) < 1e-8);
    CHECK(std::abs(metric_norm(H, smp.jet.x, smp.jet.d1) - 1.0) < 1e-6);
  }
  const double shift = 0.37;
  const auto cs = c.shifted(shift);
  for (double s : {0.0, 0.5, 1.1, 2.0})
    CHECK(std::abs(cs.signed_normal_curvature(s) - c.signed_normal_curvature(s + shift)) < 1e-9);

  // Length oracle: the hyperbolic length of the chart curve by adaptive Gauss–Kronrod.
  auto speed = [](double u) {
    const double rho = 0.5 * (1 + 0.2 * std::cos(3 * u));
    const double d1 = -0.5 * 0.2 * 3 * std::sin(3 * u);
    const double y = 2.0 + rho * std::sin(u);
    return std::hypot(d1 * std::cos(u) - rho * std::sin(u), d1 * std::sin(u) + rho * std::cos(u)) / y;
  };
  const double L = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(speed, 0.0, 2 * pi,
                                                                                 15, 1e-14);
  CHECK(c.length() == doctest::Approx(L).epsilon(1e-12));
}

TEST_CASE("point-list ingestion") {
  const auto T = SurfaceSpec::flat_torus(10, 10);
  const double a = 2.0, b = 1.0;
  const int n = 400;
  const auto path = std::filesystem::temp_directory_path() / "geoperiods_ellipse.csv";
  {
    std::ofstream out(path);
    out << "t,x1,x2\n";
    out.precision(17);
    for (int i = 0; i <= n; ++i) {
      const double t = 2 * pi * i / n;
      out << t << "," << 5 + a * std::cos(t) << "," << 5 + b * std::sin(i == n ? 0.0 : t) << "\n";
    }
  }
  const auto c = Curve::from_csv(T, path.string());
  std::filesystem::remove(path);
  // Ellipse perimeter and curvature at the ends of the major axis.
  const double perim = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double t) { return std::hypot(a * std::sin(t), b * std::cos(t)); }, 0.0, 2 * pi, 15,
      1e-14);
  CHECK(c.length() == doctest::Approx(perim).epsilon(1e-7));
  CHECK(c.signed_normal_curvature(0.0) == doctest::Approx(a / (b * b)).epsilon(1e-4));

  const auto bad = std::filesystem::temp_directory_path() / "geoperiods_bad.csv";
  {
    std::ofstream out(bad);
    out << "t,x,y\n0,1,1\n";
  }
  CHECK_THROWS_AS(Curve::from_csv(T, bad.string()), FormatError);
  std::filesystem::remove(bad);
}

TEST_CASE("Fermi coordinates") {
  const auto T = SurfaceSpec::flat_torus(2 * pi, 2 * pi);
  auto line = std::make_shared<Curve>(torus_line(T, {0, 0}, 1, 0));
  const FermiChart flat(line);
  const Vec2 x = flat.coordinates({0.3, 0.2});
  CHECK(x.x == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(x.y == doctest::Approx(0.2).epsilon(1e-12));
  CHECK_THROWS_AS(flat.coordinates({0.3, 0.9}), DomainError);

  const auto H = SurfaceSpec::hyperbolic(1.0);
  auto circ = std::make_shared<Curve>(geodesic_circle(H, {0, 1}, 1.0));
  const FermiChart chart(circ);
  for (double t0 : {0.0, 1.3, 4.0, 7.0}) {
    const Vec2 on = chart.coordinates(circ->point(t0));
    CHECK(on.x == doctest::Approx(t0).epsilon(1e-10));
    CHECK(std::abs(on.y) < 1e-10);
    const SurfacePoint p = geodesic_flow(H, circ->point(t0), circ->normal(t0), 0.1).first;
    const Vec2 f = chart.coordinates(p);
    CHECK(std::abs(f.x - t0) < 1e-7);
    CHECK(std::abs(f.y - 0.1) < 1e-7);
    const Mat2 g = chart.metric(t0, 0.0);
    CHECK(std::abs(g.a11 - 1) < 1e-7);
    CHECK(std::abs(g.a12) < 1e-7);
    CHECK(std::abs(g.a22 - 1) < 1e-7);
  }
  // Round trip and the Jacobi-based differential against finite differences.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> X1(0, circ->length()), X2(-0.45, 0.45);
  for (int i = 0; i < 20; ++i) {
    const double a = X1(rng), b = X2(rng);
    const SurfacePoint p = chart.map(a, b);
    const SurfacePoint back = chart.map(chart.coordinates(p).x, chart.coordinates(p).y);
    CHECK(distance(H, p, back) < 1e-8);
    const auto [d1, d2] = chart.differential(a, b);
    const double h = 1e-5;
    const Vec2 fd1 = (chart.map(a + h, b).vec() - chart.map(a - h, b).vec()) / (2 * h);
    CHECK(norm(fd1 - d1) < 1e-7 * (1 + norm(d1)));
    const Vec2 fd2 = (chart.map(a, b + h).vec() - chart.map(a, b - h).vec()) / (2 * h);
    CHECK(norm(fd2 - d2) < 1e-7 * (1 + norm(d2)));
  }
}
