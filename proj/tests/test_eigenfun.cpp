#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "geoperiods/eigenfun.hpp"
#include "geoperiods/errors.hpp"

using namespace geoperiods;
using std::numbers::pi;
using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

TEST_CASE("evaluation examples") {
  const double L = 3.0;
  const auto T = SurfaceSpec::flat_torus(L, L);
  const auto w = EigenfunctionSpec::torus_wave(T, 3, 4);
  CHECK(std::abs(w.evaluate({0, 0}) - std::complex<double>(1, 0)) < 1e-15);
  CHECK(w.frequency() == doctest::Approx(5 * 2 * pi / L));

  const auto S = SurfaceSpec::round_sphere(1.0);
  for (int n : {0, 1, 7, 64}) {
    const auto z = EigenfunctionSpec::sphere_zonal(S, n);
    CHECK(z.evaluate({0, 0}).real() == doctest::Approx(std::sqrt((2.0 * n + 1) / (4 * pi))));
    CHECK(z.frequency() == doctest::Approx(std::sqrt(n * (n + 1.0))));
  }
  CHECK_THROWS_AS(EigenfunctionSpec::sphere_zonal(S, 5000), RangeError);

  const auto H = SurfaceSpec::hyperbolic(1.0);
  const auto h = EigenfunctionSpec::hyperbolic_wave_sum(H, {{std::nullopt, 1.0}}, 10.0);
  CHECK(std::abs(h.evaluate({0, 1}) - 1.0) < 1e-15);
  CHECK(h.eigenvalue() == doctest::Approx(0.25 + 100));
  CHECK_THROWS_AS(EigenfunctionSpec::torus_wave(H, 1, 1), TypeMismatchError);
  CHECK_THROWS_AS(EigenfunctionSpec::hyperbolic_wave_sum(H, {}, 1.0), RangeError);
}

TEST_CASE("Legendre recurrence against boost") {
  for (int n : {0, 1, 2, 5, 20, 101, 400})
    for (double x : {-0.93, -0.2, 0.0, 0.41, 0.999})
      CHECK(legendre_p(n, x) == doctest::Approx(boost::math::legendre_p(n, x)).epsilon(1e-11));
}

TEST_CASE("sphere normalizations by quadrature") {
  const auto S = SurfaceSpec::round_sphere(1.0);
  for (int n : {1, 3, 10, 40}) {
    const double Nn = highest_weight_norm(n);
    const double I = GK::integrate([n](double t) { return std::pow(std::sin(t), 2 * n + 1); }, 0.0,
                                   pi, 15, 1e-14);
    CHECK(Nn * Nn * 2 * pi * I == doctest::Approx(1.0).epsilon(1e-12));
    const auto z = EigenfunctionSpec::sphere_zonal(S, n);
    const double Z = GK::integrate(
        [&](double t) {
          const double v = z.evaluate({t, 0}).real();
          return v * v * std::sin(t);
        },
        0.0, pi, 15, 1e-14);
    CHECK(2 * pi * Z == doctest::Approx(1.0).epsilon(1e-10));
  }
  // |e| constant on the equator.
  const auto hw = EigenfunctionSpec::sphere_highest_weight(S, 200);
  const double N200 = highest_weight_norm(200);
  for (double phi : {0.0, 0.7, 2.0, 5.5})
    CHECK(std::abs(std::abs(hw.evaluate({pi / 2, phi})) - N200) < 1e-12 * N200);
}

TEST_CASE("Laplacian residuals") {
  const auto T = SurfaceSpec::flat_torus(2 * pi, 2 * pi);
  const auto w = EigenfunctionSpec::torus_wave(T, 2, -3);
  // Five-point truncation error h²/12 (k1⁴ + k2⁴) |e|.
  const double trunc = 1e-6 / 12 * (16 + 81);
  CHECK(laplacian_residual(w, {0.3, 1.1}, 1e-3) == doctest::Approx(trunc).epsilon(0.01));
  CHECK(laplacian_residual(EigenfunctionSpec::torus_wave(T, 0, 0), {1, 2}, 1e-3) < 1e-12);

  const auto H = SurfaceSpec::hyperbolic(1.0);
  const auto h = EigenfunctionSpec::hyperbolic_wave_sum(H, {{std::nullopt, 1.0}}, 5.0);
  const SurfacePoint p{0, 2};
  CHECK(laplacian_residual(h, p, 1e-3) <= 1e-3 * h.eigenvalue() * std::abs(h.evaluate(p)));

  // h-refinement quotient ≈ 4 for every family.
  const auto S = SurfaceSpec::round_sphere(1.0);
  const std::vector<EigenfunctionSpec> fams = {
      w,
      EigenfunctionSpec::sphere_zonal(S, 6),
      EigenfunctionSpec::sphere_highest_weight(S, 5),
      EigenfunctionSpec::random_wave_sum(H, 3.0, 6, 42),
  };
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(0.3, 2.5);
  for (const auto& e : fams) {
    for (int i = 0; i < 25; ++i) {
      const SurfacePoint q{U(rng), U(rng)};
      const double r1 = laplacian_residual(e, q, 4e-3);
      const double r2 = laplacian_residual(e, q, 2e-3);
      const double scale = e.eigenvalue() * std::abs(e.evaluate(q));
      if (r1 < 1e-7 * scale) continue;  // accidental cancellation
      CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.05));
    }
  }
}

TEST_CASE("wave sums are linear") {
  const auto H = SurfaceSpec::hyperbolic(1.0);
  const WaveTerm a{0.5, {0.3, -1.2}}, b{std::nullopt, {2.0, 0.1}};
  const auto e1 = EigenfunctionSpec::hyperbolic_wave_sum(H, {a}, 7.0);
  const auto e2 = EigenfunctionSpec::hyperbolic_wave_sum(H, {b}, 7.0);
  const auto e12 = EigenfunctionSpec::hyperbolic_wave_sum(H, {a, b}, 7.0);
  for (SurfacePoint p : {SurfacePoint{0.1, 0.5}, SurfacePoint{-2, 3}}) {
    const auto sum = e1.evaluate(p) + e2.evaluate(p);
    CHECK(std::abs(e12.evaluate(p) - sum) < 1e-12 * (1 + std::abs(sum)));
  }
  // Seeded construction is reproducible.
  const auto r1 = EigenfunctionSpec::random_wave_sum(H, 4.0, 16, 99);
  const auto r2 = EigenfunctionSpec::random_wave_sum(H, 4.0, 16, 99);
  CHECK(r1.evaluate({0.2, 1.1}) == r2.evaluate({0.2, 1.1}));
}
