#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "geoperiods/errors.hpp"
#include "geoperiods/periods.hpp"

using namespace geoperiods;
using std::numbers::pi;
using cplx = std::complex<double>;
using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

namespace {

// Closed form for a unit-speed circle of radius r centred at c on the
// 2π-torus, k = (m1, m2): e^{i⟨k,c⟩} e^{−imθ_k} 2πr iᵐ J_m(|k| r).
cplx bessel_oracle(long m1, long m2, SurfacePoint c, double r, long m) {
  const double lam = std::hypot(double(m1), double(m2));
  const double th = std::atan2(double(m2), double(m1));
  const cplx im_pow = std::pow(cplx(0, 1), static_cast<int>(((m % 4) + 4) % 4));
  return std::polar(1.0, m1 * c.x1 + m2 * c.x2) * std::polar(1.0, -double(m) * th) * 2.0 * pi * r *
         im_pow * std::cyl_bessel_j(double(std::abs(m)), lam * r) *
         (m < 0 && (std::abs(m) % 2 == 1) ? -1.0 : 1.0);
}

}  // namespace

TEST_CASE("constant eigenfunction") {
  const auto T = SurfaceSpec::flat_torus(2 * pi, 2 * pi);
  const auto one = EigenfunctionSpec::torus_wave(T, 0, 0);
  const auto c = perturbed_circle(T, {3, 3}, 1.0, 0.1, 2);
  CHECK(std::abs(generalized_period_m(one, c, 0).coeff - c.length()) < 1e-12);
  for (long m : {1L, -3L, 17L}) CHECK(std::abs(generalized_period_m(one, c, m).coeff) < 1e-12);
  const auto sp = period_spectrum(one, c, 8);
  CHECK(std::abs(sp.at(0) - c.length()) < 1e-12);
  for (long m = 1; m <= 8; ++m) CHECK(std::abs(sp.at(m)) < 1e-12);
}

TEST_CASE("torus Bessel identity") {
  const auto T = SurfaceSpec::flat_torus(2 * pi, 2 * pi);
  const SurfacePoint ctr{1.0, 2.0};
  const double r = 1.3;
  const auto c = geodesic_circle(T, ctr, r);
  const long m1 = 12, m2 = -5;
  const auto e = EigenfunctionSpec::torus_wave(T, m1, m2);
  for (long m : {0L, 3L, -7L, 16L}) {
    const auto res = generalized_period_m(e, c, m);
    const cplx exact = bessel_oracle(m1, m2, ctr, r, m);
    CHECK(std::abs(res.coeff - exact) < 1e-11);
    // Adaptive Gauss–Kronrod on the defining integral.
    const double nu = double(m) / r;
    auto integrand = [&](double s, bool re) {
      const cplx v = e.evaluate(c.point(s)) * std::polar(1.0, -nu * s);
      return re ? v.real() : v.imag();
    };
    const double re = GK::integrate([&](double s) { return integrand(s, true); }, 0.0, c.length(), 20, 1e-13);
    const double im = GK::integrate([&](double s) { return integrand(s, false); }, 0.0, c.length(), 20, 1e-13);
    CHECK(std::abs(res.coeff - cplx(re, im)) < 1e-9);
    CHECK(res.err_est <= 1e-8 * (1 + std::abs(res.coeff)));
    CHECK(res.N == auto_samples(e.frequency(), nu, c.length()));
  }
  CHECK_THROWS_AS(generalized_period(e, c, 0.5), FrequencyGridError);
  const auto H = SurfaceSpec::hyperbolic(1.0);
  CHECK_THROWS_AS(generalized_period_m(EigenfunctionSpec::hyperbolic_wave_sum(H, {{}}, 2.0), c, 0),
                  TypeMismatchError);
}

TEST_CASE("sphere families over the equator") {
  const auto S = SurfaceSpec::round_sphere(1.0);
  const auto eq = geodesic_circle(S, {0, 0}, pi / 2);
  for (int n : {1, 8, 64}) {
    const auto hw = EigenfunctionSpec::sphere_highest_weight(S, n);
    CHECK(std::abs(generalized_period_m(hw, eq, n).coeff - 2 * pi * highest_weight_norm(n)) < 1e-12);
    for (long m : {0L, long(n) - 1, long(n) + 1, -long(n)})
      CHECK(std::abs(generalized_period_m(hw, eq, m).coeff) < 1e-12);
  }
  for (int n : {50, 52, 200}) {
    const auto z = EigenfunctionSpec::sphere_zonal(S, n);
    CHECK(std::abs(generalized_period_m(z, eq, 0).coeff) == doctest::Approx(2.0).epsilon(0.05));
  }
  for (int n : {51, 203})
    CHECK(std::abs(generalized_period_m(EigenfunctionSpec::sphere_zonal(S, n), eq, 0).coeff) < 1e-10);
}

TEST_CASE("FFT spectrum matches direct quadrature") {
  const auto T = SurfaceSpec::flat_torus(2 * pi, 2 * pi);
  const auto c = perturbed_circle(T, {3, 3}, 1.2, 0.15, 3);
  const auto e = EigenfunctionSpec::torus_wave(T, 9, 4);
  const std::size_t N = 1024;
  const auto sp = period_spectrum(e, c, 64, N);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<long> M(-64, 64);
  for (int i = 0; i < 5; ++i) {
    const long m = M(rng);
    CHECK(std::abs(sp.at(m) - generalized_period_m(e, c, m, N).coeff) < 1e-10);
  }
  CHECK_THROWS_AS(period_spectrum(e, c, 300, N), RangeError);
  // Real-valued eigenfunctions have conjugate-symmetric spectra.
  const auto cosw = EigenfunctionSpec::torus_wave(T, 9, 4, true);
  const auto sc = period_spectrum(cosw, c, 40, N);
  for (long m = 1; m <= 40; ++m) CHECK(std::abs(sc.at(-m) - std::conj(sc.at(m))) < 1e-10);
}

TEST_CASE("oversampling and shift covariance") {
  const auto S = SurfaceSpec::round_sphere(1.0);
  const auto T = SurfaceSpec::flat_torus(2 * pi, 2 * pi);
  const auto tc = geodesic_circle(T, {0.5, 0.5}, 2.0);
  const auto te = EigenfunctionSpec::torus_wave(T, 20, 7);
  const auto eq = geodesic_circle(S, {0, 0}, pi / 2);
  const auto se = EigenfunctionSpec::sphere_zonal(S, 120);
  for (long m : {0L, 5L, -11L}) {
    const auto a = generalized_period_m(te, tc, m);
    const auto b = generalized_period_m(te, tc, m, 2 * a.N);
    CHECK(std::abs(a.coeff - b.coeff) < 1e-9);
    const auto x = generalized_period_m(se, eq, m);
    const auto y = generalized_period_m(se, eq, m, 2 * x.N);
    CHECK(std::abs(x.coeff - y.coeff) < 1e-9);
  }
  const double shift = 0.77;
  const auto ts = tc.shifted(shift);
  for (long m : {1L, 4L, -9L}) {
    const auto a = generalized_period_m(te, tc, m);
    const auto b = generalized_period_m(te, ts, m);
    CHECK(std::abs(b.coeff - a.coeff * std::polar(1.0, a.nu * shift)) < 1e-10);
  }
}
