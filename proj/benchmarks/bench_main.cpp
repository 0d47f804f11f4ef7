#include <benchmark/benchmark.h>

#include <memory>
#include <numbers>

#include "geoperiods/admissibility.hpp"
#include "geoperiods/jacobi.hpp"
#include "geoperiods/periods.hpp"
#include "geoperiods/phase.hpp"

using namespace geoperiods;
using std::numbers::pi;

namespace {

SurfaceSpec half_plane() {
  return SurfaceSpec::conformal(std::make_shared<HalfPlaneField>(1.0), Rect{-1e25, 1e25, 1e-25, 1e25});
}

void BM_LimitingCurvatureConformal(benchmark::State& st) {
  const auto S = half_plane();
  const SurfacePoint p{0.2, 1.3};
  const TangentVec v = unit_at_angle(S, p, 0.7);
  for (auto _ : st) benchmark::DoNotOptimize(limiting_circle_curvature(S, p, v));
}
BENCHMARK(BM_LimitingCurvatureConformal);

void BM_CircleCurvatureConformal(benchmark::State& st) {
  const auto S = half_plane();
  const SurfacePoint p{0.2, 1.3};
  const TangentVec v = unit_at_angle(S, p, 0.7);
  for (auto _ : st) benchmark::DoNotOptimize(circle_curvature(S, p, v, double(st.range(0))));
}
BENCHMARK(BM_CircleCurvatureConformal)->Arg(1)->Arg(5)->Arg(20);

void BM_GeneralizedPeriodTorus(benchmark::State& st) {
  const auto T = SurfaceSpec::flat_torus(2 * pi, 2 * pi);
  const Curve c = geodesic_circle(T, {1.0, 2.0}, 1.0);
  const auto e = EigenfunctionSpec::torus_wave(T, st.range(0), 0);
  for (auto _ : st) benchmark::DoNotOptimize(generalized_period_m(e, c, 0));
}
BENCHMARK(BM_GeneralizedPeriodTorus)->RangeMultiplier(4)->Range(50, 800);

void BM_PeriodSpectrumSphere(benchmark::State& st) {
  const auto S = SurfaceSpec::round_sphere(1.0);
  const Curve eq = geodesic_circle(S, {0.0, 0.0}, pi / 2);
  const auto e = EigenfunctionSpec::sphere_zonal(S, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(period_spectrum(e, eq, 32));
}
BENCHMARK(BM_PeriodSpectrumSphere)->Arg(100)->Arg(400);

void BM_WaveSumPeriod(benchmark::State& st) {
  const auto H = SurfaceSpec::hyperbolic(1.0);
  const Curve c = geodesic_circle(H, {0.0, 1.0}, 1.0);
  const auto e = EigenfunctionSpec::random_wave_sum(H, double(st.range(0)), 16, 7);
  for (auto _ : st) benchmark::DoNotOptimize(generalized_period_m(e, c, 0));
}
BENCHMARK(BM_WaveSumPeriod)->Arg(40)->Arg(320);

void BM_PhaseHessian(benchmark::State& st) {
  const auto H = SurfaceSpec::hyperbolic(1.0);
  const Curve c = geodesic_circle(H, {0.0, 1.0}, 1.0);
  const auto alpha = DeckTransform::axis_translation(6.0);
  for (auto _ : st) benchmark::DoNotOptimize(phase_hessian(c, alpha, 0.3, 1.1, 2.4));
}
BENCHMARK(BM_PhaseHessian);

void BM_AdmissibilityConformalCircle(benchmark::State& st) {
  const auto S = half_plane();
  const Curve c = geodesic_circle(S, {0.0, 1.0}, 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(admissible_eps(c, 32, 201, 1e-8, 1));
}
BENCHMARK(BM_AdmissibilityConformalCircle)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
