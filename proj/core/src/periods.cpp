#include "geoperiods/periods.hpp"

#include <fftw3.h>

#include <chrono>
#include <cmath>
#include <mutex>
#include <numbers>

#include "geoperiods/errors.hpp"

namespace geoperiods {

using cplx = std::complex<double>;
using std::numbers::pi;

namespace {

void require_same_surface(const EigenfunctionSpec& e, const Curve& c) {
  if (e.surface().kind() != c.surface().kind() || e.surface().describe() != c.surface().describe())
    throw TypeMismatchError("eigenfunction and curve live on different surfaces");
}

// Σ f_j e^{−2πi m j / stride·N'} over every `stride`-th sample, exact phases.
cplx trapezoid(const std::vector<cplx>& f, long m, std::size_t stride) {
  const std::size_t N = f.size();
  const std::size_t n = N / stride;
  const long long mm = ((static_cast<long long>(m) % static_cast<long long>(n)) + static_cast<long long>(n)) %
                       static_cast<long long>(n);
  cplx acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto r = static_cast<double>((static_cast<unsigned long long>(mm) * j) % n);
    acc += f[j * stride] * std::polar(1.0, -2.0 * pi * r / static_cast<double>(n));
  }
  return acc;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

double PeriodSpectrum::nu(long m) const { return 2 * pi * static_cast<double>(m) / L; }

std::size_t auto_samples(double lambda, double nu, double L) {
  const double need = std::max(256.0, 16.0 * (lambda + std::abs(nu)) * L / (2 * pi));
  std::size_t N = 256;
  while (static_cast<double>(N) < need) N *= 2;
  return N;
}

long frequency_index(double nu, double L) {
  const double m = nu * L / (2 * pi);
  const double r = std::round(m);
  if (std::abs(m - r) > 1e-9 * std::max(1.0, std::abs(r)))
    throw FrequencyGridError("frequency nu is not an integer multiple of 2π/L");
  return static_cast<long>(r);
}

std::vector<cplx> sample_on_curve(const EigenfunctionSpec& e, const Curve& c, std::size_t N) {
  std::vector<cplx> f(N);
  const double L = c.length();
  for (std::size_t j = 0; j < N; ++j)
    f[j] = e.evaluate(c.point(L * static_cast<double>(j) / static_cast<double>(N)));
  return f;
}

PeriodResult generalized_period_m(const EigenfunctionSpec& e, const Curve& c, long m,
                                  std::size_t N) {
  require_same_surface(e, c);
  const auto t0 = std::chrono::steady_clock::now();
  const double L = c.length();
  const double nu = 2 * pi * static_cast<double>(m) / L;
  if (N == 0) N = auto_samples(e.frequency(), nu, L);
  if (N < 4 || N % 2 != 0) throw RangeError("generalized_period: N must be even and ≥ 4");
  const auto f = sample_on_curve(e, c, N);
  const cplx full = trapezoid(f, m, 1) * (L / static_cast<double>(N));
  const cplx half = trapezoid(f, m, 2) * (2.0 * L / static_cast<double>(N));
  PeriodResult r;
  r.nu = nu;
  r.m = m;
  r.lambda = e.frequency();
  r.coeff = full;
  r.N = N;
  r.err_est = std::abs(full - half);
  r.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

PeriodResult generalized_period(const EigenfunctionSpec& e, const Curve& c, double nu,
                                std::size_t N) {
  return generalized_period_m(e, c, frequency_index(nu, c.length()), N);
}

PeriodSpectrum period_spectrum(const EigenfunctionSpec& e, const Curve& c, long m_max,
                               std::size_t N) {
  require_same_surface(e, c);
  const double L = c.length();
  if (m_max < 0) throw RangeError("period_spectrum: m_max must be nonnegative");
  if (N == 0) N = auto_samples(e.frequency(), 2 * pi * static_cast<double>(m_max) / L, L);
  if (static_cast<std::size_t>(m_max) * 4 > N)
    throw RangeError("period_spectrum: m_max must not exceed N/4");
  auto f = sample_on_curve(e, c, N);
  std::vector<cplx> F(N);
  {
    fftw_plan plan;
    {
      std::lock_guard lock(fftw_planner_mutex());
      plan = fftw_plan_dft_1d(static_cast<int>(N), reinterpret_cast<fftw_complex*>(f.data()),
                              reinterpret_cast<fftw_complex*>(F.data()), FFTW_FORWARD,
                              FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  PeriodSpectrum s;
  s.lambda = e.frequency();
  s.L = L;
  s.N = N;
  s.m_max = m_max;
  s.coeff.resize(static_cast<std::size_t>(2 * m_max + 1));
  const double w = L / static_cast<double>(N);
  for (long m = -m_max; m <= m_max; ++m) {
    const std::size_t bin = static_cast<std::size_t>((m % static_cast<long>(N) + static_cast<long>(N)) %
                                                     static_cast<long>(N));
    s.coeff[static_cast<std::size_t>(m + m_max)] = w * F[bin];
  }
  return s;
}

}  // namespace geoperiods
