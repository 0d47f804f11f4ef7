#pragma once

// Generalized periods ∫_γ e(γ(s)) e^{−iνs} ds by the periodic trapezoid rule,
// and whole spectra by one FFT of the same samples.

#include <complex>
#include <cstddef>
#include <vector>

#include "geoperiods/curve.hpp"
#include "geoperiods/eigenfun.hpp"

namespace geoperiods {

struct PeriodResult {
  double nu = 0.0;
  long m = 0;  // ν = 2πm/L
  double lambda = 0.0;
  std::complex<double> coeff;
  std::size_t N = 0;
  double err_est = 0.0;  // |rule(N) − rule(N/2)|
  double runtime = 0.0;  // seconds
};

struct PeriodSpectrum {
  double lambda = 0.0;
  double L = 0.0;
  std::size_t N = 0;
  long m_max = 0;
  std::vector<std::complex<double>> coeff;  // index m + m_max

  std::complex<double> at(long m) const { return coeff.at(static_cast<std::size_t>(m + m_max)); }
  double nu(long m) const;
};

/// N = 2^⌈log₂ max(256, 16(λ + |ν|)L/2π)⌉.
std::size_t auto_samples(double lambda, double nu, double L);

/// Integer index m of ν on the grid 2π/L; FrequencyGridError if off-grid by more than 1e−9.
long frequency_index(double nu, double L);

/// N = 0 selects auto_samples. N must be even.
PeriodResult generalized_period(const EigenfunctionSpec& e, const Curve& c, double nu,
                                std::size_t N = 0);
PeriodResult generalized_period_m(const EigenfunctionSpec& e, const Curve& c, long m,
                                  std::size_t N = 0);

/// Samples e∘γ at N points and transforms once; requires m_max ≤ N/4.
PeriodSpectrum period_spectrum(const EigenfunctionSpec& e, const Curve& c, long m_max,
                               std::size_t N = 0);

/// Samples e(γ(jL/N)), j = 0..N−1.
std::vector<std::complex<double>> sample_on_curve(const EigenfunctionSpec& e, const Curve& c,
                                                  std::size_t N);

}  // namespace geoperiods
